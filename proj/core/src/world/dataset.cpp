#include "ilb/world/dataset.hpp"

#include <Eigen/SVD>

#include <random>
#include <string>

#include "ilb/errors.hpp"

namespace ilb {

int patient_mean_rank(const std::vector<PatientInstance>& patients) {
  if (patients.empty()) return 0;
  const Eigen::Index d = patients.front().mean.size();
  DenseMatrix m(static_cast<Eigen::Index>(patients.size()), d);
  for (std::size_t q = 0; q < patients.size(); ++q) m.row(static_cast<Eigen::Index>(q)) = patients[q].mean.transpose();
  Eigen::JacobiSVD<DenseMatrix> svd(m);
  const auto& s = svd.singularValues();
  const double tol = std::max(m.rows(), m.cols()) * s(0) * 1e-12;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++rank;
  return rank;
}

GeneratedDataset build_observational_dataset(const WorldSpec& world, int patients, int steps, std::uint64_t seed) {
  const auto d = static_cast<int>(world.dim());
  if (patients < d) throw ConfigError("dataset.patients (" + std::to_string(patients) + ") must be >= d (" + std::to_string(d) + ")");
  constexpr int kMaxAttempts = 64;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<PatientInstance> sampled;
    sampled.reserve(static_cast<std::size_t>(patients));
    for (int q = 0; q < patients; ++q) {
      Rng rng = make_rng(seed, "patient", (static_cast<std::uint64_t>(attempt) << 32) | static_cast<std::uint64_t>(q));
      sampled.push_back(sample_patient(world, rng, q));
    }
    if (patient_mean_rank(sampled) == d) return build_observational_dataset(world, std::move(sampled), steps, seed);
  }
  throw ConfigError("could not sample full-rank patient means");
}

GeneratedDataset build_observational_dataset(const WorldSpec& world, std::vector<PatientInstance> patients,
                                             int steps, std::uint64_t seed) {
  world.validate();
  const auto d = world.dim();
  if (static_cast<Eigen::Index>(patients.size()) < d) throw ConfigError("need at least d patients");
  if (steps < 1) throw ConfigError("dataset.steps must be >= 1");
  for (const auto& p : patients) require_dim(p.mean, d, "patient mean");
  if (patient_mean_rank(patients) != d) throw ConfigError("patient means do not have rank d");

  const int Q = static_cast<int>(patients.size());
  const auto rows = static_cast<Eigen::Index>(Q) * steps;
  GeneratedDataset out;
  auto& obs = out.observed;
  obs.patients = Q;
  obs.steps = steps;
  obs.arm_count = world.arm_count();
  obs.x.resize(rows, d);
  obs.label.resize(static_cast<std::size_t>(rows));
  obs.action.resize(static_cast<std::size_t>(rows));
  obs.reward.resize(static_cast<std::size_t>(rows));
  out.hidden.z.resize(rows, d);

  // Each patient owns its substream, so rows are independent of generation order.
  for (int q = 0; q < Q; ++q) {
    Rng rng = make_rng(seed, "history", static_cast<std::uint64_t>(q));
    std::uniform_int_distribution<int> pick(0, world.arm_count() - 1);
    const auto& patient = patients[static_cast<std::size_t>(q)];
    for (int t = 0; t < steps; ++t) {
      const auto row = static_cast<Eigen::Index>(q) * steps + t;
      const auto idx = static_cast<std::size_t>(row);
      auto o = emit_observation(world, patient, rng);
      obs.x.row(row) = o.visible.x.transpose();
      out.hidden.z.row(row) = o.hidden.z.transpose();
      obs.label[idx] = q;
      obs.action[idx] = pick(rng);
      obs.reward[idx] = emit_reward(world, patient, obs.action[idx], rng);
    }
  }
  out.hidden.patients = std::move(patients);
  return out;
}

ObservationalDataset relog_rewards(const ObservationalDataset& data, const DatasetLatents& hidden,
                                   const WorldSpec& world, std::uint64_t seed) {
  if (static_cast<int>(hidden.patients.size()) != data.patients) throw ConfigError("relog: patient count mismatch");
  ObservationalDataset out = data;
  out.arm_count = world.arm_count();
  for (int q = 0; q < data.patients; ++q) {
    Rng rng = make_rng(seed, "relog", static_cast<std::uint64_t>(q));
    std::uniform_int_distribution<int> pick(0, world.arm_count() - 1);
    for (int t = 0; t < data.steps; ++t) {
      const auto idx = static_cast<std::size_t>(q) * static_cast<std::size_t>(data.steps) + static_cast<std::size_t>(t);
      out.action[idx] = pick(rng);
      out.reward[idx] = emit_reward(world, hidden.patients[static_cast<std::size_t>(q)], out.action[idx], rng);
    }
  }
  return out;
}

}  // namespace ilb
