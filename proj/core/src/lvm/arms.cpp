#include "ilb/lvm/arms.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "ilb/errors.hpp"

namespace ilb {

DenseMatrix patient_latent_means(const FeatureMap& features, const ObservationalDataset& data) {
  if (data.rows() == 0) throw ConfigError("empty dataset");
  const Vector first = features(data.observation(0));
  DenseMatrix means = DenseMatrix::Zero(data.patients, first.size());
  for (std::size_t r = 0; r < data.rows(); ++r)
    means.row(data.label[r]) += (r == 0 ? first : features(data.observation(r))).transpose();
  return means / static_cast<double>(data.steps);
}

ArmEstimates estimate_arms(const DenseMatrix& patient_latents, const ObservationalDataset& data, double ridge) {
  if (ridge < 0.0) throw ConfigError("ridge must be >= 0");
  if (patient_latents.rows() != data.patients) throw ConfigError("estimate_arms: one latent row per patient required");
  const auto n = patient_latents.cols();
  const int K = data.arm_count;

  std::vector<DenseMatrix> gram(static_cast<std::size_t>(K), DenseMatrix::Zero(n, n));
  std::vector<Vector> moment(static_cast<std::size_t>(K), Vector::Zero(n));
  std::vector<double> reward_sq(static_cast<std::size_t>(K), 0.0);
  ArmEstimates out;
  out.samples.assign(static_cast<std::size_t>(K), 0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto a = static_cast<std::size_t>(data.action[r]);
    if (data.action[r] < 0 || data.action[r] >= K) throw ConfigError("logged action outside the arm set");
    const Vector z = patient_latents.row(data.label[r]).transpose();
    gram[a].noalias() += z * z.transpose();
    moment[a] += data.reward[r] * z;
    reward_sq[a] += data.reward[r] * data.reward[r];
    ++out.samples[a];
  }

  for (int a = 0; a < K; ++a) {
    const auto ia = static_cast<std::size_t>(a);
    if (out.samples[ia] == 0) {
      out.theta.push_back(Vector::Zero(n));
      out.residual_variance.push_back(0.0);
      out.usable.push_back(false);
      continue;
    }
    const DenseMatrix lhs = gram[ia] + ridge * DenseMatrix::Identity(n, n);
    Vector theta;
    if (ridge > 0.0) {
      Eigen::LDLT<DenseMatrix> ldlt(lhs);
      theta = ldlt.solve(moment[ia]);
    } else {
      Eigen::FullPivLU<DenseMatrix> lu(lhs);
      if (lu.rank() < n)
        throw SingularityError("arm " + std::to_string(a) +
                               ": normal equations are singular at ridge = 0; use a ridge > 0");
      theta = lu.solve(moment[ia]);
    }
    // SSR = R'R - 2 theta'Z'R + theta'Z'Z theta
    const double ssr = reward_sq[ia] - 2.0 * theta.dot(moment[ia]) + theta.dot(gram[ia] * theta);
    out.theta.push_back(std::move(theta));
    out.residual_variance.push_back(std::max(0.0, ssr) / out.samples[ia]);
    out.usable.push_back(true);
  }
  return out;
}

ArmEstimates estimate_arms(const LvmModel& model, const ObservationalDataset& data, double ridge) {
  return estimate_arms(patient_latent_means([&](const Vector& x) { return extract_latent(model, x); }, data), data,
                       ridge);
}

ArmEstimates exact_arms(const std::vector<Vector>& arms) {
  ArmEstimates out;
  out.theta = arms;
  out.samples.assign(arms.size(), 0);
  out.residual_variance.assign(arms.size(), 0.0);
  out.usable.assign(arms.size(), true);
  return out;
}

}  // namespace ilb
