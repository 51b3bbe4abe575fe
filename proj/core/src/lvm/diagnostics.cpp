#include "ilb/lvm/diagnostics.hpp"

#include <cmath>
#include <numbers>

#include "ilb/errors.hpp"

namespace ilb {

namespace {

double pearson(const Vector& a, const Vector& b) {
  const Vector ca = a.array() - a.mean();
  const Vector cb = b.array() - b.mean();
  const double den = ca.norm() * cb.norm();
  return den > 0.0 ? ca.dot(cb) / den : 0.0;
}

}  // namespace

double log_observation_density(const WorldSpec& world, const Vector& latent_mean, const Vector& x) {
  const Vector z = world.mixing.inverse(x);
  const double s2 = world.sigma * world.sigma;
  const auto d = static_cast<double>(world.dim());
  const double log_gauss =
      -0.5 * (z - latent_mean).squaredNorm() / s2 - 0.5 * d * std::log(2.0 * std::numbers::pi * s2);
  return log_gauss + world.mixing.log_abs_det_inverse_jacobian(x);
}

Lemma1Report lemma1_diagnostic(const LogitMap& logits, const WorldSpec& world,
                               const std::vector<PatientInstance>& patients, const DenseMatrix& sample) {
  if (sample.rows() < 2) throw ConfigError("lemma1_diagnostic: need at least two sample points");
  if (patients.size() < 2) throw ConfigError("lemma1_diagnostic: need at least two classes");
  if (!(world.sigma > 0.0)) throw ConfigError("lemma1_diagnostic: world sigma must be > 0");
  if (sample.cols() != world.dim()) throw ConfigError("lemma1_diagnostic: sample dimension mismatch");
  const auto n = sample.rows();
  const auto Q = patients.size();

  // Equal history lengths: log(prior_j / prior_0) = 0.
  DenseMatrix model_diff(n, static_cast<Eigen::Index>(Q - 1));
  DenseMatrix true_diff(n, static_cast<Eigen::Index>(Q - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector x = sample.row(i).transpose();
    const Vector l = logits(x);
    if (static_cast<std::size_t>(l.size()) != Q) throw ConfigError("lemma1_diagnostic: logit count != class count");
    const double base = log_observation_density(world, patients[0].mean, x);
    for (std::size_t j = 1; j < Q; ++j) {
      model_diff(i, static_cast<Eigen::Index>(j - 1)) = l(static_cast<Eigen::Index>(j)) - l(0);
      true_diff(i, static_cast<Eigen::Index>(j - 1)) = log_observation_density(world, patients[j].mean, x) - base;
    }
  }

  Lemma1Report report;
  for (std::size_t j = 1; j < Q; ++j) {
    const auto c = static_cast<Eigen::Index>(j - 1);
    report.correlation.push_back(pearson(model_diff.col(c), true_diff.col(c)));
  }
  double sum = 0.0;
  for (double c : report.correlation) sum += c;
  report.mean_correlation = sum / static_cast<double>(report.correlation.size());
  return report;
}

Lemma1Report lemma1_diagnostic(const LvmModel& model, const WorldSpec& world,
                               const std::vector<PatientInstance>& patients, const DenseMatrix& sample) {
  if (model.classes() != static_cast<int>(patients.size()))
    throw ConfigError("lemma1_diagnostic: model classes != patient count");
  return lemma1_diagnostic([&](const Vector& x) { return classify(model, x).logits; }, world, patients, sample);
}

}  // namespace ilb
