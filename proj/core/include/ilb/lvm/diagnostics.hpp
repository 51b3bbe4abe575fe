#pragma once

#include <functional>
#include <vector>

#include "ilb/lvm/model.hpp"
#include "ilb/world/world.hpp"

namespace ilb {

// Compares classifier logits against the true log-density ratios of the generating
// world. For each class j >= 1, Pearson correlation over the sample between
// logit_j(x) - logit_0(x) and log p_j(x) - log p_0(x) + log(prior_j / prior_0), where
// log p_j(x) = log N(g^-1(x); mu_j, sigma^2 I) + log|det J_{g^-1}(x)|.
struct Lemma1Report {
  std::vector<double> correlation;  // index j-1 for class j
  double mean_correlation = 0.0;
};

using LogitMap = std::function<Vector(const Vector&)>;

// `patients[j]` must be class j's latent mean. Throws ConfigError if the sample is
// empty or the class counts disagree.
Lemma1Report lemma1_diagnostic(const LogitMap& logits, const WorldSpec& world,
                               const std::vector<PatientInstance>& patients, const DenseMatrix& sample);
Lemma1Report lemma1_diagnostic(const LvmModel& model, const WorldSpec& world,
                               const std::vector<PatientInstance>& patients, const DenseMatrix& sample);

// log N(g^-1(x); mean, sigma^2 I) + log|det J_{g^-1}(x)|
double log_observation_density(const WorldSpec& world, const Vector& latent_mean, const Vector& x);

}  // namespace ilb
