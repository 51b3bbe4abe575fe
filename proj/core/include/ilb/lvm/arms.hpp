#pragma once

#include <functional>
#include <vector>

#include "ilb/lvm/model.hpp"
#include "ilb/world/dataset.hpp"

namespace ilb {

// Per-arm linear reward parameters in the model's latent coordinates.
struct ArmEstimates {
  std::vector<Vector> theta;
  std::vector<int> samples;
  std::vector<double> residual_variance;
  std::vector<bool> usable;  // false when the arm was never logged

  int arm_count() const { return static_cast<int>(theta.size()); }
};

using FeatureMap = std::function<Vector(const Vector&)>;

// Q x n matrix whose row q is the mean of features(x) over patient q's history.
DenseMatrix patient_latent_means(const FeatureMap& features, const ObservationalDataset& data);

// Ridge regression of each arm's logged rewards on the latent means of the patients
// who received it: theta_a = (Z'Z + ridge I)^-1 Z'R. Throws SingularityError when
// ridge == 0 and Z'Z is singular.
ArmEstimates estimate_arms(const DenseMatrix& patient_latents, const ObservationalDataset& data, double ridge);
ArmEstimates estimate_arms(const LvmModel& model, const ObservationalDataset& data, double ridge);

// Ground-truth arms wrapped as estimates (oracle agents).
ArmEstimates exact_arms(const std::vector<Vector>& arms);

}  // namespace ilb
