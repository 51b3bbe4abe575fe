#pragma once

#include <cstdint>
#include <vector>

#include "ilb/world/world.hpp"

namespace ilb {

// Logged history D: row q*steps + t holds patient q's step t.
struct ObservationalDataset {
  int patients = 0;
  int steps = 0;
  int arm_count = 0;
  DenseMatrix x;  // rows x d
  std::vector<int> label;
  std::vector<ArmId> action;
  std::vector<double> reward;

  Eigen::Index dim() const { return x.cols(); }
  std::size_t rows() const { return label.size(); }
  Vector observation(std::size_t row) const { return x.row(static_cast<Eigen::Index>(row)).transpose(); }
};

// Ground truth behind a dataset, never handed to training or agents.
struct DatasetLatents {
  std::vector<PatientInstance> patients;
  DenseMatrix z;  // Z_{q,t}, same row order as the dataset
};

struct GeneratedDataset {
  ObservationalDataset observed;
  DatasetLatents hidden;
};

// Q patients from the ("patient", q) substreams of `seed`, T_o uniformly logged steps each.
// The patient-mean matrix is resampled until it has rank d. Throws ConfigError if Q < d.
GeneratedDataset build_observational_dataset(const WorldSpec& world, int patients, int steps,
                                             std::uint64_t seed);

// Same, with caller-fixed patient means; throws ConfigError if they do not have rank d.
GeneratedDataset build_observational_dataset(const WorldSpec& world, std::vector<PatientInstance> patients,
                                             int steps, std::uint64_t seed);

// Rank of the Q x d matrix of patient means.
int patient_mean_rank(const std::vector<PatientInstance>& patients);

// Rewrites actions and rewards with a fresh uniform log against `world`'s arms,
// keeping observations. Used when the arm set changes under the same population.
ObservationalDataset relog_rewards(const ObservationalDataset& data, const DatasetLatents& hidden,
                                   const WorldSpec& world, std::uint64_t seed);

}  // namespace ilb
