#pragma once

#include <cstdint>
#include <string_view>

#include "ilb/eval/metrics.hpp"
#include "ilb/exp/config.hpp"
#include "ilb/lvm/arms.hpp"
#include "ilb/lvm/trainer.hpp"
#include "ilb/world/dataset.hpp"

namespace ilb {

// Seeds of the named substreams hanging off the root seed (world.seed).
std::uint64_t stage_seed(const ExperimentConfig& config, std::string_view stage);

WorldSpec make_world(const ExperimentConfig& config);
GeneratedDataset make_dataset(const ExperimentConfig& config, const WorldSpec& world);

// Extractor depth follows the mixing depth (L - 1 maxout layers plus the output layer)
// unless the config pins it.
TrainingOptions resolve_training(const ExperimentConfig& config, const WorldSpec& world);

TrainingResult train_lvm(const ExperimentConfig& config, const WorldSpec& world, const ObservationalDataset& data);

struct LvmMetrics {
  double mcc_perm = 0.0;     // held-out patients
  double mcc_affine = 0.0;
  double mcc_perm_train = 0.0;
  double mcc_affine_train = 0.0;
  double r2_train = 0.0;     // mean over usable arms
  double r2_test = 0.0;
  double accuracy = 0.0;     // fresh observations of the training patients
  double cross_entropy = 0.0;
  int test_patients = 0;
};

// Latents are compared as per-patient means: the mean of h(x_t) over a patient's
// observations against that patient's Z_q. Held-out patients come from the "heldout"
// substream, fresh training-patient observations from "eval.fresh".
LvmMetrics evaluate_lvm(const ExperimentConfig& config, const WorldSpec& world, const LvmModel& model,
                        const ArmEstimates& arms, const ObservationalDataset& train,
                        const DatasetLatents& train_hidden);

// Mean over usable arms of the R^2 between theta_a'Z_q and theta_hat_a'z_hat_q.
double reward_r2(const WorldSpec& world, const ArmEstimates& arms, const std::vector<PatientInstance>& patients,
                 const DenseMatrix& latent_means);

}  // namespace ilb
