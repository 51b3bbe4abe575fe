#include "ilb/exp/pipeline.hpp"

#include "ilb/errors.hpp"

namespace ilb {

std::uint64_t stage_seed(const ExperimentConfig& config, std::string_view stage) {
  return substream_seed(config.world.seed, stage);
}

WorldSpec make_world(const ExperimentConfig& config) { return sample_world(config.world); }

GeneratedDataset make_dataset(const ExperimentConfig& config, const WorldSpec& world) {
  return build_observational_dataset(world, config.dataset.patients, config.dataset.steps,
                                     stage_seed(config, "dataset"));
}

TrainingOptions resolve_training(const ExperimentConfig& config, const WorldSpec& world) {
  TrainingOptions t = config.training;
  if (config.auto_hidden_layers) t.hidden_layers = std::max(world.mixing.depth() - 1, 0);
  return t;
}

TrainingResult train_lvm(const ExperimentConfig& config, const WorldSpec& world, const ObservationalDataset& data) {
  return train_contrastive(data, resolve_training(config, world), stage_seed(config, "training"));
}

double reward_r2(const WorldSpec& world, const ArmEstimates& arms, const std::vector<PatientInstance>& patients,
                 const DenseMatrix& latent_means) {
  if (arms.arm_count() != world.arm_count()) throw ConfigError("reward_r2: arm count mismatch");
  if (latent_means.rows() != static_cast<Eigen::Index>(patients.size())) throw ConfigError("reward_r2: row mismatch");
  double total = 0.0;
  int counted = 0;
  std::vector<double> truth(patients.size()), pred(patients.size());
  for (ArmId a = 0; a < arms.arm_count(); ++a) {
    const auto ia = static_cast<std::size_t>(a);
    if (!arms.usable[ia]) continue;
    for (std::size_t q = 0; q < patients.size(); ++q) {
      truth[q] = world.expected_reward(patients[q].mean, a);
      pred[q] = arms.theta[ia].dot(latent_means.row(static_cast<Eigen::Index>(q)).transpose());
    }
    total += r2(truth, pred);
    ++counted;
  }
  if (counted == 0) throw ConfigError("reward_r2: no usable arms");
  return total / counted;
}

namespace {

DenseMatrix means_matrix(const std::vector<PatientInstance>& patients) {
  DenseMatrix m(static_cast<Eigen::Index>(patients.size()), patients.front().mean.size());
  for (std::size_t q = 0; q < patients.size(); ++q) m.row(static_cast<Eigen::Index>(q)) = patients[q].mean.transpose();
  return m;
}

}  // namespace

LvmMetrics evaluate_lvm(const ExperimentConfig& config, const WorldSpec& world, const LvmModel& model,
                        const ArmEstimates& arms, const ObservationalDataset& train,
                        const DatasetLatents& train_hidden) {
  if (model.data_dim() != world.dim()) throw ConfigError("model and world dimensions differ");
  if (model.classes() != train.patients) throw ConfigError("model classes differ from the training patient count");
  const FeatureMap features = [&](const Vector& x) { return extract_latent(model, x); };
  const int test_steps = config.effective_test_steps();

  LvmMetrics m;
  {
    const DenseMatrix zhat = patient_latent_means(features, train);
    const auto rep = mcc(means_matrix(train_hidden.patients), zhat);
    m.mcc_perm_train = rep.mcc_perm;
    m.mcc_affine_train = rep.mcc_affine;
    m.r2_train = reward_r2(world, arms, train_hidden.patients, zhat);
  }
  {
    const auto held = build_observational_dataset(world, config.eval.test_patients, test_steps,
                                                  stage_seed(config, "heldout"));
    const DenseMatrix zhat = patient_latent_means(features, held.observed);
    const auto rep = mcc(means_matrix(held.hidden.patients), zhat);
    m.mcc_perm = rep.mcc_perm;
    m.mcc_affine = rep.mcc_affine;
    m.r2_test = reward_r2(world, arms, held.hidden.patients, zhat);
    m.test_patients = config.eval.test_patients;
  }
  {
    const auto fresh = build_observational_dataset(world, train_hidden.patients, test_steps,
                                                   stage_seed(config, "eval.fresh"));
    const auto score = score_classifier(model, fresh.observed);
    m.accuracy = score.accuracy;
    m.cross_entropy = score.cross_entropy;
  }
  return m;
}

}  // namespace ilb
