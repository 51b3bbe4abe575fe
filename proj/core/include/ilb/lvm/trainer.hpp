#pragma once

#include <cstdint>
#include <vector>

#include "ilb/lvm/model.hpp"
#include "ilb/net/sgd.hpp"
#include "ilb/world/dataset.hpp"

namespace ilb {

struct TrainingOptions {
  int epochs = 300;
  double stage1_fraction = 0.2;  // head-only epochs as a share of all epochs
  int batch_size = 64;
  SgdOptions sgd{};
  bool early_stop = true;
  double holdout_fraction = 0.1;  // tail of every patient's history
  int patience = 10;
  int hidden_layers = 1;
  int hidden_width = 0;  // 0: same as the data dimension
  int pieces = 2;
  // Shift h so its training mean is zero (head bias compensates). Keeps a linear,
  // intercept-free reward model exact under affine recovery.
  bool center_features = true;
  // Train on whitened inputs and fold the whitening into the first layer afterwards.
  // The deep leaky mixing leaves x badly conditioned; the saved model still takes raw x.
  bool whiten_inputs = true;

  bool operator==(const TrainingOptions&) const = default;
};

struct EpochLog {
  int epoch = 0;
  int stage = 1;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double holdout_loss = 0.0;
  double holdout_accuracy = 0.0;
};

struct TrainingResult {
  LvmModel model;
  std::vector<EpochLog> log;
};

// Patient-discrimination training: stage 1 fits only the softmax head on frozen
// features, stage 2 fits extractor and head jointly. Throws ConfigError on bad options
// or Q < d, TrainingError if the loss stops being finite.
TrainingResult train_contrastive(const ObservationalDataset& data, const TrainingOptions& options,
                                 std::uint64_t seed);

// Mean cross-entropy and accuracy of `model` on the given rows.
struct ClassificationScore {
  double cross_entropy = 0.0;
  double accuracy = 0.0;
};
ClassificationScore score_classifier(const LvmModel& model, const ObservationalDataset& data,
                                     const std::vector<std::size_t>& rows);
ClassificationScore score_classifier(const LvmModel& model, const ObservationalDataset& data);

// Copy of `data` with labels permuted across rows. Null control: labels carry no signal.
ObservationalDataset shuffle_labels(const ObservationalDataset& data, std::uint64_t seed);

}  // namespace ilb
