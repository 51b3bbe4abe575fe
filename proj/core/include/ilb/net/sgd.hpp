#pragma once

#include <vector>

#include "ilb/net/linalg.hpp"

namespace ilb {

struct SgdOptions {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double l2 = 1e-4;
  // lr(epoch) = learning_rate * decay^(epoch / total_epochs)
  double decay = 0.1;

  bool operator==(const SgdOptions&) const = default;
};

class SgdMomentumState {
 public:
  SgdMomentumState(const SgdOptions& options, const ConstParamBlocks& params);

  // Moves the learning rate along the decay schedule.
  void set_epoch(int epoch, int total_epochs);

  double learning_rate() const { return lr_; }
  const SgdOptions& options() const { return options_; }
  const std::vector<Vector>& velocity() const { return velocity_; }

 private:
  friend void sgd_step(const ParamBlocks&, const GradientTape&, SgdMomentumState&);

  SgdOptions options_;
  double lr_;
  std::vector<Vector> velocity_;
};

// velocity <- momentum * velocity - lr * (grad + l2 * param); param <- param + velocity
void sgd_step(const ParamBlocks& params, const GradientTape& tape, SgdMomentumState& state);

}  // namespace ilb
