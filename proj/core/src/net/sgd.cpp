#include "ilb/net/sgd.hpp"

#include <cmath>

#include "ilb/errors.hpp"

namespace ilb {

SgdMomentumState::SgdMomentumState(const SgdOptions& options, const ConstParamBlocks& params)
    : options_(options), lr_(options.learning_rate) {
  if (!(options_.learning_rate > 0.0)) throw ConfigError("SGD: learning rate must be > 0");
  if (!(options_.momentum >= 0.0 && options_.momentum < 1.0)) throw ConfigError("SGD: momentum must lie in [0, 1)");
  if (options_.l2 < 0.0) throw ConfigError("SGD: l2 coefficient must be >= 0");
  if (!(options_.decay > 0.0)) throw ConfigError("SGD: decay factor must be > 0");
  velocity_.reserve(params.size());
  for (const auto& p : params) velocity_.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
}

void SgdMomentumState::set_epoch(int epoch, int total_epochs) {
  if (total_epochs <= 0) {
    lr_ = options_.learning_rate;
    return;
  }
  lr_ = options_.learning_rate *
        std::pow(options_.decay, static_cast<double>(epoch) / static_cast<double>(total_epochs));
}

void sgd_step(const ParamBlocks& params, const GradientTape& tape, SgdMomentumState& state) {
  if (params.size() != tape.blocks.size() || params.size() != state.velocity_.size())
    throw ContractError("sgd_step: parameter, gradient and velocity block counts differ");
  const double mu = state.options_.momentum;
  const double l2 = state.options_.l2;
  const double lr = state.lr_;
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto& v = state.velocity_[b];
    const auto& g = tape.blocks[b];
    if (static_cast<Eigen::Index>(params[b].size()) != g.size() || g.size() != v.size())
      throw ContractError("sgd_step: block " + std::to_string(b) + " shape mismatch");
    Eigen::Map<Vector> p(params[b].data(), g.size());
    v = mu * v - lr * (g + l2 * p);
    p += v;
  }
}

}  // namespace ilb
