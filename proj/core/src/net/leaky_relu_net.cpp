#include "ilb/net/leaky_relu_net.hpp"

#include <cmath>
#include <string>

#include "ilb/errors.hpp"

namespace ilb {

LeakyReluNet::LeakyReluNet(Eigen::Index dim, std::vector<AffineLayer> layers, double alpha)
    : dim_(dim), layers_(std::move(layers)), alpha_(alpha) {
  if (dim_ < 1) throw ConfigError("LeakyReluNet: dimension must be >= 1");
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw ConfigError("LeakyReluNet: alpha must lie in (0, 1)");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.weight.rows() != dim_ || l.weight.cols() != dim_ || l.bias.size() != dim_)
      throw ConfigError("LeakyReluNet: layer " + std::to_string(i) + " is not " + std::to_string(dim_) +
                        "x" + std::to_string(dim_));
    if (!all_finite(l.weight) || !all_finite(l.bias))
      throw ConfigError("LeakyReluNet: layer " + std::to_string(i) + " has non-finite entries");
  }
  refactor();
}

const std::vector<Eigen::PartialPivLU<DenseMatrix>>& LeakyReluNet::factors() const {
  if (lu_version_ != version_) refactor();
  return lu_;
}

void LeakyReluNet::refactor() const {
  lu_version_ = version_;
  lu_.clear();
  lu_.reserve(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    lu_.emplace_back(layers_[i].weight);
    if (!(std::abs(lu_.back().determinant()) > kMinAbsDet))
      throw SingularityError("LeakyReluNet: layer " + std::to_string(i) + " has |det| <= 1e-10");
  }
}

LeakyReluNet LeakyReluNet::identity(Eigen::Index dim, double alpha) { return LeakyReluNet(dim, {}, alpha); }

LeakyReluNet LeakyReluNet::random(Eigen::Index dim, int depth, double alpha, Rng& rng) {
  if (depth < 0) throw ConfigError("LeakyReluNet: depth must be >= 0");
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<AffineLayer> layers;
  for (int l = 0; l < depth; ++l) {
    DenseMatrix w;
    do {
      w = random_normal(dim, dim, scale, rng);
    } while (!(std::abs(w.determinant()) > kMinAbsDet));
    layers.push_back({std::move(w), random_normal(dim, scale, rng)});
  }
  return LeakyReluNet(dim, std::move(layers), alpha);
}

Vector LeakyReluNet::forward(const Vector& z) const {
  Cache scratch;
  return forward(z, scratch);
}

Vector LeakyReluNet::forward(const Vector& z, Cache& cache) const {
  require_dim(z, dim_, "LeakyReluNet::forward");
  cache.owner = this;
  cache.version = version_;
  cache.inputs.clear();
  cache.preacts.clear();
  Vector h = z;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    cache.inputs.push_back(h);
    Vector a = layers_[i].apply(h);
    cache.preacts.push_back(a);
    if (i + 1 < layers_.size()) {
      for (Eigen::Index j = 0; j < a.size(); ++j) a(j) = leaky_relu(a(j), alpha_);
    }
    h = std::move(a);
  }
  return h;
}

Vector LeakyReluNet::inverse(const Vector& x) const {
  require_dim(x, dim_, "LeakyReluNet::inverse");
  const auto& lu = factors();
  Vector h = x;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    if (k + 1 < layers_.size()) {
      for (Eigen::Index j = 0; j < h.size(); ++j) h(j) = leaky_relu_inverse(h(j), alpha_);
    }
    if (lu[k].rcond() < 1e-14)
      throw SingularityError("LeakyReluNet::inverse: layer " + std::to_string(k) + " is numerically singular");
    const Vector rhs = h - layers_[k].bias;
    h = lu[k].solve(rhs);
  }
  return h;
}

double LeakyReluNet::log_abs_det_inverse_jacobian(const Vector& x) const {
  // J_g(z) = W_L D_{L-1} W_{L-1} ... D_1 W_1 with D_i diagonal slopes (1 or alpha).
  const Vector z = inverse(x);
  Cache cache;
  forward(z, cache);
  const auto& lu = factors();
  double log_det = 0.0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    log_det += std::log(std::abs(lu[i].determinant()));
    if (i + 1 < layers_.size()) {
      for (Eigen::Index j = 0; j < dim_; ++j)
        if (cache.preacts[i](j) < 0.0) log_det += std::log(alpha_);
    }
  }
  return -log_det;
}

GradientTape LeakyReluNet::backward(const Cache& cache, const Vector& output_gradient) const {
  if (cache.owner != this || cache.version != version_ || cache.inputs.size() != layers_.size())
    throw ContractError("LeakyReluNet::backward: stale or foreign cache");
  require_dim(output_gradient, dim_, "LeakyReluNet::backward");
  GradientTape tape = GradientTape::shaped_like(parameter_blocks(), dim_);
  Vector g = output_gradient;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    if (k + 1 < layers_.size()) {
      for (Eigen::Index j = 0; j < dim_; ++j)
        if (cache.preacts[k](j) < 0.0) g(j) *= alpha_;
    }
    Eigen::Map<DenseMatrix> gw(tape.blocks[2 * k].data(), dim_, dim_);
    gw.noalias() = g * cache.inputs[k].transpose();
    tape.blocks[2 * k + 1] = g;
    g = layers_[k].weight.transpose() * g;
  }
  tape.input = g;
  return tape;
}

ConstParamBlocks LeakyReluNet::parameter_blocks() const {
  ConstParamBlocks blocks;
  for (const auto& l : layers_) {
    blocks.push_back(as_span(l.weight));
    blocks.push_back(as_span(l.bias));
  }
  return blocks;
}

ParamBlocks LeakyReluNet::parameter_blocks() {
  ++version_;
  ParamBlocks blocks;
  for (auto& l : layers_) {
    blocks.push_back(as_span(l.weight));
    blocks.push_back(as_span(l.bias));
  }
  return blocks;
}

}  // namespace ilb
