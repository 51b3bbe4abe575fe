#include "ilb/net/maxout_net.hpp"

#include <cmath>
#include <string>

#include "ilb/errors.hpp"

namespace ilb {

MaxoutNet::MaxoutNet(std::vector<MaxoutLayer> hidden, AffineLayer output)
    : hidden_(std::move(hidden)), output_(std::move(output)) {
  if (output_.bias.size() != output_.out_dim()) throw ConfigError("MaxoutNet: output bias size mismatch");
  Eigen::Index expected_in = -1;
  for (std::size_t i = 0; i < hidden_.size(); ++i) {
    const auto& layer = hidden_[i];
    if (layer.pieces.size() < 2) throw ConfigError("MaxoutNet: hidden layer needs >= 2 pieces");
    if (layer.pieces.size() != hidden_.front().pieces.size())
      throw ConfigError("MaxoutNet: all hidden layers must have the same piece count");
    for (const auto& p : layer.pieces) {
      if (p.weight.rows() != layer.out_dim() || p.weight.cols() != layer.in_dim() ||
          p.bias.size() != layer.out_dim())
        throw ConfigError("MaxoutNet: pieces of hidden layer " + std::to_string(i) + " disagree in shape");
    }
    if (expected_in >= 0 && layer.in_dim() != expected_in)
      throw ConfigError("MaxoutNet: hidden layer " + std::to_string(i) + " input dimension mismatch");
    expected_in = layer.out_dim();
  }
  if (expected_in >= 0 && output_.in_dim() != expected_in)
    throw ConfigError("MaxoutNet: output layer input dimension mismatch");
}

MaxoutNet MaxoutNet::random(Eigen::Index in_dim, Eigen::Index width, int hidden_layers, int pieces,
                            Eigen::Index out_dim, Rng& rng) {
  if (hidden_layers < 0 || in_dim < 1 || out_dim < 1 || width < 1)
    throw ConfigError("MaxoutNet::random: invalid shape");
  if (hidden_layers > 0 && pieces < 2) throw ConfigError("MaxoutNet::random: pieces must be >= 2");
  std::vector<MaxoutLayer> hidden;
  Eigen::Index fan_in = in_dim;
  for (int l = 0; l < hidden_layers; ++l) {
    MaxoutLayer layer;
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (int k = 0; k < pieces; ++k)
      layer.pieces.push_back({random_normal(width, fan_in, scale, rng), Vector::Zero(width)});
    hidden.push_back(std::move(layer));
    fan_in = width;
  }
  AffineLayer out{random_normal(out_dim, fan_in, 1.0 / std::sqrt(static_cast<double>(fan_in)), rng),
                  Vector::Zero(out_dim)};
  return MaxoutNet(std::move(hidden), std::move(out));
}

Eigen::Index MaxoutNet::in_dim() const { return hidden_.empty() ? output_.in_dim() : hidden_.front().in_dim(); }

Vector MaxoutNet::forward(const Vector& x) const {
  require_dim(x, in_dim(), "MaxoutNet::forward");
  Vector h = x;
  for (const auto& layer : hidden_) {
    Vector best = layer.pieces[0].apply(h);
    for (std::size_t k = 1; k < layer.pieces.size(); ++k) best = best.cwiseMax(layer.pieces[k].apply(h));
    h = std::move(best);
  }
  return output_.apply(h);
}

Vector MaxoutNet::forward(const Vector& x, Cache& cache) const {
  require_dim(x, in_dim(), "MaxoutNet::forward");
  cache.owner = this;
  cache.version = version_;
  cache.inputs.resize(hidden_.size() + 1);
  cache.argmax.resize(hidden_.size());
  Vector h = x;
  for (std::size_t i = 0; i < hidden_.size(); ++i) {
    const auto& layer = hidden_[i];
    cache.inputs[i] = h;
    Vector best = layer.pieces[0].apply(h);
    auto& arg = cache.argmax[i];
    arg.assign(static_cast<std::size_t>(best.size()), 0);
    for (std::size_t k = 1; k < layer.pieces.size(); ++k) {
      const Vector cand = layer.pieces[k].apply(h);
      for (Eigen::Index j = 0; j < best.size(); ++j) {
        // Strict comparison: ties go to the lowest piece index.
        if (cand(j) > best(j)) {
          best(j) = cand(j);
          arg[static_cast<std::size_t>(j)] = static_cast<int>(k);
        }
      }
    }
    h = std::move(best);
  }
  cache.inputs.back() = h;
  return output_.apply(h);
}

GradientTape MaxoutNet::backward(const Cache& cache, const Vector& output_gradient) const {
  if (cache.owner != this || cache.version != version_ || cache.inputs.size() != hidden_.size() + 1)
    throw ContractError("MaxoutNet::backward: stale or foreign cache");
  require_dim(output_gradient, out_dim(), "MaxoutNet::backward");

  GradientTape tape = GradientTape::shaped_like(parameter_blocks(), in_dim());
  const std::size_t out_block = tape.blocks.size() - 2;
  {
    Eigen::Map<DenseMatrix> gw(tape.blocks[out_block].data(), output_.out_dim(), output_.in_dim());
    gw.noalias() = output_gradient * cache.inputs.back().transpose();
    tape.blocks[out_block + 1] = output_gradient;
  }
  Vector g = output_.weight.transpose() * output_gradient;

  // Block layout: hidden layer i, piece k -> blocks[2*(i*K + k)] (weight), +1 (bias).
  for (std::size_t i = hidden_.size(); i-- > 0;) {
    const auto& layer = hidden_[i];
    const std::size_t K = layer.pieces.size();
    const Vector& in = cache.inputs[i];
    Vector g_in = Vector::Zero(layer.in_dim());
    for (std::size_t k = 0; k < K; ++k) {
      Vector gk = Vector::Zero(layer.out_dim());
      for (Eigen::Index j = 0; j < gk.size(); ++j)
        if (cache.argmax[i][static_cast<std::size_t>(j)] == static_cast<int>(k)) gk(j) = g(j);
      const std::size_t b = 2 * (i * K + k);
      Eigen::Map<DenseMatrix> gw(tape.blocks[b].data(), layer.out_dim(), layer.in_dim());
      gw.noalias() = gk * in.transpose();
      tape.blocks[b + 1] = gk;
      g_in.noalias() += layer.pieces[k].weight.transpose() * gk;
    }
    g = std::move(g_in);
  }
  tape.input = g;
  return tape;
}

void MaxoutNet::shift_output(const Vector& delta) {
  require_dim(delta, out_dim(), "MaxoutNet::shift_output");
  output_.bias += delta;
  ++version_;
}

void MaxoutNet::precompose_input(const DenseMatrix& a, const Vector& c) {
  require_dim(c, a.rows(), "MaxoutNet::precompose_input");
  if (a.rows() != in_dim()) throw ConfigError("MaxoutNet::precompose_input: transform rows must equal the input dimension");
  auto fold = [&](AffineLayer& l) {
    l.bias += l.weight * c;
    l.weight = (l.weight * a).eval();
  };
  if (hidden_.empty()) {
    fold(output_);
  } else {
    for (auto& p : hidden_.front().pieces) fold(p);
  }
  ++version_;
}

ConstParamBlocks MaxoutNet::parameter_blocks() const {
  ConstParamBlocks blocks;
  for (const auto& layer : hidden_)
    for (const auto& p : layer.pieces) {
      blocks.push_back(as_span(p.weight));
      blocks.push_back(as_span(p.bias));
    }
  blocks.push_back(as_span(output_.weight));
  blocks.push_back(as_span(output_.bias));
  return blocks;
}

ParamBlocks MaxoutNet::parameter_blocks() {
  ++version_;
  ParamBlocks blocks;
  for (auto& layer : hidden_)
    for (auto& p : layer.pieces) {
      blocks.push_back(as_span(p.weight));
      blocks.push_back(as_span(p.bias));
    }
  blocks.push_back(as_span(output_.weight));
  blocks.push_back(as_span(output_.bias));
  return blocks;
}

}  // namespace ilb
