#pragma once

#include <cstdint>
#include <vector>

#include "ilb/net/linalg.hpp"

namespace ilb {

// k parallel affine pieces combined by an elementwise max.
struct MaxoutLayer {
  std::vector<AffineLayer> pieces;

  Eigen::Index in_dim() const { return pieces.front().in_dim(); }
  Eigen::Index out_dim() const { return pieces.front().out_dim(); }
};

// Feed-forward stack of maxout layers followed by one plain affine output layer.
// With no hidden layers the net is a single affine map.
class MaxoutNet {
 public:
  struct Cache {
    const MaxoutNet* owner = nullptr;
    std::uint64_t version = 0;
    std::vector<Vector> inputs;            // input to each layer, output layer last
    std::vector<std::vector<int>> argmax;  // winning piece per unit of each hidden layer
  };

  MaxoutNet(std::vector<MaxoutLayer> hidden, AffineLayer output);

  // Hidden weights i.i.d. N(0, 1/fan_in), biases zero.
  static MaxoutNet random(Eigen::Index in_dim, Eigen::Index width, int hidden_layers, int pieces,
                          Eigen::Index out_dim, Rng& rng);

  Vector forward(const Vector& x) const;
  Vector forward(const Vector& x, Cache& cache) const;

  // Throws ContractError when `cache` came from another net or predates a parameter update.
  GradientTape backward(const Cache& cache, const Vector& output_gradient) const;

  Eigen::Index in_dim() const;
  Eigen::Index out_dim() const { return output_.out_dim(); }
  int hidden_layers() const { return static_cast<int>(hidden_.size()); }
  int pieces() const { return hidden_.empty() ? 0 : static_cast<int>(hidden_.front().pieces.size()); }
  const std::vector<MaxoutLayer>& hidden() const { return hidden_; }
  const AffineLayer& output() const { return output_; }

  // Shift the output bias, h(x) -> h(x) + delta.
  void shift_output(const Vector& delta);

  // Fold an affine input transform into the first layer: h(x) -> h(a x + c).
  void precompose_input(const DenseMatrix& a, const Vector& c);

  ConstParamBlocks parameter_blocks() const;
  ParamBlocks parameter_blocks();

 private:
  std::vector<MaxoutLayer> hidden_;
  AffineLayer output_;
  std::uint64_t version_ = 0;
};

}  // namespace ilb
