#pragma once

#include <Eigen/LU>

#include <cstdint>
#include <vector>

#include "ilb/net/linalg.hpp"

namespace ilb {

inline double leaky_relu(double v, double alpha) { return v >= 0.0 ? v : alpha * v; }
inline double leaky_relu_inverse(double v, double alpha) { return v >= 0.0 ? v : v / alpha; }

// Invertible mixing network: square affine layers with leaky-ReLU after every layer
// but the last. Zero layers is the identity map.
class LeakyReluNet {
 public:
  struct Cache {
    const LeakyReluNet* owner = nullptr;
    std::uint64_t version = 0;
    std::vector<Vector> inputs;       // input to each layer
    std::vector<Vector> preacts;      // affine output of each layer
  };

  // Throws ConfigError on non-square or mismatched layers or alpha outside (0,1),
  // SingularityError when some |det W| <= kMinAbsDet.
  LeakyReluNet(Eigen::Index dim, std::vector<AffineLayer> layers, double alpha);

  static LeakyReluNet identity(Eigen::Index dim, double alpha = 0.2);

  // Weights i.i.d. N(0, 1/dim), resampled until |det| > kMinAbsDet; biases drawn the same way.
  static LeakyReluNet random(Eigen::Index dim, int depth, double alpha, Rng& rng);

  Vector forward(const Vector& z) const;
  Vector forward(const Vector& z, Cache& cache) const;

  // Exact inverse, layers undone in reverse order through their LU factorizations.
  Vector inverse(const Vector& x) const;

  // log |det J_{g^{-1}}(x)|.
  double log_abs_det_inverse_jacobian(const Vector& x) const;

  GradientTape backward(const Cache& cache, const Vector& output_gradient) const;

  Eigen::Index dim() const { return dim_; }
  int depth() const { return static_cast<int>(layers_.size()); }
  double alpha() const { return alpha_; }
  const std::vector<AffineLayer>& layers() const { return layers_; }

  ConstParamBlocks parameter_blocks() const;
  // Mutable access invalidates outstanding caches.
  ParamBlocks parameter_blocks();

  static constexpr double kMinAbsDet = 1e-10;

 private:
  // LU factors of each weight; refreshed lazily after mutable parameter access.
  const std::vector<Eigen::PartialPivLU<DenseMatrix>>& factors() const;
  void refactor() const;

  Eigen::Index dim_;
  std::vector<AffineLayer> layers_;
  double alpha_;
  std::uint64_t version_ = 0;
  mutable std::vector<Eigen::PartialPivLU<DenseMatrix>> lu_;
  mutable std::uint64_t lu_version_ = 0;
};

}  // namespace ilb
