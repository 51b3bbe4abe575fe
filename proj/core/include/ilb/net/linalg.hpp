#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ilb/rng.hpp"

namespace ilb {

// Dense 64-bit matrices and vectors. (row, col) indexing; storage order is Eigen's default.
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

bool all_finite(const DenseMatrix& m);
bool all_finite(const Vector& v);

// Throws ConfigError naming `what` when dim(v) != expected.
void require_dim(const Vector& v, Eigen::Index expected, const std::string& what);

// Entries i.i.d. N(0, 1) * scale.
DenseMatrix random_normal(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng);
Vector random_normal(Eigen::Index size, double scale, Rng& rng);

// One affine map y = weight * x + bias.
struct AffineLayer {
  DenseMatrix weight;
  Vector bias;

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }
  Vector apply(const Vector& x) const { return weight * x + bias; }
};

// Flat views over parameter storage; the unit the optimizer and gradient tape work in.
using ParamBlocks = std::vector<std::span<double>>;
using ConstParamBlocks = std::vector<std::span<const double>>;

inline std::span<double> as_span(DenseMatrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
inline std::span<double> as_span(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
inline std::span<const double> as_span(const DenseMatrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Gradient buffers, one flat block per parameter block of the owning model, plus the
// gradient with respect to the model input.
struct GradientTape {
  std::vector<Vector> blocks;
  Vector input;

  static GradientTape shaped_like(const ConstParamBlocks& params, Eigen::Index input_dim);
  void zero();
  void add(const GradientTape& other);
  void scale(double factor);
  bool is_zero() const;
};

}  // namespace ilb
