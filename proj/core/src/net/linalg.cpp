#include "ilb/net/linalg.hpp"

#include <random>

#include "ilb/errors.hpp"

namespace ilb {

bool all_finite(const DenseMatrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

void require_dim(const Vector& v, Eigen::Index expected, const std::string& what) {
  if (v.size() != expected) {
    throw ConfigError(what + ": expected dimension " + std::to_string(expected) + ", got " +
                      std::to_string(v.size()));
  }
}

DenseMatrix random_normal(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix m(rows, cols);
  // Row-major fill so the draw order matches the serialized layout.
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = scale * normal(rng);
  return m;
}

Vector random_normal(Eigen::Index size, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = scale * normal(rng);
  return v;
}

GradientTape GradientTape::shaped_like(const ConstParamBlocks& params, Eigen::Index input_dim) {
  GradientTape tape;
  tape.blocks.reserve(params.size());
  for (const auto& p : params) tape.blocks.push_back(Vector::Zero(static_cast<Eigen::Index>(p.size())));
  tape.input = Vector::Zero(input_dim);
  return tape;
}

void GradientTape::zero() {
  for (auto& b : blocks) b.setZero();
  input.setZero();
}

void GradientTape::add(const GradientTape& other) {
  if (other.blocks.size() != blocks.size()) throw ContractError("GradientTape::add: block count mismatch");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != other.blocks[i].size())
      throw ContractError("GradientTape::add: block shape mismatch");
    blocks[i] += other.blocks[i];
  }
  if (input.size() == other.input.size()) input += other.input;
}

void GradientTape::scale(double factor) {
  for (auto& b : blocks) b *= factor;
  input *= factor;
}

bool GradientTape::is_zero() const {
  for (const auto& b : blocks)
    if (!b.isZero(0.0)) return false;
  return input.isZero(0.0);
}

}  // namespace ilb
