#include "ilb/lvm/model.hpp"

#include <cmath>

#include "ilb/errors.hpp"

namespace ilb {

void LvmModel::validate() const {
  if (extractor.out_dim() != extractor.in_dim())
    throw ConfigError("LVM feature dimension must equal the data dimension");
  if (head_weight.cols() != extractor.out_dim() || head_bias.size() != head_weight.rows())
    throw ConfigError("LVM head shape does not match the extractor");
  if (!all_finite(head_weight) || !all_finite(head_bias)) throw ConfigError("LVM head has non-finite entries");
}

double log_sum_exp(const Vector& logits) {
  const double m = logits.maxCoeff();
  return m + std::log((logits.array() - m).exp().sum());
}

Vector softmax(const Vector& logits) {
  const double m = logits.maxCoeff();
  Vector e = (logits.array() - m).exp();
  return e / e.sum();
}

ClassifierOutput classify(const LvmModel& model, const Vector& x) {
  ClassifierOutput out;
  out.logits = model.head_weight * model.extractor.forward(x) + model.head_bias;
  out.probabilities = softmax(out.logits);
  return out;
}

Vector extract_latent(const LvmModel& model, const Vector& x) { return model.extractor.forward(x); }

PinnedHead to_pinned(const DenseMatrix& head_weight, const Vector& head_bias) {
  const auto q = head_weight.rows();
  if (q < 1 || head_bias.size() != q) throw ConfigError("to_pinned: head shape mismatch");
  PinnedHead p;
  p.weight = head_weight.bottomRows(q - 1).rowwise() - head_weight.row(0);
  p.bias = head_bias.tail(q - 1).array() - head_bias(0);
  return p;
}

Vector pinned_probabilities(const PinnedHead& head, const Vector& features) {
  const Vector rest = head.weight * features + head.bias;
  Vector logits(rest.size() + 1);
  logits(0) = 0.0;
  logits.tail(rest.size()) = rest;
  // Same quotient as 1 + sum exp(.), evaluated with a max shift.
  const double m = logits.maxCoeff();
  Vector e = (logits.array() - m).exp();
  return e / e.sum();
}

}  // namespace ilb
