#pragma once

#include <cstdint>

#include "ilb/net/maxout_net.hpp"

namespace ilb {

struct TrainingMetadata {
  int epochs = 0;
  double final_loss = 0.0;
  std::uint64_t seed = 0;
};

// Feature extractor h plus a Q-way softmax head over patient labels.
struct LvmModel {
  MaxoutNet extractor;
  DenseMatrix head_weight;  // Q x n
  Vector head_bias;         // Q
  TrainingMetadata metadata;

  int classes() const { return static_cast<int>(head_weight.rows()); }
  Eigen::Index latent_dim() const { return extractor.out_dim(); }
  Eigen::Index data_dim() const { return extractor.in_dim(); }
  // Throws ConfigError on shape mismatches or non-finite head entries.
  void validate() const;
};

struct ClassifierOutput {
  Vector logits;
  Vector probabilities;
};

// Numerically stable softmax (max-shifted).
Vector softmax(const Vector& logits);
double log_sum_exp(const Vector& logits);

ClassifierOutput classify(const LvmModel& model, const Vector& x);

// z_hat = h(x)
Vector extract_latent(const LvmModel& model, const Vector& x);

// The head with class 0's logit pinned to zero: rows 1..Q-1 of W and b after
// subtracting row 0.
struct PinnedHead {
  DenseMatrix weight;  // (Q-1) x n
  Vector bias;         // Q-1
};

PinnedHead to_pinned(const DenseMatrix& head_weight, const Vector& head_bias);

// p(C = 0) = 1 / (1 + sum_j exp(w_j . h + b_j)), p(C = j) = exp(w_j . h + b_j) / (same)
Vector pinned_probabilities(const PinnedHead& head, const Vector& features);

}  // namespace ilb
