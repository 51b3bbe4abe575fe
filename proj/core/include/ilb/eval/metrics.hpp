#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ilb/bandit/episode.hpp"
#include "ilb/net/linalg.hpp"

namespace ilb {

struct MccReport {
  DenseMatrix abs_correlation;      // |corr(estimated_i, true_j)|
  std::vector<int> assignment;      // estimated coordinate -> true coordinate
  double mcc_perm = 0.0;            // mean |corr| over the optimal assignment
  double mcc_affine = 0.0;          // mean sqrt(R^2) of least-squares affine fits estimated -> true_j
  std::vector<double> affine_r2;    // per true coordinate
  std::vector<bool> zero_variance;  // per estimated coordinate; such pairs count as correlation 0
};

// Rows are samples. Throws ConfigError on shape mismatch or fewer than 2 samples.
MccReport mcc(const DenseMatrix& true_latents, const DenseMatrix& estimated_latents);

// Pearson correlation; 0 when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

// 1 - SS_res / SS_tot. Throws ConfigError for < 2 samples, size mismatch or constant truth.
double r2(std::span<const double> truth, std::span<const double> predicted);

struct RegretCurve {
  std::string algorithm;
  int instances = 0;
  std::vector<double> simple_mean, simple_se;
  std::vector<double> cumulative_mean, cumulative_se;
  std::vector<double> optimal_rate;  // share of instances playing the optimal arm at t
};

struct RegretSummary {
  int horizon = 0;
  std::vector<RegretCurve> curves;  // first-seen algorithm order

  // Throws ConfigError when absent.
  const RegretCurve& curve(const std::string& algorithm) const;
};

// Pointwise mean and standard error across instances, per algorithm.
// Throws ConfigError on an empty set or mismatched horizons.
RegretSummary aggregate_regret(const std::vector<BanditTrace>& traces);

// regret_summary.csv: t, algorithm, simple_mean, simple_se, cum_mean, cum_se
void write_regret_summary(const std::filesystem::path& path, const RegretSummary& summary);
RegretSummary read_regret_summary(const std::filesystem::path& path);

struct BoundParams {
  double min_gap = 0.0;  // Delta
  double max_gap = 0.0;  // Delta-bar
  int arms = 2;          // K
  double sigma = 0.0;    // latent noise stddev
};

struct BoundValue {
  double value = 0.0;
  bool noiseless = false;  // sigma == 0: no wrong pulls, value 0
};

// 2 K max_gap / (exp(min_gap^2 / (4 sigma^2)) - 1). Throws ConfigError unless
// 0 < min_gap <= max_gap, arms >= 2 and sigma >= 0.
BoundValue greedy1_regret_bound(const BoundParams& params);

}  // namespace ilb
