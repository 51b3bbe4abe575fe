#pragma once

#include <cstdint>
#include <vector>

#include "ilb/net/leaky_relu_net.hpp"

namespace ilb {

using ArmId = int;

struct WorldConfig {
  int dim = 5;              // latent and observation dimension d
  int depth = 2;            // mixing layers L
  double alpha = 0.2;       // leaky-ReLU slope of the mixing net
  double sigma = 0.3;       // latent noise stddev
  double reward_noise = 0.1;
  int arms = 10;            // K
  std::uint64_t seed = 0;

  bool operator==(const WorldConfig&) const = default;
};

// Ground truth of one simulated population.
struct WorldSpec {
  LeakyReluNet mixing;        // g
  double sigma = 0.3;
  std::vector<Vector> arms;   // unit-norm theta_a
  double reward_noise = 0.1;
  std::uint64_t seed = 0;

  Eigen::Index dim() const { return mixing.dim(); }
  int arm_count() const { return static_cast<int>(arms.size()); }
  double expected_reward(const Vector& latent_mean, ArmId arm) const;
  // Throws ConfigError when the arm set or mixing dimension is inconsistent.
  void validate() const;
};

struct PatientInstance {
  int id = 0;
  Vector mean;  // Z_q
};

// What an agent may see.
struct Observation {
  Vector x;
};

// Evaluation-only side channel.
struct HiddenLatent {
  Vector z;  // Z_{q,t}
};

struct NoisyObservation {
  Observation visible;
  HiddenLatent hidden;
};

struct ArmGaps {
  ArmId best_arm = 0;
  double best_value = 0.0;
  double min_gap = 0.0;  // best minus second best
  double max_gap = 0.0;  // best minus worst
};

// Throws ConfigError unless d >= 1, K >= 2, sigma > 0, depth >= 0.
WorldSpec sample_world(const WorldConfig& config);

// Replaces the arm set with `arm_count` fresh unit vectors drawn from the
// ("arms", arm_count) substream of the world's seed. Mixing and noise are kept.
WorldSpec with_resampled_arms(const WorldSpec& world, int arm_count);

PatientInstance sample_patient(const WorldSpec& world, Rng& rng, int id = 0);
NoisyObservation emit_observation(const WorldSpec& world, const PatientInstance& patient, Rng& rng);
double emit_reward(const WorldSpec& world, const PatientInstance& patient, ArmId arm, Rng& rng);

ArmGaps arm_gaps(const WorldSpec& world, const Vector& latent_mean);

}  // namespace ilb
