#include "ilb/world/world.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ilb/errors.hpp"

namespace ilb {

namespace {

std::vector<Vector> sample_unit_arms(Eigen::Index dim, int count, Rng& rng) {
  std::vector<Vector> arms;
  arms.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(arms.size()) < count) {
    Vector theta = random_normal(dim, 1.0, rng);
    const double norm = theta.norm();
    if (norm < 1e-12) continue;
    arms.push_back(theta / norm);
  }
  return arms;
}

}  // namespace

double WorldSpec::expected_reward(const Vector& latent_mean, ArmId arm) const {
  if (arm < 0 || arm >= arm_count()) throw ContractError("unknown arm " + std::to_string(arm));
  return arms[static_cast<std::size_t>(arm)].dot(latent_mean);
}

void WorldSpec::validate() const {
  if (arms.size() < 2) throw ConfigError("world needs at least 2 arms");
  if (!(sigma >= 0.0) || !(reward_noise >= 0.0)) throw ConfigError("world noise levels must be >= 0");
  for (std::size_t a = 0; a < arms.size(); ++a) {
    if (arms[a].size() != dim()) throw ConfigError("arm " + std::to_string(a) + " has the wrong dimension");
    if (std::abs(arms[a].norm() - 1.0) > 1e-9) throw ConfigError("arm " + std::to_string(a) + " is not unit norm");
  }
}

WorldSpec sample_world(const WorldConfig& config) {
  if (config.dim < 1) throw ConfigError("world.d must be >= 1");
  if (config.arms < 2) throw ConfigError("world.arms must be >= 2");
  if (!(config.sigma > 0.0)) throw ConfigError("world.sigma must be > 0");
  if (config.depth < 0) throw ConfigError("world.layers must be >= 0");
  if (!(config.reward_noise >= 0.0)) throw ConfigError("world.reward_noise must be >= 0");

  Rng mixing_rng = make_rng(config.seed, "world.mixing");
  Rng arm_rng = make_rng(config.seed, "arms", static_cast<std::uint64_t>(config.arms));
  WorldSpec world{LeakyReluNet::random(config.dim, config.depth, config.alpha, mixing_rng), config.sigma,
                  sample_unit_arms(config.dim, config.arms, arm_rng), config.reward_noise, config.seed};
  return world;
}

WorldSpec with_resampled_arms(const WorldSpec& world, int arm_count) {
  if (arm_count < 2) throw ConfigError("arm count must be >= 2");
  Rng arm_rng = make_rng(world.seed, "arms", static_cast<std::uint64_t>(arm_count));
  WorldSpec out = world;
  out.arms = sample_unit_arms(world.dim(), arm_count, arm_rng);
  return out;
}

PatientInstance sample_patient(const WorldSpec& world, Rng& rng, int id) {
  return {id, random_normal(world.dim(), 1.0, rng)};
}

NoisyObservation emit_observation(const WorldSpec& world, const PatientInstance& patient, Rng& rng) {
  Vector z = patient.mean + random_normal(world.dim(), world.sigma, rng);
  Vector x = world.mixing.forward(z);
  return {{std::move(x)}, {std::move(z)}};
}

double emit_reward(const WorldSpec& world, const PatientInstance& patient, ArmId arm, Rng& rng) {
  const double mean = world.expected_reward(patient.mean, arm);
  if (world.reward_noise == 0.0) return mean;
  std::normal_distribution<double> noise(0.0, world.reward_noise);
  return mean + noise(rng);
}

ArmGaps arm_gaps(const WorldSpec& world, const Vector& latent_mean) {
  ArmGaps g;
  double second = -std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  g.best_value = -std::numeric_limits<double>::infinity();
  for (ArmId a = 0; a < world.arm_count(); ++a) {
    const double v = world.expected_reward(latent_mean, a);
    if (v > g.best_value) {
      second = g.best_value;
      g.best_value = v;
      g.best_arm = a;
    } else if (v > second) {
      second = v;
    }
    worst = std::min(worst, v);
  }
  g.min_gap = g.best_value - second;
  g.max_gap = g.best_value - worst;
  return g;
}

}  // namespace ilb
