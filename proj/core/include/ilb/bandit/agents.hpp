#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ilb/lvm/arms.hpp"
#include "ilb/lvm/model.hpp"
#include "ilb/world/world.hpp"

namespace ilb {

// Running mean of extracted latents.
struct Greedy1State {
  Vector sum;
  int count = 0;

  explicit Greedy1State(Eigen::Index dim) : sum(Vector::Zero(dim)) {}
  Vector estimate() const;  // sum / count; zero before the first observation
};

void greedy1_update(Greedy1State& state, const Vector& latent);

struct RewardEvent {
  ArmId arm = 0;
  double reward = 0.0;
};

// Mean estimate plus the reward history, refit by penalized least squares:
// z = argmin sum_t (r_t - theta_{a_t}' z)^2 + lambda ||z - mean||^2.
struct Greedy2State {
  Greedy1State mean;
  std::vector<RewardEvent> history;
  double lambda = 1.0;
  Vector estimate;
  DenseMatrix gram;   // sum theta theta'
  Vector moment;      // sum r theta

  Greedy2State(Eigen::Index dim, double lambda);
};

// Folds in a new latent and, optionally, the reward of the previous action, then refits.
// Throws ConfigError if lambda <= 0, ContractError on unknown arms.
void greedy2_update(Greedy2State& state, const Vector& latent, std::optional<RewardEvent> reward,
                    const ArmEstimates& arms);

// The penalized least-squares objective minimized by greedy2_update.
double greedy2_objective(const Greedy2State& state, const ArmEstimates& arms, const Vector& z);

// argmax_a theta_a' z over usable arms; ties go to the lowest id.
ArmId greedy_act(const Vector& latent_estimate, const ArmEstimates& arms);

// Independent Gaussian posteriors per arm under a known reward variance.
struct ThompsonState {
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<int> pulls;
  double noise_variance = 0.0;

  ThompsonState(int arms, double prior_mean, double prior_variance, double noise_variance);
};

ArmId thompson_act(const ThompsonState& state, Rng& rng);
void thompson_update(ThompsonState& state, ArmId arm, double reward);

// Uniform interface used by the episode loop.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string_view name() const = 0;
  virtual bool uses_context() const = 0;
  virtual void observe(const Observation& obs) = 0;
  virtual ArmId act(Rng& rng) = 0;
  virtual void receive(ArmId arm, double reward) = 0;
};

using LatentEncoder = FeatureMap;

class Greedy1Agent final : public Agent {
 public:
  Greedy1Agent(std::string name, LatentEncoder encoder, ArmEstimates arms, Eigen::Index dim);
  std::string_view name() const override { return name_; }
  bool uses_context() const override { return true; }
  void observe(const Observation& obs) override;
  ArmId act(Rng& rng) override;
  void receive(ArmId, double) override {}
  const Greedy1State& state() const { return state_; }

 private:
  std::string name_;
  LatentEncoder encoder_;
  ArmEstimates arms_;
  Greedy1State state_;
};

class Greedy2Agent final : public Agent {
 public:
  Greedy2Agent(std::string name, LatentEncoder encoder, ArmEstimates arms, Eigen::Index dim, double lambda);
  std::string_view name() const override { return name_; }
  bool uses_context() const override { return true; }
  void observe(const Observation& obs) override;
  ArmId act(Rng& rng) override;
  void receive(ArmId arm, double reward) override;
  const Greedy2State& state() const { return state_; }

 private:
  std::string name_;
  LatentEncoder encoder_;
  ArmEstimates arms_;
  Greedy2State state_;
  std::optional<RewardEvent> pending_;
};

class ThompsonAgent final : public Agent {
 public:
  ThompsonAgent(int arms, double prior_variance, double noise_variance);
  std::string_view name() const override { return "thompson"; }
  bool uses_context() const override { return false; }
  void observe(const Observation&) override {}
  ArmId act(Rng& rng) override { return thompson_act(state_, rng); }
  void receive(ArmId arm, double reward) override { thompson_update(state_, arm, reward); }
  const ThompsonState& state() const { return state_; }

 private:
  ThompsonState state_;
};

// Everything an agent factory may need. Learned agents require model and arms.
struct AgentContext {
  const WorldSpec* world = nullptr;
  const LvmModel* model = nullptr;
  const ArmEstimates* learned_arms = nullptr;
  double lambda_g = 1.0;
  double thompson_prior_variance = 1.0;
};

inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names{"greedy1", "greedy2", "oracle-greedy1", "oracle-greedy2", "thompson"};
  return names;
}

// Throws ConfigError for unknown names or a learned agent without model artifacts.
std::unique_ptr<Agent> make_agent(const std::string& algorithm, const AgentContext& context);

}  // namespace ilb
