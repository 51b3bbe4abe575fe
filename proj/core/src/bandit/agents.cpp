#include "ilb/bandit/agents.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <random>

#include "ilb/errors.hpp"

namespace ilb {

Vector Greedy1State::estimate() const { return count > 0 ? Vector(sum / count) : Vector::Zero(sum.size()); }

void greedy1_update(Greedy1State& state, const Vector& latent) {
  require_dim(latent, state.sum.size(), "greedy1_update");
  state.sum += latent;
  ++state.count;
}

Greedy2State::Greedy2State(Eigen::Index dim, double lambda_)
    : mean(dim), lambda(lambda_), estimate(Vector::Zero(dim)), gram(DenseMatrix::Zero(dim, dim)),
      moment(Vector::Zero(dim)) {
  if (!(lambda > 0.0)) throw ConfigError("greedy2: lambda_g must be > 0");
}

namespace {

const Vector& arm_theta(const ArmEstimates& arms, ArmId arm) {
  if (arm < 0 || arm >= arms.arm_count()) throw ContractError("unknown arm " + std::to_string(arm));
  return arms.theta[static_cast<std::size_t>(arm)];
}

}  // namespace

void greedy2_update(Greedy2State& state, const Vector& latent, std::optional<RewardEvent> reward,
                    const ArmEstimates& arms) {
  if (!(state.lambda > 0.0)) throw ConfigError("greedy2: lambda_g must be > 0");
  greedy1_update(state.mean, latent);
  if (reward) {
    const Vector& theta = arm_theta(arms, reward->arm);
    state.history.push_back(*reward);
    state.gram.noalias() += theta * theta.transpose();
    state.moment += reward->reward * theta;
  }
  const auto d = state.gram.rows();
  // (sum theta theta' + lambda I) z = sum r theta + lambda * mean; positive definite for lambda > 0.
  const DenseMatrix lhs = state.gram + state.lambda * DenseMatrix::Identity(d, d);
  const Vector rhs = state.moment + state.lambda * state.mean.estimate();
  state.estimate = lhs.llt().solve(rhs);
}

double greedy2_objective(const Greedy2State& state, const ArmEstimates& arms, const Vector& z) {
  double loss = 0.0;
  for (const auto& e : state.history) {
    const double resid = e.reward - arm_theta(arms, e.arm).dot(z);
    loss += resid * resid;
  }
  return loss + state.lambda * (z - state.mean.estimate()).squaredNorm();
}

ArmId greedy_act(const Vector& latent_estimate, const ArmEstimates& arms) {
  ArmId best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (ArmId a = 0; a < arms.arm_count(); ++a) {
    if (!arms.usable[static_cast<std::size_t>(a)]) continue;
    const double s = arms.theta[static_cast<std::size_t>(a)].dot(latent_estimate);
    if (best < 0 || s > best_score) {
      best = a;
      best_score = s;
    }
  }
  if (best < 0) throw ContractError("greedy_act: no usable arm");
  return best;
}

ThompsonState::ThompsonState(int arms, double prior_mean, double prior_variance, double noise_variance_)
    : mean(static_cast<std::size_t>(arms), prior_mean),
      variance(static_cast<std::size_t>(arms), prior_variance),
      pulls(static_cast<std::size_t>(arms), 0),
      noise_variance(noise_variance_) {
  if (arms < 1) throw ConfigError("thompson: need at least one arm");
  if (!(prior_variance > 0.0)) throw ConfigError("thompson: prior variance must be > 0");
  if (!(noise_variance >= 0.0)) throw ConfigError("thompson: reward variance must be >= 0");
}

ArmId thompson_act(const ThompsonState& state, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ArmId best = 0;
  double best_draw = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < state.mean.size(); ++a) {
    const double draw = state.mean[a] + std::sqrt(state.variance[a]) * normal(rng);
    if (draw > best_draw) {
      best_draw = draw;
      best = static_cast<ArmId>(a);
    }
  }
  return best;
}

void thompson_update(ThompsonState& state, ArmId arm, double reward) {
  if (arm < 0 || static_cast<std::size_t>(arm) >= state.mean.size())
    throw ContractError("thompson_update: unknown arm " + std::to_string(arm));
  const auto a = static_cast<std::size_t>(arm);
  ++state.pulls[a];
  if (state.noise_variance == 0.0) {
    state.mean[a] = reward;
    state.variance[a] = 0.0;
    return;
  }
  if (state.variance[a] == 0.0) return;  // already exact
  const double precision = 1.0 / state.variance[a] + 1.0 / state.noise_variance;
  state.mean[a] = (state.mean[a] / state.variance[a] + reward / state.noise_variance) / precision;
  state.variance[a] = 1.0 / precision;
}

Greedy1Agent::Greedy1Agent(std::string name, LatentEncoder encoder, ArmEstimates arms, Eigen::Index dim)
    : name_(std::move(name)), encoder_(std::move(encoder)), arms_(std::move(arms)), state_(dim) {}

void Greedy1Agent::observe(const Observation& obs) { greedy1_update(state_, encoder_(obs.x)); }

ArmId Greedy1Agent::act(Rng&) {
  if (state_.count == 0) throw ContractError("greedy1: act called before any observation");
  return greedy_act(state_.estimate(), arms_);
}

Greedy2Agent::Greedy2Agent(std::string name, LatentEncoder encoder, ArmEstimates arms, Eigen::Index dim,
                           double lambda)
    : name_(std::move(name)), encoder_(std::move(encoder)), arms_(std::move(arms)), state_(dim, lambda) {}

void Greedy2Agent::observe(const Observation& obs) {
  greedy2_update(state_, encoder_(obs.x), pending_, arms_);
  pending_.reset();
}

ArmId Greedy2Agent::act(Rng&) {
  if (state_.mean.count == 0) throw ContractError("greedy2: act called before any observation");
  return greedy_act(state_.estimate, arms_);
}

void Greedy2Agent::receive(ArmId arm, double reward) { pending_ = RewardEvent{arm, reward}; }

ThompsonAgent::ThompsonAgent(int arms, double prior_variance, double noise_variance)
    : state_(arms, 0.0, prior_variance, noise_variance) {}

std::unique_ptr<Agent> make_agent(const std::string& algorithm, const AgentContext& ctx) {
  if (ctx.world == nullptr) throw ConfigError("make_agent: world required");
  const WorldSpec& world = *ctx.world;
  const auto d = world.dim();

  if (algorithm == "thompson")
    return std::make_unique<ThompsonAgent>(world.arm_count(), ctx.thompson_prior_variance,
                                           world.reward_noise * world.reward_noise);

  if (algorithm == "oracle-greedy1" || algorithm == "oracle-greedy2") {
    LatentEncoder enc = [&world](const Vector& x) { return world.mixing.inverse(x); };
    if (algorithm == "oracle-greedy1")
      return std::make_unique<Greedy1Agent>(algorithm, std::move(enc), exact_arms(world.arms), d);
    return std::make_unique<Greedy2Agent>(algorithm, std::move(enc), exact_arms(world.arms), d, ctx.lambda_g);
  }

  if (algorithm == "greedy1" || algorithm == "greedy2") {
    if (ctx.model == nullptr || ctx.learned_arms == nullptr)
      throw ConfigError("algorithm '" + algorithm + "' needs a trained model and arm estimates");
    if (ctx.model->data_dim() != d) throw ConfigError("model dimension does not match the world");
    if (ctx.learned_arms->arm_count() != world.arm_count())
      throw ConfigError("arm estimates do not match the world's arm count");
    const LvmModel* model = ctx.model;
    LatentEncoder enc = [model](const Vector& x) { return extract_latent(*model, x); };
    if (algorithm == "greedy1")
      return std::make_unique<Greedy1Agent>(algorithm, std::move(enc), *ctx.learned_arms, model->latent_dim());
    return std::make_unique<Greedy2Agent>(algorithm, std::move(enc), *ctx.learned_arms, model->latent_dim(),
                                          ctx.lambda_g);
  }
  throw ConfigError("unknown algorithm '" + algorithm + "'");
}

}  // namespace ilb
