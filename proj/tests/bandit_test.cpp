#include <gtest/gtest.h>

#include <cmath>

#include "ilb/bandit/agents.hpp"
#include "ilb/bandit/episode.hpp"
#include "ilb/csv.hpp"
#include "ilb/errors.hpp"
#include "ilb/lvm/arms.hpp"
#include "support.hpp"

using namespace ilb;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

WorldSpec bandit_world(double sigma, int arms = 10, int depth = 2, int d = 5, double reward_noise = 0.1) {
  WorldConfig c;
  c.dim = d;
  c.depth = depth;
  c.sigma = sigma;
  c.arms = arms;
  c.reward_noise = reward_noise;
  c.seed = 23;
  return sample_world(c);
}

ArmEstimates random_arms(int count, Eigen::Index d, Rng& rng) {
  std::vector<Vector> t;
  for (int a = 0; a < count; ++a) t.push_back(random_normal(d, 1.0, rng));
  return exact_arms(t);
}

class FixedAgent final : public Agent {
 public:
  explicit FixedAgent(ArmId arm) : arm_(arm) {}
  std::string_view name() const override { return "fixed"; }
  bool uses_context() const override { return false; }
  void observe(const Observation&) override {}
  ArmId act(Rng&) override { return arm_; }
  void receive(ArmId, double) override {}

 private:
  ArmId arm_;
};

}  // namespace

TEST(Greedy1, FirstObservationIsTheEstimate) {
  Greedy1State s(3);
  const Vector v = Vector::LinSpaced(3, -1.0, 1.0);
  greedy1_update(s, v);
  EXPECT_EQ(s.estimate(), v);
  for (int t = 0; t < 10; ++t) greedy1_update(s, v);
  EXPECT_LT((s.estimate() - v).norm(), 1e-15);
}

TEST(Greedy1, IncrementalEqualsBatchMean) {
  Rng rng(1);
  Greedy1State s(4);
  Vector sum = Vector::Zero(4);
  for (int t = 1; t <= 500; ++t) {
    const Vector h = random_normal(4, 2.0, rng);
    greedy1_update(s, h);
    sum += h;
    ASSERT_LT((s.estimate() - sum / t).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Greedy1, ErrorDecaysAtRootT) {
  Rng rng(2);
  const int T = 1000, reps = 300;
  std::vector<double> err(T, 0.0);
  for (int r = 0; r < reps; ++r) {
    Greedy1State s(3);
    for (int t = 0; t < T; ++t) {
      greedy1_update(s, random_normal(3, 1.0, rng));
      err[static_cast<std::size_t>(t)] += s.estimate().norm() / reps;
    }
  }
  // Least-squares slope of log error against log t.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int t = 1; t <= T; ++t) {
    const double x = std::log(t), y = std::log(err[static_cast<std::size_t>(t - 1)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (T * sxy - sx * sy) / (T * sxx - sx * sx);
  EXPECT_NEAR(slope, -0.5, 0.15);
}

TEST(Greedy2, EmptyHistoryGivesMean) {
  Rng rng(3);
  const auto arms = random_arms(4, 3, rng);
  Greedy2State s(3, 1.0);
  const Vector h = random_normal(3, 1.0, rng);
  greedy2_update(s, h, std::nullopt, arms);
  EXPECT_EQ(s.estimate, h);
}

TEST(Greedy2, HugeLambdaPinsToMean) {
  Rng rng(4);
  const auto arms = random_arms(4, 3, rng);
  Greedy2State s(3, 1e12);
  for (int t = 0; t < 6; ++t) greedy2_update(s, random_normal(3, 1.0, rng), RewardEvent{t % 4, 5.0}, arms);
  EXPECT_LT((s.estimate - s.mean.estimate()).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Greedy2, ClosedFormMatchesBruteForce) {
  Rng rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const auto arms = random_arms(4, 3, rng);
    Greedy2State s(3, 1.0);
    greedy2_update(s, random_normal(3, 1.0, rng), std::nullopt, arms);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int t = 0; t < 5; ++t)
      greedy2_update(s, random_normal(3, 1.0, rng), RewardEvent{pick(rng), random_normal(1, 1.0, rng)(0)}, arms);
    ASSERT_EQ(s.history.size(), 5u);
    EXPECT_LT((s.estimate - test::brute_force_greedy2(s, arms)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Greedy2, ClosedFormIsLocalMinimum) {
  Rng rng(6);
  const auto arms = random_arms(5, 4, rng);
  Greedy2State s(4, 0.7);
  for (int t = 0; t < 8; ++t)
    greedy2_update(s, random_normal(4, 1.0, rng), t == 0 ? std::nullopt : std::optional<RewardEvent>({t % 5, 0.3 * t}), arms);
  const double f0 = greedy2_objective(s, arms, s.estimate);
  for (int i = 0; i < 100; ++i) {
    Vector dir = random_normal(4, 1.0, rng);
    dir.normalize();
    EXPECT_GE(greedy2_objective(s, arms, s.estimate + 1e-3 * dir), f0);
  }
}

TEST(Greedy2, RejectsNonPositiveLambda) { EXPECT_THROW(Greedy2State(3, 0.0), ConfigError); }

TEST(Greedy2, MatchesGreedy1BeforeAnyReward) {
  Rng rng(7);
  const auto arms = random_arms(6, 3, rng);
  auto enc = [](const Vector& x) { return x; };
  Greedy1Agent g1("g1", enc, arms, 3);
  Greedy2Agent g2("g2", enc, arms, 3, 1.0);
  const Observation obs{random_normal(3, 1.0, rng)};
  g1.observe(obs);
  g2.observe(obs);
  EXPECT_EQ(g1.act(rng), g2.act(rng));
}

TEST(GreedyAct, ArgmaxTiesAndScaling) {
  const auto arms = exact_arms({vec2(1, 0), vec2(0, 1)});
  EXPECT_EQ(greedy_act(vec2(0.9, 0.1), arms), 0);
  EXPECT_EQ(greedy_act(vec2(0.1, 0.9), arms), 1);
  EXPECT_EQ(greedy_act(vec2(0.0, 0.0), arms), 0);
  Rng rng(8);
  const auto many = random_arms(10, 4, rng);
  for (int i = 0; i < 50; ++i) {
    const Vector z = random_normal(4, 1.0, rng);
    const ArmId a = greedy_act(z, many);
    for (double c : {1e-3, 0.5, 7.0, 1e4}) EXPECT_EQ(greedy_act(c * z, many), a);
  }
}

TEST(GreedyAct, SkipsUnusableArms) {
  auto arms = exact_arms({vec2(1, 0), vec2(0, 1)});
  arms.usable[0] = false;
  EXPECT_EQ(greedy_act(vec2(0.9, 0.1), arms), 1);
}

TEST(Thompson, ConjugateUpdate) {
  ThompsonState s(3, 0.0, 2.0, 0.5);
  thompson_update(s, 1, 3.0);
  EXPECT_NEAR(s.mean[1], 3.0 * 2.0 / (2.0 + 0.5), 1e-15);
  EXPECT_NEAR(s.variance[1], 1.0 / (1.0 / 2.0 + 1.0 / 0.5), 1e-15);
  EXPECT_EQ(s.mean[0], 0.0);
}

TEST(Thompson, NoiselessCollapse) {
  ThompsonState s(2, 0.0, 1.0, 0.0);
  thompson_update(s, 0, 0.7);
  EXPECT_EQ(s.mean[0], 0.7);
  EXPECT_EQ(s.variance[0], 0.0);
}

TEST(Thompson, VarianceStrictlyDecreasing) {
  ThompsonState s(1, 0.0, 1.0, 0.01);
  double prev = s.variance[0];
  for (int i = 0; i < 100; ++i) {
    thompson_update(s, 0, 0.1);
    EXPECT_LT(s.variance[0], prev);
    EXPECT_GT(s.variance[0], 0.0);
    prev = s.variance[0];
  }
}

TEST(Thompson, FindsBetterArm) {
  // Two arms with gap 0.5 and reward noise 0.1.
  int optimal_at_200 = 0;
  const int seeds = 200;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    std::normal_distribution<double> noise(0.0, 0.1);
    ThompsonState s(2, 0.0, 1.0, 0.01);
    const double means[2] = {0.0, 0.5};
    ArmId a = 0;
    for (int t = 0; t < 200; ++t) {
      a = thompson_act(s, rng);
      thompson_update(s, a, means[a] + noise(rng));
    }
    optimal_at_200 += a == 1;
  }
  EXPECT_GE(optimal_at_200 / static_cast<double>(seeds), 0.95);
}

TEST(Episode, NoiselessOracleHasZeroRegret) {
  // Sampling requires sigma > 0; the noiseless case is set on the spec directly.
  auto w = bandit_world(0.3);
  w.sigma = 0.0;
  AgentContext ctx{&w};
  for (int i = 0; i < 20; ++i) {
    const auto p = instance_patient(w, 1, i);
    auto agent = make_agent("oracle-greedy1", ctx);
    EpisodeStreams st{Rng(1), Rng(2), Rng(3)};
    const auto tr = run_episode(w, p, *agent, 50, st);
    EXPECT_EQ(tr.steps.back().cumulative_regret, 0.0);
    EXPECT_TRUE(tr.steps.front().optimal);
  }
}

TEST(Episode, Bookkeeping) {
  const auto w = bandit_world(0.3);
  AgentContext ctx{&w};
  for (const std::string name : {"oracle-greedy1", "oracle-greedy2", "thompson"}) {
    auto agent = make_agent(name, ctx);
    EpisodeStreams st{Rng(4), Rng(5), Rng(6)};
    const auto tr = run_episode(w, instance_patient(w, 3, 0), *agent, 300, st);
    double sum = 0.0, prev = 0.0;
    for (const auto& s : tr.steps) {
      EXPECT_GE(s.instant_regret, 0.0);
      EXPECT_GE(s.cumulative_regret, prev);
      EXPECT_EQ(s.optimal, s.instant_regret == 0.0);
      sum += s.instant_regret;
      prev = s.cumulative_regret;
    }
    EXPECT_NEAR(tr.steps.back().cumulative_regret, sum, 1e-12);
  }
}

TEST(Episode, UnknownArmIsContractViolation) {
  const auto w = bandit_world(0.3, 3);
  FixedAgent bad(7);
  EpisodeStreams st{Rng(1), Rng(2), Rng(3)};
  EXPECT_THROW(run_episode(w, instance_patient(w, 1, 0), bad, 5, st), ContractError);
}

TEST(Episode, FactoryErrors) {
  const auto w = bandit_world(0.3, 3);
  AgentContext ctx{&w};
  EXPECT_THROW(make_agent("greedy1", ctx), ConfigError);
  EXPECT_THROW(make_agent("greedy2", ctx), ConfigError);
  EXPECT_THROW(make_agent("ucb", ctx), ConfigError);
  for (const auto& n : {"oracle-greedy1", "oracle-greedy2", "thompson"}) EXPECT_NO_THROW(make_agent(n, ctx));
}

TEST(Simulation, IndependentOfThreadCount) {
  const auto w = bandit_world(0.3, 5);
  AgentContext ctx{&w};
  SimulationConfig cfg;
  cfg.instances = 12;
  cfg.horizon = 40;
  cfg.algorithms = {"oracle-greedy1", "oracle-greedy2", "thompson"};
  cfg.seed = 77;
  cfg.threads = 1;
  const auto one = simulate(w, ctx, cfg);
  cfg.threads = 4;
  const auto four = simulate(w, ctx, cfg);
  ASSERT_EQ(one.size(), four.size());
  ASSERT_EQ(one.size(), 36u);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].algorithm, four[i].algorithm);
    EXPECT_EQ(one[i].instance, four[i].instance);
    for (std::size_t t = 0; t < one[i].steps.size(); ++t) {
      EXPECT_EQ(one[i].steps[t].action, four[i].steps[t].action);
      EXPECT_EQ(one[i].steps[t].reward, four[i].steps[t].reward);
    }
  }
}

TEST(Simulation, TraceFile) {
  test::TempDir dir("traces");
  const auto w = bandit_world(0.3, 2);
  AgentContext ctx{&w};
  SimulationConfig cfg;
  cfg.instances = 10;
  cfg.horizon = 50;
  cfg.algorithms = {"thompson"};
  write_traces(dir / "traces.csv", simulate(w, ctx, cfg));
  const auto t = csv::read(dir / "traces.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"instance", "t", "algorithm", "action", "reward", "inst_regret",
                                                "cum_regret", "optimal_flag"}));
  EXPECT_EQ(t.rows.size(), 500u);
  EXPECT_EQ(t.integer(0, t.column("t")), 1);
}
