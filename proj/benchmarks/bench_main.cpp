#include <benchmark/benchmark.h>

#include "ilb/bandit/agents.hpp"
#include "ilb/bandit/episode.hpp"
#include "ilb/eval/hungarian.hpp"
#include "ilb/eval/metrics.hpp"
#include "ilb/lvm/trainer.hpp"
#include "ilb/net/leaky_relu_net.hpp"
#include "ilb/net/maxout_net.hpp"
#include "ilb/world/dataset.hpp"
#include "ilb/world/world.hpp"

using namespace ilb;

namespace {

WorldSpec bench_world(int depth) {
  WorldConfig c;
  c.depth = depth;
  c.seed = 1;
  return sample_world(c);
}

void BM_LeakyForward(benchmark::State& state) {
  Rng rng(1);
  const auto net = LeakyReluNet::random(5, static_cast<int>(state.range(0)), 0.2, rng);
  const Vector z = random_normal(5, 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(z));
}
BENCHMARK(BM_LeakyForward)->Arg(2)->Arg(4);

void BM_LeakyInverse(benchmark::State& state) {
  Rng rng(1);
  const auto net = LeakyReluNet::random(5, static_cast<int>(state.range(0)), 0.2, rng);
  const Vector x = net.forward(random_normal(5, 1.0, rng));
  for (auto _ : state) benchmark::DoNotOptimize(net.inverse(x));
}
BENCHMARK(BM_LeakyInverse)->Arg(2)->Arg(4);

void BM_MaxoutForwardBackward(benchmark::State& state) {
  Rng rng(2);
  const auto net = MaxoutNet::random(5, 5, static_cast<int>(state.range(0)), 2, 5, rng);
  const Vector x = random_normal(5, 1.0, rng);
  const Vector g = random_normal(5, 1.0, rng);
  MaxoutNet::Cache cache;
  for (auto _ : state) {
    net.forward(x, cache);
    benchmark::DoNotOptimize(net.backward(cache, g));
  }
}
BENCHMARK(BM_MaxoutForwardBackward)->Arg(1)->Arg(3);

// One epoch over Q=100, T_o=200.
void BM_TrainingEpoch(benchmark::State& state) {
  const auto world = bench_world(2);
  const auto data = build_observational_dataset(world, 100, 200, 3).observed;
  TrainingOptions o;
  o.epochs = 1;
  o.early_stop = false;
  for (auto _ : state) benchmark::DoNotOptimize(train_contrastive(data, o, 4));
}
BENCHMARK(BM_TrainingEpoch)->Unit(benchmark::kMillisecond);

void BM_Hungarian(benchmark::State& state) {
  Rng rng(3);
  const auto n = state.range(0);
  const DenseMatrix w = random_normal(n, n, 1.0, rng).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(max_weight_assignment(w));
}
BENCHMARK(BM_Hungarian)->Arg(5)->Arg(20)->Arg(100);

void BM_Episode(benchmark::State& state) {
  const auto world = bench_world(2);
  const AgentContext ctx{&world};
  const std::string algo = state.range(0) == 0 ? "oracle-greedy1" : state.range(0) == 1 ? "oracle-greedy2" : "thompson";
  state.SetLabel(algo);
  int i = 0;
  for (auto _ : state) {
    auto agent = make_agent(algo, ctx);
    EpisodeStreams st{Rng(1), Rng(2), Rng(3)};
    benchmark::DoNotOptimize(run_episode(world, instance_patient(world, 5, i++), *agent, 500, st));
  }
}
BENCHMARK(BM_Episode)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
