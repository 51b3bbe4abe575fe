#include "ilb/bandit/episode.hpp"

#include <atomic>
#include <thread>

#include "ilb/csv.hpp"
#include "ilb/errors.hpp"

namespace ilb {

BanditTrace run_episode(const WorldSpec& world, const PatientInstance& patient, Agent& agent, int horizon,
                        EpisodeStreams& streams) {
  if (horizon < 1) throw ConfigError("bandit.horizon must be >= 1");
  const ArmGaps gaps = arm_gaps(world, patient.mean);
  BanditTrace trace;
  trace.algorithm = std::string(agent.name());
  trace.steps.reserve(static_cast<std::size_t>(horizon));
  double cumulative = 0.0;
  for (int t = 0; t < horizon; ++t) {
    if (agent.uses_context()) agent.observe(emit_observation(world, patient, streams.observations).visible);
    const ArmId a = agent.act(streams.agent);
    if (a < 0 || a >= world.arm_count())
      throw ContractError("agent '" + trace.algorithm + "' chose unknown arm " + std::to_string(a));
    const double r = emit_reward(world, patient, a, streams.rewards);
    agent.receive(a, r);
    // Instantaneous regret from ground truth, clamped at zero against rounding.
    const double regret = std::max(0.0, gaps.best_value - world.expected_reward(patient.mean, a));
    cumulative += regret;
    trace.steps.push_back({a, r, regret, cumulative, a == gaps.best_arm});
  }
  return trace;
}

PatientInstance instance_patient(const WorldSpec& world, std::uint64_t seed, int instance) {
  Rng rng = make_rng(seed, "instance.patient", static_cast<std::uint64_t>(instance));
  return sample_patient(world, rng, instance);
}

std::vector<BanditTrace> simulate(const WorldSpec& world, const AgentContext& context, const SimulationConfig& config) {
  if (config.instances < 1) throw ConfigError("bandit.instances must be >= 1");
  if (config.algorithms.empty()) throw ConfigError("bandit.algorithms is empty");
  // Fail fast on unknown algorithms or missing artifacts before spawning workers.
  for (const auto& name : config.algorithms) make_agent(name, context);

  const std::size_t per_instance = config.algorithms.size();
  std::vector<BanditTrace> traces(static_cast<std::size_t>(config.instances) * per_instance);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= config.instances) return;
      try {
        const PatientInstance patient = instance_patient(world, config.seed, i);
        for (std::size_t k = 0; k < per_instance; ++k) {
          const auto& name = config.algorithms[k];
          auto agent = make_agent(name, context);
          const auto id = static_cast<std::uint64_t>(i);
          EpisodeStreams streams{make_rng(config.seed, "instance.observations", id),
                                 make_rng(config.seed, "instance.rewards", id),
                                 make_rng(config.seed, "instance.agent." + name, id)};
          auto trace = run_episode(world, patient, *agent, config.horizon, streams);
          trace.instance = i;
          traces[static_cast<std::size_t>(i) * per_instance + k] = std::move(trace);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(config.instances);
        return;
      }
    }
  };

  const int threads = std::max(1, std::min(config.threads, config.instances));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return traces;
}

void write_traces(const std::filesystem::path& path, const std::vector<BanditTrace>& traces) {
  csv::Writer w(path, {"instance", "t", "algorithm", "action", "reward", "inst_regret", "cum_regret", "optimal_flag"});
  for (const auto& tr : traces) {
    for (std::size_t t = 0; t < tr.steps.size(); ++t) {
      const auto& s = tr.steps[t];
      w.cell(tr.instance).cell(static_cast<int>(t + 1)).cell(tr.algorithm).cell(s.action).cell(s.reward);
      w.cell(s.instant_regret).cell(s.cumulative_regret).cell(s.optimal ? 1 : 0);
      w.end_row();
    }
  }
  w.close();
}

}  // namespace ilb
