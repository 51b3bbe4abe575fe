#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ilb/bandit/agents.hpp"

namespace ilb {

struct TraceStep {
  ArmId action = 0;
  double reward = 0.0;
  double instant_regret = 0.0;     // theta_{a*}'Z_q - theta_{a_t}'Z_q
  double cumulative_regret = 0.0;
  bool optimal = false;
};

struct BanditTrace {
  std::string algorithm;
  int instance = 0;
  std::vector<TraceStep> steps;
};

// Independent random streams of one episode.
struct EpisodeStreams {
  Rng observations;
  Rng rewards;
  Rng agent;
};

// Per step: context agents observe x_t, the agent acts, the environment draws the reward,
// the agent receives it. Regret is measured against the true optimal arm.
BanditTrace run_episode(const WorldSpec& world, const PatientInstance& patient, Agent& agent, int horizon,
                        EpisodeStreams& streams);

struct SimulationConfig {
  int instances = 500;
  int horizon = 500;
  std::vector<std::string> algorithms{"greedy1", "greedy2", "oracle-greedy1", "oracle-greedy2", "thompson"};
  std::uint64_t seed = 0;
  int threads = 1;
};

// Patients and streams for instance i come from ("instance.*", i) substreams of `seed`, so
// every algorithm faces the same patients and context streams, and results do not depend on
// `threads`. Output order: instance-major, algorithms in the configured order.
std::vector<BanditTrace> simulate(const WorldSpec& world, const AgentContext& context, const SimulationConfig& config);

PatientInstance instance_patient(const WorldSpec& world, std::uint64_t seed, int instance);

// traces.csv: instance, t, algorithm, action, reward, inst_regret, cum_regret, optimal_flag
void write_traces(const std::filesystem::path& path, const std::vector<BanditTrace>& traces);

}  // namespace ilb
