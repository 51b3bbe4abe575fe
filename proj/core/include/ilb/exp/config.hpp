#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ilb/lvm/trainer.hpp"
#include "ilb/world/world.hpp"

namespace ilb {

struct DatasetConfig {
  int patients = 100;  // Q
  int steps = 200;     // T_o
  bool operator==(const DatasetConfig&) const = default;
};

struct EvalConfig {
  int test_patients = 50;
  int test_steps = 0;  // 0: same as dataset.steps
  bool operator==(const EvalConfig&) const = default;
};

struct BanditConfig {
  int horizon = 500;
  int instances = 500;
  std::vector<std::string> algorithms{"greedy1", "greedy2", "oracle-greedy1", "oracle-greedy2", "thompson"};
  double lambda_g = 1.0;
  double thompson_prior_variance = 1.0;
  std::vector<int> arm_counts;  // empty: the world's own arm set only
  bool operator==(const BanditConfig&) const = default;
};

// One reproducible run. Serialized as a flat INI file with sections
// [world] [dataset] [training] [eval] [bandit] [output].
struct ExperimentConfig {
  WorldConfig world;
  DatasetConfig dataset;
  TrainingOptions training;
  bool auto_hidden_layers = true;  // extractor depth follows the mixing depth
  double ridge = 1e-6;
  EvalConfig eval;
  BanditConfig bandit;
  std::string output_dir;

  bool operator==(const ExperimentConfig&) const = default;

  // Throws ConfigError for values outside module preconditions.
  void validate() const;
  int effective_test_steps() const { return eval.test_steps > 0 ? eval.test_steps : dataset.steps; }
};

ExperimentConfig default_config();

// Throws ConfigError on unknown sections or keys and on malformed values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);  // IoError when unreadable

std::string serialize_config(const ExperimentConfig& config);

// SHA-256 hex of the serialized config.
std::string config_hash(const ExperimentConfig& config);

}  // namespace ilb
