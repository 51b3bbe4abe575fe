#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ilb/exp/config.hpp"

namespace ilb {

struct CommandContext {
  ExperimentConfig config;
  std::filesystem::path out;  // empty: config.output_dir
  bool force = false;
  int threads = 1;
};

// Every command writes its artifacts plus config.ini and manifest.json into the output
// directory and returns the artifact names (relative paths). A non-empty output directory
// is refused with ConfigError unless `force` is set, in which case files are overwritten.

// world.json, patients.csv, observations.csv, latents.csv
std::vector<std::string> cmd_gen(const CommandContext& ctx);

// lvm.json, arms.json, train_log.csv
std::vector<std::string> cmd_train(const CommandContext& ctx, const std::filesystem::path& data_dir);

// metrics.json
std::vector<std::string> cmd_eval_lvm(const CommandContext& ctx, const std::filesystem::path& data_dir,
                                      const std::filesystem::path& model_dir);

// traces.csv and regret_summary.csv, or traces_K{K}.csv and regret_summary_K{K}.csv per swept
// arm count, plus bandit.json with end-of-horizon statistics. The world comes from
// data_dir/world.json when given, else from the config. Learned agents need model_dir.
std::vector<std::string> cmd_bandit(const CommandContext& ctx, const std::optional<std::filesystem::path>& data_dir,
                                    const std::optional<std::filesystem::path>& model_dir);

// lvm_table.csv / lvm_table.txt from every metrics.json, regret_final.csv and one SVG per
// regret_summary*.csv. Throws ConfigError when the summaries disagree on the horizon.
std::vector<std::string> cmd_report(const CommandContext& ctx, const std::vector<std::filesystem::path>& runs);

}  // namespace ilb
