#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "ilb/errors.hpp"
#include "ilb/exp/commands.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool force = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "INI config file (defaults apply when omitted)");
  cmd->add_option("--out", f.out, "Output directory (overrides [output] dir)");
  cmd->add_option("--seed", f.seed, "Root seed (overrides [world] seed)");
  cmd->add_flag("--force", f.force, "Overwrite a non-empty output directory");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
}

ilb::CommandContext context(const Flags& f) {
  ilb::CommandContext ctx;
  ctx.config = f.config.empty() ? ilb::default_config() : ilb::load_config(f.config);
  if (f.seed) ctx.config.world.seed = *f.seed;
  if (!f.out.empty()) ctx.config.output_dir = f.out;
  ctx.out = ctx.config.output_dir;
  ctx.force = f.force;
  ctx.threads = f.threads;
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent bandit experiments: synthetic worlds, LVM training, evaluation and bandit sweeps"};
  app.require_subcommand(1);
  Flags flags;
  std::string data, model;
  std::vector<std::string> runs;

  auto* gen = app.add_subcommand("gen", "Generate a world and an observational dataset");
  add_common(gen, flags);

  auto* train = app.add_subcommand("train", "Train the LVM and fit arm parameters on a dataset");
  add_common(train, flags);
  train->add_option("--data", data, "Dataset directory written by gen")->required();

  auto* eval = app.add_subcommand("eval-lvm", "Evaluate a trained LVM on held-out patients");
  add_common(eval, flags);
  eval->add_option("--data", data, "Dataset directory written by gen")->required();
  eval->add_option("--model", model, "Model directory written by train")->required();

  auto* bandit = app.add_subcommand("bandit", "Run bandit simulations and write regret summaries");
  add_common(bandit, flags);
  bandit->add_option("--data", data, "Dataset directory (world.json); the config's world is used when omitted");
  bandit->add_option("--model", model, "Model directory, needed by greedy1/greedy2");

  auto* report = app.add_subcommand("report", "Render tables and regret plots from run directories");
  add_common(report, flags);
  report->add_option("runs", runs, "Run directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const auto ctx = context(flags);
    std::vector<std::string> written;
    if (gen->parsed()) {
      written = ilb::cmd_gen(ctx);
    } else if (train->parsed()) {
      written = ilb::cmd_train(ctx, data);
    } else if (eval->parsed()) {
      written = ilb::cmd_eval_lvm(ctx, data, model);
    } else if (bandit->parsed()) {
      std::optional<std::filesystem::path> d, m;
      if (!data.empty()) d = data;
      if (!model.empty()) m = model;
      written = ilb::cmd_bandit(ctx, d, m);
    } else {
      std::vector<std::filesystem::path> dirs(runs.begin(), runs.end());
      written = ilb::cmd_report(ctx, dirs);
    }
    for (const auto& f : written) std::cout << (ctx.out / f).string() << '\n';
    return kOk;
  } catch (const ilb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ilb::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const ilb::TrainingError& e) {
    std::cerr << "numerical failure: " << e.what() << " (stage " << e.stage() << ", epoch " << e.epoch()
              << ", last finite loss " << e.last_finite_loss() << ")\n";
    return kNumerical;
  } catch (const ilb::SingularityError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const ilb::ContractError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  }
}
