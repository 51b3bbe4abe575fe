#include "ilb/exp/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "detail/json_io.hpp"
#include "ilb/bandit/episode.hpp"
#include "ilb/csv.hpp"
#include "ilb/errors.hpp"
#include "ilb/eval/metrics.hpp"
#include "ilb/exp/manifest.hpp"
#include "ilb/exp/pipeline.hpp"
#include "ilb/exp/plot.hpp"
#include "ilb/lvm/model_io.hpp"
#include "ilb/world/dataset_io.hpp"

namespace fs = std::filesystem;

namespace ilb {

namespace {

using detail::Json;

class Run {
 public:
  Run(const CommandContext& ctx, std::string command) : ctx_(ctx), started_(utc_timestamp()), command_(std::move(command)) {
    dir_ = ctx.out.empty() ? fs::path(ctx.config.output_dir) : ctx.out;
    if (dir_.empty()) throw ConfigError("no output directory given");
    std::error_code ec;
    if (fs::exists(dir_, ec)) {
      if (!fs::is_directory(dir_, ec)) throw ConfigError("output path is not a directory: " + dir_.string());
      if (!fs::is_empty(dir_, ec) && !ctx.force)
        throw ConfigError("output directory " + dir_.string() + " is not empty (use --force to overwrite)");
    }
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
  }

  fs::path path(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }

  std::vector<std::string> finish() {
    {
      std::ofstream out(dir_ / "config.ini", std::ios::binary);
      out << serialize_config(ctx_.config);
      if (!out) throw IoError("cannot write " + (dir_ / "config.ini").string());
    }
    RunManifest m;
    m.command = command_;
    m.config_hash = config_hash(ctx_.config);
    m.started_at = started_;
    m.finished_at = utc_timestamp();
    auto listed = files_;
    listed.push_back("config.ini");
    write_manifest(dir_, m, listed);
    return files_;
  }

 private:
  const CommandContext& ctx_;
  fs::path dir_;
  std::string started_;
  std::string command_;
  std::vector<std::string> files_;
};

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw IoError("missing input file: " + p.string());
}

ObservationalDataset load_observations(const fs::path& data_dir, const WorldSpec& world) {
  require_file(data_dir / "observations.csv");
  auto data = read_observations(data_dir);
  if (data.x.cols() != world.dim()) throw ConfigError("observations and world.json disagree on the dimension");
  data.arm_count = world.arm_count();
  return data;
}

WorldSpec load_world(const fs::path& data_dir) {
  require_file(data_dir / "world.json");
  return read_world(data_dir / "world.json");
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write " + p.string());
}

}  // namespace

std::vector<std::string> cmd_gen(const CommandContext& ctx) {
  ctx.config.validate();
  Run run(ctx, "gen");
  const WorldSpec world = make_world(ctx.config);
  const GeneratedDataset data = make_dataset(ctx.config, world);
  // write_dataset owns the file names; register them for the manifest.
  fs::path dir;
  for (const char* name : {"world.json", "patients.csv", "observations.csv", "latents.csv"}) dir = run.path(name).parent_path();
  write_dataset(dir, world, data);
  return run.finish();
}

std::vector<std::string> cmd_train(const CommandContext& ctx, const fs::path& data_dir) {
  ctx.config.validate();
  const WorldSpec world = load_world(data_dir);
  const ObservationalDataset data = load_observations(data_dir, world);
  Run run(ctx, "train");
  const TrainingResult result = train_lvm(ctx.config, world, data);
  const ArmEstimates arms = estimate_arms(result.model, data, ctx.config.ridge);
  write_model(run.path("lvm.json"), result.model);
  write_arms(run.path("arms.json"), arms);
  write_training_log(run.path("train_log.csv"), result.log);
  return run.finish();
}

std::vector<std::string> cmd_eval_lvm(const CommandContext& ctx, const fs::path& data_dir, const fs::path& model_dir) {
  ctx.config.validate();
  const WorldSpec world = load_world(data_dir);
  const ObservationalDataset data = load_observations(data_dir, world);
  require_file(data_dir / "patients.csv");
  require_file(data_dir / "latents.csv");
  const DatasetLatents hidden = read_latents(data_dir);
  require_file(model_dir / "lvm.json");
  require_file(model_dir / "arms.json");
  const LvmModel model = read_model(model_dir / "lvm.json");
  const ArmEstimates arms = read_arms(model_dir / "arms.json");
  if (model.data_dim() != world.dim()) throw ConfigError("model input dimension differs from world.json");
  if (arms.arm_count() != world.arm_count()) throw ConfigError("arms.json and world.json disagree on the arm count");

  Run run(ctx, "eval-lvm");
  const LvmMetrics m = evaluate_lvm(ctx.config, world, model, arms, data, hidden);
  Json j;
  j["mcc_perm"] = m.mcc_perm;
  j["mcc_affine"] = m.mcc_affine;
  j["r2_train"] = m.r2_train;
  j["r2_test"] = m.r2_test;
  j["accuracy"] = m.accuracy;
  j["cross_entropy"] = m.cross_entropy;
  j["mcc_perm_train"] = m.mcc_perm_train;
  j["mcc_affine_train"] = m.mcc_affine_train;
  j["test_patients"] = m.test_patients;
  j["test_steps"] = ctx.config.effective_test_steps();
  j["layers"] = world.mixing.depth();
  j["dim"] = world.dim();
  j["patients"] = data.patients;
  j["steps"] = data.steps;
  j["arms"] = world.arm_count();
  detail::write_json_file(run.path("metrics.json"), j);
  return run.finish();
}

std::vector<std::string> cmd_bandit(const CommandContext& ctx, const std::optional<fs::path>& data_dir,
                                    const std::optional<fs::path>& model_dir) {
  const auto& cfg = ctx.config;
  cfg.validate();
  const WorldSpec world = data_dir ? load_world(*data_dir) : make_world(cfg);

  const bool needs_model = std::any_of(cfg.bandit.algorithms.begin(), cfg.bandit.algorithms.end(),
                                       [](const std::string& a) { return a == "greedy1" || a == "greedy2"; });
  std::optional<LvmModel> model;
  std::optional<ArmEstimates> arms;
  if (needs_model) {
    if (!model_dir) throw ConfigError("learned agents requested but no model directory given (--model)");
    require_file(*model_dir / "lvm.json");
    require_file(*model_dir / "arms.json");
    model = read_model(*model_dir / "lvm.json");
    arms = read_arms(*model_dir / "arms.json");
    if (model->data_dim() != world.dim()) throw ConfigError("model input dimension differs from the world");
  }

  const bool sweep = !cfg.bandit.arm_counts.empty();
  if (sweep && needs_model && !data_dir)
    throw ConfigError("an arm-count sweep with learned agents needs the dataset (--data) to refit arms");
  std::optional<ObservationalDataset> data;
  std::optional<DatasetLatents> hidden;
  if (sweep && needs_model) {
    data = load_observations(*data_dir, world);
    hidden = read_latents(*data_dir);
  }

  Run run(ctx, "bandit");
  Json summary = Json::object();
  const std::vector<int> counts = sweep ? cfg.bandit.arm_counts : std::vector<int>{world.arm_count()};
  for (int K : counts) {
    WorldSpec w = sweep ? with_resampled_arms(world, K) : world;
    std::optional<ArmEstimates> fitted;
    if (needs_model) {
      if (sweep) {
        const auto relogged = relog_rewards(*data, *hidden, w, substream_seed(cfg.world.seed, "relog", static_cast<std::uint64_t>(K)));
        fitted = estimate_arms(*model, relogged, cfg.ridge);
      } else {
        if (arms->arm_count() != w.arm_count()) throw ConfigError("arms.json and the world disagree on the arm count");
        fitted = *arms;
      }
    }
    AgentContext actx;
    actx.world = &w;
    actx.model = model ? &*model : nullptr;
    actx.learned_arms = fitted ? &*fitted : nullptr;
    actx.lambda_g = cfg.bandit.lambda_g;
    actx.thompson_prior_variance = cfg.bandit.thompson_prior_variance;

    SimulationConfig sim;
    sim.instances = cfg.bandit.instances;
    sim.horizon = cfg.bandit.horizon;
    sim.algorithms = cfg.bandit.algorithms;
    sim.seed = substream_seed(cfg.world.seed, "bandit", static_cast<std::uint64_t>(K));
    sim.threads = ctx.threads;
    const auto traces = simulate(w, actx, sim);
    const RegretSummary rs = aggregate_regret(traces);

    const std::string suffix = sweep ? "_K" + std::to_string(K) : "";
    write_traces(run.path("traces" + suffix + ".csv"), traces);
    write_regret_summary(run.path("regret_summary" + suffix + ".csv"), rs);

    // Per-instance bound of the oracle Greedy1 analysis, averaged over instances.
    double bound_sum = 0.0;
    int bound_n = 0;
    for (int i = 0; i < sim.instances; ++i) {
      const auto gaps = arm_gaps(w, instance_patient(w, sim.seed, i).mean);
      if (!(gaps.min_gap > 0.0)) continue;
      bound_sum += greedy1_regret_bound({gaps.min_gap, gaps.max_gap, K, w.sigma}).value;
      ++bound_n;
    }
    Json cell;
    cell["arms"] = K;
    cell["horizon"] = sim.horizon;
    cell["instances"] = sim.instances;
    cell["mean_greedy1_bound"] = bound_n > 0 ? bound_sum / bound_n : 0.0;
    const auto T = static_cast<std::size_t>(sim.horizon);
    const std::size_t t100 = std::min<std::size_t>(100, T) - 1;
    for (const auto& c : rs.curves) {
      Json a;
      a["cum_mean"] = c.cumulative_mean[T - 1];
      a["cum_se"] = c.cumulative_se[T - 1];
      a["simple_mean"] = c.simple_mean[T - 1];
      a["optimal_rate_final"] = c.optimal_rate[T - 1];
      a["optimal_rate_t100"] = c.optimal_rate[t100];
      cell["algorithms"][c.algorithm] = a;
    }
    summary["K" + std::to_string(K)] = cell;
  }
  detail::write_json_file(run.path("bandit.json"), summary);
  return run.finish();
}

namespace {

std::string fixed(double v, int precision = 3) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(precision) << v;
  return o.str();
}

}  // namespace

std::vector<std::string> cmd_report(const CommandContext& ctx, const std::vector<fs::path>& runs) {
  if (runs.empty()) throw ConfigError("report needs at least one run directory");
  struct Row {
    std::string run;
    Json metrics;
  };
  struct Plot {
    std::string name;
    std::string title;
    RegretSummary summary;
  };
  std::vector<Row> rows;
  std::vector<Plot> plots;
  std::map<std::string, int> used_names;

  for (const auto& dir : runs) {
    if (!fs::is_directory(dir)) throw IoError("not a run directory: " + dir.string());
    std::string run_name = fs::weakly_canonical(dir).filename().string();
    if (run_name.empty()) run_name = "run";
    if (int n = used_names[run_name]++; n > 0) run_name += "_" + std::to_string(n);
    if (fs::is_regular_file(dir / "metrics.json")) rows.push_back({run_name, detail::read_json_file(dir / "metrics.json")});

    std::vector<fs::path> summaries;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto name = entry.path().filename().string();
      if (entry.is_regular_file() && name.rfind("regret_summary", 0) == 0 && entry.path().extension() == ".csv")
        summaries.push_back(entry.path());
    }
    std::sort(summaries.begin(), summaries.end());
    for (const auto& s : summaries) {
      const std::string stem = s.stem().string();
      std::string title = run_name;
      if (auto k = stem.find("_K"); k != std::string::npos) title += " (K=" + stem.substr(k + 2) + ")";
      plots.push_back({run_name + "_" + stem, title, read_regret_summary(s)});
    }
  }
  if (rows.empty() && plots.empty()) throw IoError("no metrics.json or regret_summary*.csv found in the given runs");
  for (const auto& p : plots)
    if (p.summary.horizon != plots.front().summary.horizon)
      throw ConfigError("inconsistent horizons across runs: " + std::to_string(plots.front().summary.horizon) + " vs " +
                        std::to_string(p.summary.horizon) + " (" + p.name + ")");

  Run run(ctx, "report");
  if (!rows.empty()) {
    static const char* const kCols[] = {"mcc_perm", "mcc_affine", "accuracy", "r2_train", "r2_test"};
    auto num = [](const Json& j, const char* key) { return j.contains(key) ? j.at(key).get<double>() : 0.0; };
    auto integer = [](const Json& j, const char* key) { return j.contains(key) ? j.at(key).get<long long>() : 0LL; };
    {
      csv::Writer w(run.path("lvm_table.csv"), {"run", "L", "T_o", "Q", "mcc_perm", "mcc_affine", "accuracy", "r2_train", "r2_test"});
      for (const auto& r : rows) {
        w.cell(r.run).cell(integer(r.metrics, "layers")).cell(integer(r.metrics, "steps")).cell(integer(r.metrics, "patients"));
        for (const char* c : kCols) w.cell(num(r.metrics, c));
        w.end_row();
      }
      w.close();
    }
    std::ostringstream t;
    t << std::left << std::setw(24) << "run" << std::right << std::setw(4) << "L" << std::setw(6) << "T_o" << std::setw(6) << "Q";
    for (const char* c : kCols) t << std::setw(12) << c;
    t << '\n';
    for (const auto& r : rows) {
      t << std::left << std::setw(24) << r.run << std::right << std::setw(4) << integer(r.metrics, "layers") << std::setw(6)
        << integer(r.metrics, "steps") << std::setw(6) << integer(r.metrics, "patients");
      for (const char* c : kCols) t << std::setw(12) << fixed(num(r.metrics, c));
      t << '\n';
    }
    write_text(run.path("lvm_table.txt"), t.str());
  }
  if (!plots.empty()) {
    csv::Writer w(run.path("regret_final.csv"), {"plot", "algorithm", "T", "cum_mean", "cum_se", "simple_mean", "simple_se"});
    for (const auto& p : plots) {
      const auto T = static_cast<std::size_t>(p.summary.horizon);
      for (const auto& c : p.summary.curves) {
        w.cell(p.name).cell(c.algorithm).cell(p.summary.horizon).cell(c.cumulative_mean[T - 1]).cell(c.cumulative_se[T - 1]);
        w.cell(c.simple_mean[T - 1]).cell(c.simple_se[T - 1]).end_row();
      }
    }
    w.close();
    for (const auto& p : plots) write_regret_svg(run.path(p.name + ".svg"), p.summary, p.title);
  }
  return run.finish();
}

}  // namespace ilb
