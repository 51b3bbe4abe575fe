// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [AC1 AC2 ...]   (no arguments runs everything)

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ilb/bandit/agents.hpp"
#include "ilb/bandit/episode.hpp"
#include "ilb/eval/hungarian.hpp"
#include "ilb/eval/metrics.hpp"
#include "ilb/exp/commands.hpp"
#include "ilb/exp/pipeline.hpp"
#include "ilb/lvm/arms.hpp"
#include "ilb/lvm/model.hpp"
#include "ilb/lvm/trainer.hpp"
#include "support.hpp"

using namespace ilb;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

CommandContext context(const ExperimentConfig& c, const fs::path& out) {
  CommandContext ctx;
  ctx.config = c;
  ctx.config.output_dir = out.string();
  ctx.out = out;
  ctx.force = true;
  return ctx;
}

// Desk-scale reproduction cell: Q=100, d=5, K=10, everything else at its default.
ExperimentConfig table_cell(int layers, int steps) {
  ExperimentConfig c = default_config();
  c.world.depth = layers;
  c.dataset.steps = steps;
  c.world.seed = 1;
  return c;
}

// Generates, trains and evaluates one cell under `root`; reused by later criteria.
Json run_cell(const ExperimentConfig& c, const fs::path& root) {
  if (!fs::exists(root / "eval" / "metrics.json")) {
    cmd_gen(context(c, root / "data"));
    cmd_train(context(c, root / "model"), root / "data");
    cmd_eval_lvm(context(c, root / "eval"), root / "data", root / "model");
  }
  return read_json(root / "eval" / "metrics.json");
}

Outcome ac1(const fs::path& work) {
  const double r2_floor[2] = {0.85, 0.80};
  const int cells[2][2] = {{2, 200}, {4, 300}};
  Outcome o{true, ""};
  for (int i = 0; i < 2; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const auto c = table_cell(cells[i][0], cells[i][1]);
    const Json m = run_cell(c, work / ("cell_L" + std::to_string(cells[i][0])));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double mcc = m["mcc_perm"], r2 = m["r2_test"];
    const bool ok = mcc >= 0.80 && r2 >= r2_floor[i] && secs <= 900.0;
    o.pass = o.pass && ok;
    o.detail += "L=" + std::to_string(cells[i][0]) + ",T_o=" + std::to_string(cells[i][1]) + ": mcc_perm=" +
                fmt("%.3f", mcc) + " (>=0.80) r2_test=" + fmt("%.3f", r2) + fmt(" (>=%.2f)", r2_floor[i]) +
                " mcc_affine=" + fmt("%.3f", m["mcc_affine"].get<double>()) + fmt(" time=%.0fs", secs) +
                (i == 0 ? "; " : "");
  }
  return o;
}

Outcome ac2(const fs::path& work) {
  auto c = table_cell(2, 200);
  const fs::path cell = work / "cell_L2";
  run_cell(c, cell);
  c.bandit.instances = 200;
  c.bandit.horizon = 500;
  if (!fs::exists(cell / "bandit" / "bandit.json"))
    cmd_bandit(context(c, cell / "bandit"), cell / "data", cell / "model");
  const Json algos = read_json(cell / "bandit" / "bandit.json")["K10"]["algorithms"];
  auto mean = [&](const char* a) { return algos[a]["cum_mean"].get<double>(); };
  auto se = [&](const char* a) { return algos[a]["cum_se"].get<double>(); };

  bool pass = true;
  std::string detail;
  for (const char* a : {"oracle-greedy1", "oracle-greedy2", "greedy1", "greedy2", "thompson"})
    detail += std::string(a) + "=" + fmt("%.2f", mean(a)) + "+-" + fmt("%.2f", se(a)) + " ";
  const double best_oracle = std::min(mean("oracle-greedy1"), mean("oracle-greedy2"));
  for (const char* learned : {"greedy1", "greedy2"}) {
    const double gap_se = std::sqrt(se(learned) * se(learned) + se("thompson") * se("thompson"));
    const double rate = algos[learned]["optimal_rate_t100"];
    pass = pass && best_oracle <= mean(learned) && mean(learned) < mean("thompson") &&
           mean("thompson") - mean(learned) >= 2.0 * gap_se && rate >= 0.80;
    detail += std::string("| ") + learned + ": sep=" + fmt("%.1f", (mean("thompson") - mean(learned)) / gap_se) +
              "SE rate@100=" + fmt("%.2f", rate) + " ";
  }
  return {pass, detail};
}

Outcome ac3(const fs::path& work) {
  ExperimentConfig c = default_config();
  c.world.seed = 1;
  c.world.sigma = 0.3;
  c.bandit.algorithms = {"oracle-greedy1"};
  c.bandit.horizon = 2000;
  c.bandit.instances = 500;
  const fs::path dir = work / "constant_regret";
  cmd_bandit(context(c, dir), std::nullopt, std::nullopt);
  const auto summary = read_regret_summary(dir / "regret_summary.csv");
  const auto& cum = summary.curve("oracle-greedy1").cumulative_mean;
  const double at_half = cum[999], at_end = cum[1999];
  const double growth = at_end > 0.0 ? (at_end - at_half) / at_end : 0.0;
  const double bound = read_json(dir / "bandit.json")["K10"]["mean_greedy1_bound"];
  return {growth < 0.01 && at_end <= bound,
          "R_1000=" + fmt("%.4f", at_half) + " R_2000=" + fmt("%.4f", at_end) + " growth=" + fmt("%.2f%%", 100 * growth) +
              " (<1%) mean_bound=" + fmt("%.4g", bound)};
}

ArmEstimates random_arms(int count, Eigen::Index d, Rng& rng) {
  std::vector<Vector> t;
  for (int a = 0; a < count; ++a) t.push_back(random_normal(d, 1.0, rng));
  return exact_arms(t);
}

Outcome ac4(const fs::path& work) {
  std::vector<std::string> failures;
  std::string detail;
  Rng rng(2024);

  // Gradients on 100 random nets of each family.
  double grad_worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int depth = 1 + rep % 4;
    auto leaky = LeakyReluNet::random(5, depth, 0.2, rng);
    grad_worst = std::max(grad_worst, test::check_gradients(leaky, random_normal(5, 1.0, rng), random_normal(5, 1.0, rng)).worst);
    auto maxout = MaxoutNet::random(5, 5 + rep % 3, depth - 1, 2 + rep % 2, 5, rng);
    grad_worst = std::max(grad_worst, test::check_gradients(maxout, random_normal(5, 1.0, rng), random_normal(5, 1.0, rng)).worst);
  }
  if (!(grad_worst < 1e-4)) failures.push_back("gradients");
  detail += "grad_rel=" + fmt("%.1e", grad_worst);

  double trip_worst = 0.0;
  for (int net_i = 0; net_i < 10; ++net_i) {
    const auto net = LeakyReluNet::random(5, 1 + net_i % 4, 0.2, rng);
    for (int i = 0; i < 100; ++i) {
      const Vector z = random_normal(5, 1.0, rng);
      trip_worst = std::max(trip_worst, (net.inverse(net.forward(z)) - z).cwiseAbs().maxCoeff());
    }
  }
  if (!(trip_worst < 1e-8)) failures.push_back("round-trip");
  detail += " roundtrip=" + fmt("%.1e", trip_worst);

  double g2_worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int d = 2 + rep % 2, k = 3 + rep % 4;
    const auto arms = random_arms(k, d, rng);
    Greedy2State s(d, 0.5 + 0.01 * rep);
    greedy2_update(s, random_normal(d, 1.0, rng), std::nullopt, arms);
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (int t = 0; t < 2 + rep % 6; ++t)
      greedy2_update(s, random_normal(d, 1.0, rng), RewardEvent{pick(rng), random_normal(1, 1.0, rng)(0)}, arms);
    g2_worst = std::max(g2_worst, (s.estimate - test::brute_force_greedy2(s, arms)).cwiseAbs().maxCoeff());
  }
  if (!(g2_worst < 1e-6)) failures.push_back("greedy2");
  detail += " greedy2=" + fmt("%.1e", g2_worst);

  bool hungarian_ok = true;
  for (int n = 1; n <= 6; ++n)
    for (int rep = 0; rep < 50; ++rep) {
      const DenseMatrix w = random_normal(n, n, 1.0, rng).cwiseAbs();
      const auto assign = max_weight_assignment(w);
      std::set<int> cols(assign.begin(), assign.end());
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += w(i, assign[static_cast<std::size_t>(i)]);
      hungarian_ok = hungarian_ok && static_cast<int>(cols.size()) == n && std::abs(total - test::brute_force_best(w)) < 1e-12;
    }
  if (!hungarian_ok) failures.push_back("hungarian");
  detail += std::string(" hungarian=") + (hungarian_ok ? "exact" : "MISMATCH");

  double pinned_worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const LvmModel m{MaxoutNet::random(5, 5, 1, 2, 5, rng), random_normal(10, 5, 1.0, rng), random_normal(10, 1.0, rng), {}};
    const Vector x = random_normal(5, 1.0, rng);
    const Vector full = classify(m, x).probabilities;
    const Vector pin = pinned_probabilities(to_pinned(m.head_weight, m.head_bias), extract_latent(m, x));
    pinned_worst = std::max(pinned_worst, (full - pin).cwiseAbs().maxCoeff());
  }
  if (!(pinned_worst < 1e-12)) failures.push_back("pinned");
  detail += " pinned=" + fmt("%.1e", pinned_worst);

  // Full pipeline replay at two thread counts, compared byte for byte.
  ExperimentConfig c = default_config();
  c.world.seed = 9;
  c.dataset.patients = 20;
  c.dataset.steps = 50;
  c.training.epochs = 10;
  c.eval.test_patients = 10;
  c.bandit.instances = 20;
  c.bandit.horizon = 60;
  cmd_gen(context(c, work / "replay" / "data"));
  bool replay_ok = true;
  for (int threads : {1, 4}) {
    auto ctx = context(c, work / "replay" / ("model" + std::to_string(threads)));
    ctx.threads = threads;
    cmd_train(ctx, work / "replay" / "data");
    ctx = context(c, work / "replay" / ("eval" + std::to_string(threads)));
    ctx.threads = threads;
    cmd_eval_lvm(ctx, work / "replay" / "data", work / "replay" / ("model" + std::to_string(threads)));
    ctx = context(c, work / "replay" / ("bandit" + std::to_string(threads)));
    ctx.threads = threads;
    cmd_bandit(ctx, work / "replay" / "data", work / "replay" / ("model" + std::to_string(threads)));
  }
  for (const auto& [dir, file] : std::vector<std::pair<std::string, std::string>>{
           {"model", "lvm.json"}, {"model", "arms.json"}, {"eval", "metrics.json"},
           {"bandit", "traces.csv"}, {"bandit", "regret_summary.csv"}, {"bandit", "bandit.json"}})
    replay_ok = replay_ok && test::slurp(work / "replay" / (dir + "1") / file) == test::slurp(work / "replay" / (dir + "4") / file);
  if (!replay_ok) failures.push_back("replay");
  detail += std::string(" replay=") + (replay_ok ? "identical" : "DIFFERENT");

  for (const auto& f : failures) detail += " [failed: " + f + "]";
  return {failures.empty(), detail};
}

Outcome ac5() {
  const ExperimentConfig c = table_cell(2, 200);
  const WorldSpec world = make_world(c);
  const GeneratedDataset ds = make_dataset(c, world);
  const ObservationalDataset shuffled = shuffle_labels(ds.observed, stage_seed(c, "null.shuffle"));
  const TrainingResult result = train_contrastive(shuffled, resolve_training(c, world), stage_seed(c, "training"));
  // Arms are fitted against the true labels; only the extractor saw shuffled ones.
  const ArmEstimates arms = estimate_arms(result.model, ds.observed, c.ridge);
  const LvmMetrics m = evaluate_lvm(c, world, result.model, arms, ds.observed, ds.hidden);
  const double ln_q = std::log(static_cast<double>(c.dataset.patients));
  const double rel = std::abs(m.cross_entropy - ln_q) / ln_q;
  return {rel <= 0.05 && m.mcc_perm < 0.2,
          "cross_entropy=" + fmt("%.4f", m.cross_entropy) + " ln(Q)=" + fmt("%.4f", ln_q) + " rel=" + fmt("%.2f%%", 100 * rel) +
              " (<=5%) mcc_perm=" + fmt("%.3f", m.mcc_perm) + " (<0.2) epochs=" + std::to_string(result.log.size())};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only(argv + 1, argv + argc);
  const fs::path work = fs::temp_directory_path() / "ilb_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 lvm-recovery", [&] { return ac1(work); }},
      {"AC2 regret-ordering", [&] { return ac2(work); }},
      {"AC3 constant-regret", [&] { return ac3(work); }},
      {"AC4 property-suites", [&] { return ac4(work); }},
      {"AC5 null-controls", [] { return ac5(); }},
  };

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && !only.count(name.substr(0, 3))) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}
