#include "ilb/exp/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ilb/bandit/agents.hpp"
#include "ilb/csv.hpp"
#include "ilb/errors.hpp"
#include "ilb/exp/manifest.hpp"

namespace ilb {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"world", {"d", "layers", "alpha", "sigma", "reward_noise", "arms", "seed"}},
      {"dataset", {"patients", "steps"}},
      {"training",
       {"epochs", "stage1_fraction", "batch", "lr", "momentum", "l2", "decay", "early_stop", "holdout_fraction",
        "patience", "hidden_layers", "hidden_width", "pieces", "center_features", "whiten_inputs", "ridge"}},
      {"eval", {"test_patients", "test_steps"}},
      {"bandit", {"horizon", "instances", "algorithms", "lambda_g", "thompson_prior_var", "arm_counts"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty())
    throw ConfigError("config key '" + key + "': cannot parse '" + raw + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + raw + "'");
}

std::vector<std::string> parse_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

void ExperimentConfig::validate() const {
  if (world.dim < 1) throw ConfigError("world.d must be >= 1");
  if (world.depth < 0) throw ConfigError("world.layers must be >= 0");
  if (!(world.alpha > 0.0 && world.alpha < 1.0)) throw ConfigError("world.alpha must lie in (0, 1)");
  if (!(world.sigma > 0.0)) throw ConfigError("world.sigma must be > 0");
  if (!(world.reward_noise >= 0.0)) throw ConfigError("world.reward_noise must be >= 0");
  if (world.arms < 2) throw ConfigError("world.arms must be >= 2");
  if (dataset.patients < world.dim) throw ConfigError("dataset.patients must be >= world.d");
  if (dataset.steps < 1) throw ConfigError("dataset.steps must be >= 1");
  if (training.epochs < 1) throw ConfigError("training.epochs must be >= 1");
  if (!(training.stage1_fraction >= 0.0 && training.stage1_fraction <= 1.0))
    throw ConfigError("training.stage1_fraction must lie in [0, 1]");
  if (training.batch_size < 1) throw ConfigError("training.batch must be >= 1");
  if (!(training.sgd.learning_rate > 0.0)) throw ConfigError("training.lr must be > 0");
  if (!(training.sgd.momentum >= 0.0 && training.sgd.momentum < 1.0)) throw ConfigError("training.momentum must lie in [0, 1)");
  if (!(training.sgd.l2 >= 0.0)) throw ConfigError("training.l2 must be >= 0");
  if (!(training.sgd.decay > 0.0)) throw ConfigError("training.decay must be > 0");
  if (!(training.holdout_fraction >= 0.0 && training.holdout_fraction < 1.0))
    throw ConfigError("training.holdout_fraction must lie in [0, 1)");
  if (training.patience < 1) throw ConfigError("training.patience must be >= 1");
  if (training.pieces < 2) throw ConfigError("training.pieces must be >= 2");
  if (training.hidden_width < 0) throw ConfigError("training.hidden_width must be >= 0");
  if (!auto_hidden_layers && training.hidden_layers < 0) throw ConfigError("training.hidden_layers must be >= 0");
  if (!(ridge >= 0.0)) throw ConfigError("training.ridge must be >= 0");
  if (eval.test_patients < 2) throw ConfigError("eval.test_patients must be >= 2");
  if (eval.test_steps < 0) throw ConfigError("eval.test_steps must be >= 0");
  if (bandit.horizon < 1) throw ConfigError("bandit.horizon must be >= 1");
  if (bandit.instances < 1) throw ConfigError("bandit.instances must be >= 1");
  if (bandit.algorithms.empty()) throw ConfigError("bandit.algorithms must not be empty");
  for (const auto& a : bandit.algorithms)
    if (std::find(known_algorithms().begin(), known_algorithms().end(), a) == known_algorithms().end())
      throw ConfigError("bandit.algorithms: unknown algorithm '" + a + "'");
  if (!(bandit.lambda_g > 0.0)) throw ConfigError("bandit.lambda_g must be > 0");
  if (!(bandit.thompson_prior_variance > 0.0)) throw ConfigError("bandit.thompson_prior_var must be > 0");
  for (int k : bandit.arm_counts)
    if (k < 2) throw ConfigError("bandit.arm_counts entries must be >= 2");
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  ExperimentConfig c = default_config();
  for (const auto& [section, body] : tree) {
    auto sec = schema().find(section);
    if (sec == schema().end()) {
      if (body.empty()) throw ConfigError("config: keys must live in a [section], found bare key '" + section + "'");
      throw ConfigError("config: unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      if (!sec->second.count(key)) throw ConfigError("config: unknown key '" + section + "." + key + "'");
      const std::string name = section + "." + key;
      const std::string v = node.get_value<std::string>();
      if (section == "world") {
        if (key == "d") c.world.dim = parse_number<int>(name, v);
        else if (key == "layers") c.world.depth = parse_number<int>(name, v);
        else if (key == "alpha") c.world.alpha = parse_number<double>(name, v);
        else if (key == "sigma") c.world.sigma = parse_number<double>(name, v);
        else if (key == "reward_noise") c.world.reward_noise = parse_number<double>(name, v);
        else if (key == "arms") c.world.arms = parse_number<int>(name, v);
        else if (key == "seed") c.world.seed = parse_number<std::uint64_t>(name, v);
      } else if (section == "dataset") {
        if (key == "patients") c.dataset.patients = parse_number<int>(name, v);
        else if (key == "steps") c.dataset.steps = parse_number<int>(name, v);
      } else if (section == "training") {
        auto& t = c.training;
        if (key == "epochs") t.epochs = parse_number<int>(name, v);
        else if (key == "stage1_fraction") t.stage1_fraction = parse_number<double>(name, v);
        else if (key == "batch") t.batch_size = parse_number<int>(name, v);
        else if (key == "lr") t.sgd.learning_rate = parse_number<double>(name, v);
        else if (key == "momentum") t.sgd.momentum = parse_number<double>(name, v);
        else if (key == "l2") t.sgd.l2 = parse_number<double>(name, v);
        else if (key == "decay") t.sgd.decay = parse_number<double>(name, v);
        else if (key == "early_stop") t.early_stop = parse_bool(name, v);
        else if (key == "holdout_fraction") t.holdout_fraction = parse_number<double>(name, v);
        else if (key == "patience") t.patience = parse_number<int>(name, v);
        else if (key == "hidden_layers") {
          if (trim(v) == "auto") {
            c.auto_hidden_layers = true;
          } else {
            c.auto_hidden_layers = false;
            t.hidden_layers = parse_number<int>(name, v);
          }
        } else if (key == "hidden_width") t.hidden_width = parse_number<int>(name, v);
        else if (key == "pieces") t.pieces = parse_number<int>(name, v);
        else if (key == "center_features") t.center_features = parse_bool(name, v);
        else if (key == "whiten_inputs") t.whiten_inputs = parse_bool(name, v);
        else if (key == "ridge") c.ridge = parse_number<double>(name, v);
      } else if (section == "eval") {
        if (key == "test_patients") c.eval.test_patients = parse_number<int>(name, v);
        else if (key == "test_steps") c.eval.test_steps = parse_number<int>(name, v);
      } else if (section == "bandit") {
        if (key == "horizon") c.bandit.horizon = parse_number<int>(name, v);
        else if (key == "instances") c.bandit.instances = parse_number<int>(name, v);
        else if (key == "algorithms") c.bandit.algorithms = parse_list(v);
        else if (key == "lambda_g") c.bandit.lambda_g = parse_number<double>(name, v);
        else if (key == "thompson_prior_var") c.bandit.thompson_prior_variance = parse_number<double>(name, v);
        else if (key == "arm_counts") {
          c.bandit.arm_counts.clear();
          for (const auto& item : parse_list(v)) c.bandit.arm_counts.push_back(parse_number<int>(name, item));
        }
      } else if (section == "output") {
        c.output_dir = trim(v);
      }
    }
  }
  if (c.auto_hidden_layers) c.training.hidden_layers = std::max(c.world.depth - 1, 0);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  auto num = [](double v) { return csv::format_double(v); };
  std::ostringstream o;
  o << "[world]\n"
    << "d = " << c.world.dim << "\n"
    << "layers = " << c.world.depth << "\n"
    << "alpha = " << num(c.world.alpha) << "\n"
    << "sigma = " << num(c.world.sigma) << "\n"
    << "reward_noise = " << num(c.world.reward_noise) << "\n"
    << "arms = " << c.world.arms << "\n"
    << "seed = " << c.world.seed << "\n\n";
  o << "[dataset]\n"
    << "patients = " << c.dataset.patients << "\n"
    << "steps = " << c.dataset.steps << "\n\n";
  const auto& t = c.training;
  o << "[training]\n"
    << "epochs = " << t.epochs << "\n"
    << "stage1_fraction = " << num(t.stage1_fraction) << "\n"
    << "batch = " << t.batch_size << "\n"
    << "lr = " << num(t.sgd.learning_rate) << "\n"
    << "momentum = " << num(t.sgd.momentum) << "\n"
    << "l2 = " << num(t.sgd.l2) << "\n"
    << "decay = " << num(t.sgd.decay) << "\n"
    << "early_stop = " << (t.early_stop ? "true" : "false") << "\n"
    << "holdout_fraction = " << num(t.holdout_fraction) << "\n"
    << "patience = " << t.patience << "\n"
    << "hidden_layers = " << (c.auto_hidden_layers ? std::string("auto") : std::to_string(t.hidden_layers)) << "\n"
    << "hidden_width = " << t.hidden_width << "\n"
    << "pieces = " << t.pieces << "\n"
    << "center_features = " << (t.center_features ? "true" : "false") << "\n"
    << "whiten_inputs = " << (t.whiten_inputs ? "true" : "false") << "\n"
    << "ridge = " << num(c.ridge) << "\n\n";
  o << "[eval]\n"
    << "test_patients = " << c.eval.test_patients << "\n"
    << "test_steps = " << c.eval.test_steps << "\n\n";
  std::vector<std::string> ks;
  for (int k : c.bandit.arm_counts) ks.push_back(std::to_string(k));
  o << "[bandit]\n"
    << "horizon = " << c.bandit.horizon << "\n"
    << "instances = " << c.bandit.instances << "\n"
    << "algorithms = " << join(c.bandit.algorithms) << "\n"
    << "lambda_g = " << num(c.bandit.lambda_g) << "\n"
    << "thompson_prior_var = " << num(c.bandit.thompson_prior_variance) << "\n"
    << "arm_counts = " << join(ks) << "\n\n";
  o << "[output]\n"
    << "dir = " << c.output_dir << "\n";
  return o.str();
}

std::string config_hash(const ExperimentConfig& config) { return sha256_hex(serialize_config(config)); }

}  // namespace ilb
