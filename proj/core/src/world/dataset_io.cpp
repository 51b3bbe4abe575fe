#include "ilb/world/dataset_io.hpp"

#include <string>

#include "detail/json_io.hpp"
#include "ilb/csv.hpp"
#include "ilb/errors.hpp"

namespace ilb {

namespace fs = std::filesystem;
using detail::Json;

namespace {

constexpr int kWorldSchemaVersion = 1;

std::vector<std::string> numbered(const std::string& prefix, Eigen::Index d) {
  std::vector<std::string> out;
  for (Eigen::Index i = 1; i <= d; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

void write_world(const fs::path& path, const WorldSpec& world) {
  Json arms = Json::array();
  for (const auto& a : world.arms) arms.push_back(detail::vector_to_json(a));
  detail::write_json_file(path, Json{{"schema_version", kWorldSchemaVersion},
                                     {"dim", world.dim()},
                                     {"sigma", world.sigma},
                                     {"reward_noise", world.reward_noise},
                                     {"seed", world.seed},
                                     {"arms", std::move(arms)},
                                     {"mixing", detail::net_to_json(world.mixing)}});
}

WorldSpec read_world(const fs::path& path) {
  const Json j = detail::read_json_file(path);
  try {
    if (j.at("schema_version").get<int>() != kWorldSchemaVersion) throw IoError(path.string() + ": unsupported schema_version");
    WorldSpec world{detail::leaky_relu_net_from_json(j.at("mixing")), j.at("sigma").get<double>(), {},
                    j.at("reward_noise").get<double>(), j.at("seed").get<std::uint64_t>()};
    for (const auto& a : j.at("arms")) world.arms.push_back(detail::vector_from_json(a));
    if (j.at("dim").get<Eigen::Index>() != world.dim()) throw ConfigError(path.string() + ": dim disagrees with mixing network");
    world.validate();
    return world;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_dataset(const fs::path& dir, const WorldSpec& world, const GeneratedDataset& data) {
  const auto& obs = data.observed;
  const auto d = obs.dim();
  write_world(dir / "world.json", world);

  {
    csv::Writer w(dir / "patients.csv", concat({"q"}, numbered("z_", d)));
    for (const auto& p : data.hidden.patients) {
      w.cell(p.id);
      for (Eigen::Index i = 0; i < d; ++i) w.cell(p.mean(i));
      w.end_row();
    }
    w.close();
  }
  {
    csv::Writer w(dir / "observations.csv", concat(concat({"q", "t"}, numbered("x_", d)), {"action", "reward"}));
    for (std::size_t r = 0; r < obs.rows(); ++r) {
      w.cell(obs.label[r]).cell(static_cast<int>(r % static_cast<std::size_t>(obs.steps)));
      for (Eigen::Index i = 0; i < d; ++i) w.cell(obs.x(static_cast<Eigen::Index>(r), i));
      w.cell(obs.action[r]).cell(obs.reward[r]);
      w.end_row();
    }
    w.close();
  }
  {
    csv::Writer w(dir / "latents.csv", concat({"q", "t"}, numbered("z_", d)));
    for (std::size_t r = 0; r < obs.rows(); ++r) {
      w.cell(obs.label[r]).cell(static_cast<int>(r % static_cast<std::size_t>(obs.steps)));
      for (Eigen::Index i = 0; i < d; ++i) w.cell(data.hidden.z(static_cast<Eigen::Index>(r), i));
      w.end_row();
    }
    w.close();
  }
}

ObservationalDataset read_observations(const fs::path& dir) {
  const auto t = csv::read(dir / "observations.csv");
  const auto cq = t.column("q");
  const auto ct = t.column("t");
  const auto ca = t.column("action");
  const auto cr = t.column("reward");
  std::vector<std::size_t> cx;
  for (int i = 1;; ++i) {
    auto it = std::find(t.header.begin(), t.header.end(), "x_" + std::to_string(i));
    if (it == t.header.end()) break;
    cx.push_back(static_cast<std::size_t>(it - t.header.begin()));
  }
  if (cx.empty()) throw IoError(t.source + ": no x_ columns");

  ObservationalDataset obs;
  const auto rows = t.rows.size();
  obs.x.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cx.size()));
  int max_action = -1;
  for (std::size_t r = 0; r < rows; ++r) {
    obs.label.push_back(static_cast<int>(t.integer(r, cq)));
    obs.action.push_back(static_cast<int>(t.integer(r, ca)));
    obs.reward.push_back(t.number(r, cr));
    for (std::size_t i = 0; i < cx.size(); ++i) obs.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = t.number(r, cx[i]);
    max_action = std::max(max_action, obs.action.back());
    if (t.integer(r, ct) == 0 && r > 0 && obs.steps == 0) obs.steps = static_cast<int>(r);
  }
  if (obs.steps == 0) obs.steps = static_cast<int>(rows);
  if (rows == 0 || rows % static_cast<std::size_t>(obs.steps) != 0) throw IoError(t.source + ": ragged patient histories");
  obs.patients = static_cast<int>(rows / static_cast<std::size_t>(obs.steps));
  for (std::size_t r = 0; r < rows; ++r)
    if (obs.label[r] != static_cast<int>(r / static_cast<std::size_t>(obs.steps)))
      throw IoError(t.source + ": rows must be grouped by patient in order");
  obs.arm_count = max_action + 1;
  return obs;
}

DatasetLatents read_latents(const fs::path& dir) {
  DatasetLatents out;
  const auto pt = csv::read(dir / "patients.csv");
  const auto cq = pt.column("q");
  Eigen::Index d = 0;
  while (std::find(pt.header.begin(), pt.header.end(), "z_" + std::to_string(d + 1)) != pt.header.end()) ++d;
  for (std::size_t r = 0; r < pt.rows.size(); ++r) {
    PatientInstance p{static_cast<int>(pt.integer(r, cq)), Vector(d)};
    for (Eigen::Index i = 0; i < d; ++i) p.mean(i) = pt.number(r, pt.column("z_" + std::to_string(i + 1)));
    out.patients.push_back(std::move(p));
  }
  const auto lt = csv::read(dir / "latents.csv");
  out.z.resize(static_cast<Eigen::Index>(lt.rows.size()), d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto c = lt.column("z_" + std::to_string(i + 1));
    for (std::size_t r = 0; r < lt.rows.size(); ++r) out.z(static_cast<Eigen::Index>(r), i) = lt.number(r, c);
  }
  return out;
}

}  // namespace ilb
