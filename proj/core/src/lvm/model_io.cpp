#include "ilb/lvm/model_io.hpp"

#include "detail/json_io.hpp"
#include "ilb/csv.hpp"
#include "ilb/errors.hpp"

namespace ilb {

using detail::Json;

namespace {
constexpr int kModelSchemaVersion = 1;
}

void write_model(const std::filesystem::path& path, const LvmModel& model) {
  detail::write_json_file(
      path, Json{{"schema_version", kModelSchemaVersion},
                 {"extractor", detail::net_to_json(model.extractor)},
                 {"head", {{"w", detail::matrix_to_json(model.head_weight)}, {"b", detail::vector_to_json(model.head_bias)}}},
                 {"metadata",
                  {{"epochs", model.metadata.epochs},
                   {"final_loss", model.metadata.final_loss},
                   {"seed", model.metadata.seed}}}});
}

LvmModel read_model(const std::filesystem::path& path) {
  const Json j = detail::read_json_file(path);
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion) throw IoError(path.string() + ": unsupported schema_version");
    const auto& meta = j.at("metadata");
    LvmModel model{detail::maxout_net_from_json(j.at("extractor")), detail::matrix_from_json(j.at("head").at("w")),
                   detail::vector_from_json(j.at("head").at("b")),
                   TrainingMetadata{meta.at("epochs").get<int>(),
                                    meta.at("final_loss").is_number() ? meta.at("final_loss").get<double>() : 0.0,
                                    meta.at("seed").get<std::uint64_t>()}};
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_arms(const std::filesystem::path& path, const ArmEstimates& arms) {
  Json out = Json::array();
  for (int a = 0; a < arms.arm_count(); ++a) {
    const auto i = static_cast<std::size_t>(a);
    out.push_back({{"arm_id", a},
                   {"theta", detail::vector_to_json(arms.theta[i])},
                   {"n_samples", arms.samples[i]},
                   {"resid_var", arms.residual_variance[i]},
                   {"usable", static_cast<bool>(arms.usable[i])}});
  }
  detail::write_json_file(path, out);
}

ArmEstimates read_arms(const std::filesystem::path& path) {
  const Json j = detail::read_json_file(path);
  ArmEstimates arms;
  try {
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto& e = j.at(i);
      if (e.at("arm_id").get<std::size_t>() != i) throw IoError(path.string() + ": arms must be listed in id order");
      arms.theta.push_back(detail::vector_from_json(e.at("theta")));
      arms.samples.push_back(e.at("n_samples").get<int>());
      arms.residual_variance.push_back(e.at("resid_var").get<double>());
      arms.usable.push_back(e.value("usable", arms.samples.back() > 0));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return arms;
}

void write_training_log(const std::filesystem::path& path, const std::vector<EpochLog>& log) {
  csv::Writer w(path, {"epoch", "stage", "lr", "train_loss", "holdout_loss", "holdout_accuracy"});
  for (const auto& e : log) {
    w.cell(e.epoch).cell(e.stage).cell(e.learning_rate).cell(e.train_loss).cell(e.holdout_loss).cell(e.holdout_accuracy);
    w.end_row();
  }
  w.close();
}

}  // namespace ilb
