#include "ilb/net/serialization.hpp"

#include <fstream>
#include <sstream>

#include "detail/json_io.hpp"
#include "ilb/errors.hpp"

namespace ilb {
namespace detail {

Json matrix_to_json(const DenseMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

DenseMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw IoError("expected a matrix (array of rows)");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  DenseMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw IoError("ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw IoError("expected a vector (array of numbers)");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

namespace {

Json layer_to_json(const AffineLayer& l) { return Json{{"w", matrix_to_json(l.weight)}, {"b", vector_to_json(l.bias)}}; }

AffineLayer layer_from_json(const Json& j) { return {matrix_from_json(j.at("w")), vector_from_json(j.at("b"))}; }

void check_header(const Json& j, const char* family) {
  if (j.value("schema_version", -1) != kNetSchemaVersion)
    throw IoError("unsupported network schema_version");
  if (j.value("family", std::string{}) != family)
    throw ConfigError(std::string("expected network family '") + family + "', got '" +
                      j.value("family", std::string{}) + "'");
}

}  // namespace

Json net_to_json(const LeakyReluNet& net) {
  Json layers = Json::array();
  for (const auto& l : net.layers()) layers.push_back(layer_to_json(l));
  return Json{{"schema_version", kNetSchemaVersion},
              {"family", "leaky_relu"},
              {"alpha", net.alpha()},
              {"dim", net.dim()},
              {"layers", std::move(layers)}};
}

Json net_to_json(const MaxoutNet& net) {
  Json layers = Json::array();
  for (const auto& h : net.hidden())
    for (const auto& p : h.pieces) layers.push_back(layer_to_json(p));
  layers.push_back(layer_to_json(net.output()));
  return Json{{"schema_version", kNetSchemaVersion},
              {"family", "maxout"},
              {"pieces", net.pieces()},
              {"layers", std::move(layers)}};
}

LeakyReluNet leaky_relu_net_from_json(const Json& j) {
  try {
    check_header(j, "leaky_relu");
    std::vector<AffineLayer> layers;
    for (const auto& l : j.at("layers")) layers.push_back(layer_from_json(l));
    const Eigen::Index dim = j.contains("dim") ? j.at("dim").get<Eigen::Index>()
                                               : (layers.empty() ? 0 : layers.front().out_dim());
    return LeakyReluNet(dim, std::move(layers), j.at("alpha").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed leaky_relu network: ") + e.what());
  }
}

MaxoutNet maxout_net_from_json(const Json& j) {
  try {
    check_header(j, "maxout");
    const auto& layers = j.at("layers");
    if (layers.empty()) throw IoError("maxout network has no layers");
    const std::size_t pieces = j.at("pieces").get<std::size_t>();
    const std::size_t hidden_entries = layers.size() - 1;
    if (pieces == 0 ? hidden_entries != 0 : hidden_entries % pieces != 0)
      throw IoError("maxout layer count is not a multiple of pieces");
    std::vector<MaxoutLayer> hidden;
    for (std::size_t i = 0; i < hidden_entries; i += pieces) {
      MaxoutLayer layer;
      for (std::size_t k = 0; k < pieces; ++k) layer.pieces.push_back(layer_from_json(layers[i + k]));
      hidden.push_back(std::move(layer));
    }
    return MaxoutNet(std::move(hidden), layer_from_json(layers.back()));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed maxout network: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

std::string to_json(const LeakyReluNet& net) { return detail::net_to_json(net).dump(); }
std::string to_json(const MaxoutNet& net) { return detail::net_to_json(net).dump(); }

LeakyReluNet leaky_relu_net_from_json(const std::string& text) {
  try {
    return detail::leaky_relu_net_from_json(detail::Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cannot parse network JSON: ") + e.what());
  }
}

MaxoutNet maxout_net_from_json(const std::string& text) {
  try {
    return detail::maxout_net_from_json(detail::Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cannot parse network JSON: ") + e.what());
  }
}

}  // namespace ilb
