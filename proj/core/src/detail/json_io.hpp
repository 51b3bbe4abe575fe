#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>

#include "ilb/net/leaky_relu_net.hpp"
#include "ilb/net/maxout_net.hpp"

namespace ilb::detail {

using Json = nlohmann::json;

Json matrix_to_json(const DenseMatrix& m);  // [[row0...], [row1...], ...]
Json vector_to_json(const Vector& v);
DenseMatrix matrix_from_json(const Json& j);
Vector vector_from_json(const Json& j);

Json net_to_json(const LeakyReluNet& net);
Json net_to_json(const MaxoutNet& net);
LeakyReluNet leaky_relu_net_from_json(const Json& j);
MaxoutNet maxout_net_from_json(const Json& j);

// Throws IoError naming the path on failure.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace ilb::detail
