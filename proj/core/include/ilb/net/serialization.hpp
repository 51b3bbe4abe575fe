#pragma once

#include <string>

#include "ilb/net/leaky_relu_net.hpp"
#include "ilb/net/maxout_net.hpp"

namespace ilb {

inline constexpr int kNetSchemaVersion = 1;

// JSON text: {schema_version, family, alpha|pieces, layers: [{w, b}, ...]}.
// Maxout layers are stored piece-major: each hidden layer contributes `pieces` entries.
std::string to_json(const LeakyReluNet& net);
std::string to_json(const MaxoutNet& net);

// Throw IoError on malformed text, ConfigError on a family mismatch.
LeakyReluNet leaky_relu_net_from_json(const std::string& text);
MaxoutNet maxout_net_from_json(const std::string& text);

}  // namespace ilb
