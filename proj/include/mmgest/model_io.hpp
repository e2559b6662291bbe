#pragma once

#include <string>

#include "mmgest/net_types.hpp"

namespace mmgest {

// Versioned text format: a header line, the config as one JSON line, then
// every tensor in declaration order with 17-significant-digit decimals
// (lossless 64-bit round trip).
std::string model_to_string(const ModelParams& params);
ModelParams model_from_string(const std::string& text);

void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace mmgest
