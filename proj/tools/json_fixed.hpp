#pragma once

#include <string>

#include <json.hpp>

namespace uapp::tools {

/// Pretty-prints a document with every float in fixed 6-decimal form so
/// that output files diff bit-exactly.
std::string dump_fixed(const nlohmann::ordered_json& doc);

}  // namespace uapp::tools
