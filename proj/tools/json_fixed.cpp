#include "json_fixed.hpp"

#include <algorithm>

#include "uapp/io.hpp"

namespace uapp::tools {

namespace {

void emit(const nlohmann::ordered_json& v, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& item : v.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + nlohmann::ordered_json(item.key()).dump() + ": ";
      emit(item.value(), depth + 1, out);
    }
    out += "\n" + close_pad + "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    const bool flat = std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_primitive(); });
    if (flat) {
      out += "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        emit(v[i], depth + 1, out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      emit(v[i], depth + 1, out);
    }
    out += "\n" + close_pad + "]";
  } else if (v.is_number_float()) {
    out += format_fixed(v.get<double>());
  } else {
    out += v.dump();
  }
}

}  // namespace

std::string dump_fixed(const nlohmann::ordered_json& doc) {
  std::string out;
  emit(doc, 0, out);
  out += "\n";
  return out;
}

}  // namespace uapp::tools
