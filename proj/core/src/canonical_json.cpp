#include "canonical_json.hpp"

#include <algorithm>
#include <sstream>

#include "poth/io.hpp"

namespace poth {

using nlohmann::json;

namespace {

bool is_scalar(const json& v) { return !v.is_object() && !v.is_array(); }

void write_canonical(std::ostringstream& out, const json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
  if (v.is_number_float()) {
    out << format_number(v.get<double>());
  } else if (v.is_object()) {
    if (v.empty()) {
      out << "{}";
      return;
    }
    // nlohmann's default object is an ordered std::map, so keys come out sorted.
    out << "{\n";
    bool first = true;
    for (const auto& [key, value] : v.items()) {
      if (!first) out << ",\n";
      first = false;
      out << inner << json(key).dump() << ": ";
      write_canonical(out, value, indent + 2);
    }
    out << "\n" << pad << "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out << "[]";
      return;
    }
    const bool flat = std::all_of(v.begin(), v.end(), is_scalar);
    out << (flat ? "[" : "[\n");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) out << (flat ? ", " : ",\n");
      if (!flat) out << inner;
      write_canonical(out, v[i], indent + 2);
    }
    if (!flat) out << "\n" << pad;
    out << "]";
  } else {
    out << v.dump();
  }
}

}  // namespace

std::string canonical_json(const json& v) {
  std::ostringstream out;
  write_canonical(out, v, 0);
  out << "\n";
  return out.str();
}

}  // namespace poth
