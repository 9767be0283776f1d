#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace poth {

/// Pretty-printed JSON with sorted keys and every float written with %.17g,
/// so equal values always produce identical bytes.
std::string canonical_json(const nlohmann::json& v);

}  // namespace poth
