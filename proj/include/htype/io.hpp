#pragma once

#include <json.hpp>
#include <string>

#include "htype/group.hpp"

namespace htype {

// Schema: {"n": int, "m": int, "J": [[row-major 2n x 2n], ...]}
nlohmann::json group_to_json(const HTypeGroup& G);

// Re-validates through build_custom; throws AxiomViolation on bad input.
HTypeGroup group_from_json(const nlohmann::json& j, double tol = 1e-10);

void save_group(const HTypeGroup& G, const std::string& path);
HTypeGroup load_group(const std::string& path, double tol = 1e-10);

// "heisenberg:n", "quaternionic:k", or a path to a JSON file.
HTypeGroup group_from_spec(const std::string& spec);

}  // namespace htype
