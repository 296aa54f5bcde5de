#pragma once

// JSON measure files:
//   {"type": "atomic",  "atoms": [[x, w], ...]}
//   {"type": "grid",    "support": [[lo, hi], ...], "x": [...], "density": [...],
//                       "atom0": a, "weights": [...] (optional, one-sided dx)}
//   {"type": "moments", "moments": [m2, m4, ...], "support_radius": r (optional)}
// A grid "hi" of null means +infinity.

#include <filesystem>

#include <json.hpp>

#include "rectfree/measure.hpp"

namespace rectfree {

SymmetricMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const SymmetricMeasure& mu);

SymmetricMeasure load_measure(const std::filesystem::path& path);

}  // namespace rectfree
