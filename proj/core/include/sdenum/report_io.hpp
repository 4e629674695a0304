#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "sdenum/harness.hpp"

namespace sdenum {

// Shortest round-trip decimal representation (std::to_chars); keeps CSV and
// JSON output byte-deterministic without precision loss.
std::string format_double(double v);

nlohmann::json to_json(const LevelStat& stat);
nlohmann::json to_json(const ConvergenceReport& report);
nlohmann::json to_json(const CompareReport& report);
nlohmann::json to_json(const MomentReport& report);

// Machine outputs. CSV uses a header row, comma separators, LF endings.
std::string convergence_csv(const ConvergenceReport& report);
std::string compare_csv(const CompareReport& report);
std::string moments_csv(const MomentReport& report);

// Human outputs: aligned columns plus the fitted order line.
std::string format_text(const ConvergenceReport& report);
std::string format_text(const CompareReport& report);
std::string format_text(const MomentReport& report);

}  // namespace sdenum
