#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mqm {

struct CheckResult {
    int id = 0;            // acceptance criterion number, 0 for invariants
    std::string name;
    bool passed = false;
    std::string detail;    // measured values against thresholds
    double seconds = 0;
    nlohmann::json to_json() const;
};

inline constexpr int acceptance_criteria_count = 11;

// Acceptance criterion 1..11. grid_scale refines the filter grids.
CheckResult acceptance_check(int id, double grid_scale = 1.0);
std::vector<CheckResult> acceptance_checks(double grid_scale = 1.0);

// Module invariants beyond the acceptance list (deterministic seeds).
std::vector<CheckResult> invariant_checks();

// "[PASS] 01 name (0.123 s): detail"
std::string format_line(const CheckResult& r);

} // namespace mqm
