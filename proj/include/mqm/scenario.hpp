#pragma once

#include "mqm/entanglement.hpp"
#include "mqm/errors.hpp"
#include "mqm/params.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mqm {

struct TomographySettings {
    double half_width = 5.0;  // grid units
    int points = 401;
    // isotropic V^add as fractions of the Heisenberg (vacuum) covariance
    std::vector<double> v_add_heisenberg{0.0, 0.25, 0.5};
    // also reconstruct with the budget's V^add when verification runs
    bool use_budget_v_add = true;
    bool emit_grid = false;
};

struct EntanglementSettings {
    std::vector<double> omega_f_hz_sweep{10.0, 20.0};
    double omega_q_hz = 100.0;
    double mirror_mass_kg = 10.0;
    double squeeze_db = 10.0;
    double tau_e_max_tau_q = 20.0;
    int points = 201;
    // explicit per-mode schedules replace the omega_f sweep when both are set
    std::optional<ModeSchedule> common, differential;
};

struct Scenario {
    std::string name = "scenario";
    std::vector<std::string> stages;
    NoiseBudget budget;
    std::vector<double> tau_e;  // s
    std::vector<double> zetas{0.0};
    std::string filters = "closed_form";  // closed_form | wiener_hopf | both
    double grid_scale = 1.0;
    std::vector<double> squeeze_sweep_db;
    std::vector<double> ellipse_squeeze_db;  // empty: the budget's own squeezing
    TomographySettings tomography;
    EntanglementSettings entanglement;
    GravityDecoherenceParams gravity;

    bool has_stage(const std::string& s) const;
    // Stage names known, pipeline order valid, lists sane. Throws ValidationError.
    void validate() const;
    nlohmann::json to_json() const;
};

inline const std::vector<std::string>& known_stages()
{
    static const std::vector<std::string> s{"preparation", "evolution",    "verification",
                                            "tomography",  "entanglement", "gravity"};
    return s;
}

// Config parsing. Errors carry "source:line: [table].key: message".
Scenario parse_scenario(const std::string& toml_text, const std::string& source_name = "config");
Scenario load_scenario(const std::filesystem::path& path);

std::vector<std::string> preset_names();
Scenario preset(const std::string& name);  // LookupError for unknown names

// Runs the pipeline, writes artifacts under out_dir, returns summary.json's content.
nlohmann::json run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

} // namespace mqm
