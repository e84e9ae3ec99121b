#include "mqm/checks.hpp"
#include "mqm/errors.hpp"
#include "mqm/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

enum Exit { ok = 0, failed = 1, invalid = 2, numerical = 3 };

int report_run(const nlohmann::json& summary, const std::filesystem::path& out)
{
    const auto& res = summary.at("residuals");
    std::cout << "wrote " << (out / "summary.json").string() << "\n";
    for (const auto& w : summary.at("warnings")) std::cout << "warning: " << w.get<std::string>() << "\n";
    if (!res.at("passed").get<bool>()) {
        for (const auto& f : res.at("failures")) std::cerr << "residual check failed: " << f.get<std::string>() << "\n";
        return failed;
    }
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Conditional-state preparation, evolution and verification of a measured oscillator"};
    app.require_subcommand(1);
    std::optional<double> grid_scale;
    app.add_option("--grid-scale", grid_scale, "Refinement factor for filter grids (overrides the config)")
        ->check(CLI::PositiveNumber);

    auto* run = app.add_subcommand("run", "Run a scenario described by a TOML config");
    std::string config;
    std::string run_out = "out";
    run->add_option("config", config, "Config file")->required();
    run->add_option("--out", run_out, "Output directory");

    auto* pre = app.add_subcommand("preset", "Run a named preset scenario");
    std::string name;
    std::string pre_out = "out";
    bool list = false;
    pre->add_option("name", name, "Preset name");
    pre->add_option("--out", pre_out, "Output directory");
    pre->add_flag("--list", list, "List preset names");

    auto* chk = app.add_subcommand("check", "Run the acceptance criteria and module invariants");
    bool json_out = false;
    chk->add_flag("--json", json_out, "Print results as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return invalid;
    }

    try {
        if (*run) {
            mqm::Scenario s = mqm::load_scenario(config);
            if (grid_scale) s.grid_scale = *grid_scale;
            return report_run(mqm::run_scenario(s, run_out), run_out);
        }
        if (*pre) {
            if (list) {
                for (const auto& n : mqm::preset_names()) std::cout << n << "\n";
                return ok;
            }
            if (name.empty()) throw mqm::ValidationError("preset: a name is required (see --list)");
            mqm::Scenario s = mqm::preset(name);
            if (grid_scale) s.grid_scale = *grid_scale;
            return report_run(mqm::run_scenario(s, pre_out), pre_out);
        }
        if (*chk) {
            const double gs = grid_scale.value_or(1.0);
            auto results = mqm::acceptance_checks(gs);
            const auto inv = mqm::invariant_checks();
            results.insert(results.end(), inv.begin(), inv.end());
            bool all = true;
            double total = 0;
            nlohmann::json j = nlohmann::json::array();
            for (const auto& r : results) {
                all = all && r.passed;
                total += r.seconds;
                if (json_out)
                    j.push_back(r.to_json());
                else
                    std::cout << mqm::format_line(r) << "\n";
            }
            if (json_out)
                std::cout << j.dump(2) << "\n";
            else
                std::cout << (all ? "all checks passed" : "some checks FAILED") << " (" << total << " s)\n";
            return all ? ok : failed;
        }
    } catch (const mqm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return invalid;
    } catch (const mqm::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failed;
    }
    return failed;
}
