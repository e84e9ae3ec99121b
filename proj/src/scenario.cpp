#include "mqm/scenario.hpp"

#include "mqm/evolution.hpp"
#include "mqm/gaussian.hpp"
#include "mqm/preparation.hpp"
#include "mqm/tomography.hpp"
#include "mqm/verification.hpp"
#include "mqm/wiener_hopf.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace mqm {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// config reading

namespace {

std::string where(const std::string& src, const toml::source_region& r)
{
    return src + ":" + std::to_string(r.begin.line);
}

class TableReader {
public:
    TableReader(const toml::table& t, std::string name, std::string src)
        : t_(t), name_(std::move(name)), src_(std::move(src))
    {
    }

    bool has(const std::string& key) const { return t_.contains(key); }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        const toml::node* n = t_.get(key);
        const std::string loc = n ? where(src_, n->source()) : where(src_, t_.source());
        throw ValidationError(loc + ": [" + name_ + "]." + key + ": " + msg);
    }

    double number(const std::string& key, double fallback)
    {
        used_.insert(key);
        const toml::node* n = t_.get(key);
        if (!n) return fallback;
        if (auto v = n->value<double>(); v && (n->is_integer() || n->is_floating_point())) return *v;
        fail(key, "expected a number");
    }

    int integer(const std::string& key, int fallback)
    {
        used_.insert(key);
        const toml::node* n = t_.get(key);
        if (!n) return fallback;
        if (auto v = n->value<int64_t>(); v && n->is_integer()) return static_cast<int>(*v);
        fail(key, "expected an integer");
    }

    bool boolean(const std::string& key, bool fallback)
    {
        used_.insert(key);
        const toml::node* n = t_.get(key);
        if (!n) return fallback;
        if (auto v = n->value<bool>()) return *v;
        fail(key, "expected true or false");
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        used_.insert(key);
        const toml::node* n = t_.get(key);
        if (!n) return fallback;
        if (auto v = n->value<std::string>()) return *v;
        fail(key, "expected a string");
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback)
    {
        used_.insert(key);
        const toml::node* n = t_.get(key);
        if (!n) return fallback;
        const toml::array* a = n->as_array();
        if (!a) fail(key, "expected an array of numbers");
        std::vector<double> out;
        for (const toml::node& e : *a) {
            if (!(e.is_integer() || e.is_floating_point())) fail(key, "expected an array of numbers");
            out.push_back(*e.value<double>());
        }
        return out;
    }

    std::vector<std::string> strings(const std::string& key)
    {
        used_.insert(key);
        const toml::node* n = t_.get(key);
        if (!n) return {};
        const toml::array* a = n->as_array();
        if (!a) fail(key, "expected an array of strings");
        std::vector<std::string> out;
        for (const toml::node& e : *a) {
            if (!e.is_string()) fail(key, "expected an array of strings");
            out.push_back(*e.value<std::string>());
        }
        return out;
    }

    void mark(const std::string& key) { used_.insert(key); }

    // Rejects keys that were never read.
    void finish() const
    {
        for (auto&& [k, v] : t_) {
            const std::string key(k.str());
            if (!used_.count(key)) {
                (void)v;
                fail(key, "unknown key");
            }
        }
    }

private:
    const toml::table& t_;
    std::string name_;
    std::string src_;
    std::set<std::string> used_;
};

const toml::table* subtable(const toml::table& root, const std::string& key, const std::string& src)
{
    const toml::node* n = root.get(key);
    if (!n) return nullptr;
    if (!n->is_table()) throw ValidationError(where(src, n->source()) + ": [" + key + "]: expected a table");
    return n->as_table();
}

// Budget keys shared by [budget] and [modes.*]. Frequencies in Hz, damping in 1/s.
NoiseBudget read_budget(TableReader& r, const NoiseBudget& base)
{
    NoiseBudget b = base;
    b.mass = r.number("mass_kg", b.mass);
    const double fq = r.number("omega_q_hz", b.omega_q / constants::two_pi);
    b.omega_q = hz_to_rad(fq);
    b.omega_m = hz_to_rad(r.number("omega_m_hz", b.omega_m / constants::two_pi));
    b.gamma_m = r.number("gamma_m_per_s", b.gamma_m);
    if (r.has("omega_f_hz") && r.has("zeta_f")) r.fail("zeta_f", "give either omega_f_hz or zeta_f, not both");
    if (r.has("omega_x_hz") && r.has("zeta_x")) r.fail("zeta_x", "give either omega_x_hz or zeta_x, not both");
    if (r.has("zeta_f"))
        b.omega_f = r.number("zeta_f", 0) * b.omega_q;
    else
        b.omega_f = hz_to_rad(r.number("omega_f_hz", b.omega_f / constants::two_pi));
    if (r.has("zeta_x")) {
        const double zx = r.number("zeta_x", 0);
        if (zx < 0) r.fail("zeta_x", "must be >= 0");
        b.omega_x = zx > 0 ? b.omega_q / zx : std::numeric_limits<double>::infinity();
    } else if (r.has("omega_x_hz")) {
        b.omega_x = hz_to_rad(r.number("omega_x_hz", 0));
    }
    r.mark("omega_f_hz");
    r.mark("omega_x_hz");
    b.eta = r.number("eta", b.eta);
    b.temperature = r.number("temperature_k", b.temperature);
    return b;
}

template <class F>
auto with_context(const std::string& ctx, F&& f)
{
    try {
        return f();
    } catch (const LookupError& e) {
        throw LookupError(ctx + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(ctx + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(ctx + ": " + e.what());
    }
}

} // namespace

bool Scenario::has_stage(const std::string& s) const
{
    return std::find(stages.begin(), stages.end(), s) != stages.end();
}

void Scenario::validate() const
{
    if (stages.empty()) throw ValidationError("scenario '" + name + "': stage list is empty");
    std::set<std::string> seen;
    for (const auto& st : stages) {
        if (std::find(known_stages().begin(), known_stages().end(), st) == known_stages().end())
            throw ValidationError("scenario '" + name + "': unknown stage '" + st + "'");
        if (!seen.insert(st).second) throw ValidationError("scenario '" + name + "': stage '" + st + "' listed twice");
    }
    if (has_stage("evolution") && !has_stage("preparation"))
        throw ValidationError("scenario '" + name + "': evolution requires the preparation stage");
    if (has_stage("verification") && !has_stage("preparation"))
        throw ValidationError("scenario '" + name + "': verification requires the preparation stage");
    if (has_stage("preparation") || has_stage("verification")) budget.validate();
    for (double t : tau_e)
        if (!(t >= 0) || !std::isfinite(t)) throw ValidationError("scenario: tau_e_s entries must be finite and >= 0");
    if (filters != "closed_form" && filters != "wiener_hopf" && filters != "both")
        throw ValidationError("scenario: filters must be closed_form, wiener_hopf or both");
    if (!(grid_scale > 0)) throw ValidationError("scenario: grid_scale must be positive");
    if (has_stage("verification") && zetas.empty()) throw ValidationError("scenario: zeta_rad is empty");
    if (has_stage("tomography")) {
        if (!(tomography.half_width > 0) || tomography.points < 3)
            throw ValidationError("tomography: need half_width > 0 and points >= 3");
        for (double v : tomography.v_add_heisenberg)
            if (!(v >= 0)) throw ValidationError("tomography: v_add_heisenberg entries must be >= 0");
    }
    if (has_stage("entanglement")) {
        const auto& e = entanglement;
        if (e.common.has_value() != e.differential.has_value())
            throw ValidationError("entanglement: give both [modes.common] and [modes.differential] or neither");
        if (!e.common && e.omega_f_hz_sweep.empty()) throw ValidationError("entanglement: omega_f_hz_sweep is empty");
        if (!(e.tau_e_max_tau_q > 0) || e.points < 2)
            throw ValidationError("entanglement: need tau_e_max_tau_q > 0 and points >= 2");
        if (e.common) {
            e.common->budget.validate();
            e.differential->budget.validate();
        }
    }
    if (has_stage("gravity")) gravity.validate();
}

Scenario parse_scenario(const std::string& text, const std::string& src)
{
    toml::table root;
    try {
        root = toml::parse(text, src);
    } catch (const toml::parse_error& e) {
        throw ValidationError(where(src, e.source()) + ": " + std::string(e.description()));
    }
    Scenario s;
    static const std::set<std::string> tables{"scenario", "budget", "tomography", "entanglement", "gravity", "modes"};
    for (auto&& [k, v] : root) {
        if (!tables.count(std::string(k.str())))
            throw ValidationError(where(src, v.source()) + ": unknown table or key '" + std::string(k.str()) + "'");
    }

    if (const toml::table* t = subtable(root, "scenario", src)) {
        TableReader r(*t, "scenario", src);
        s.name = r.string("name", s.name);
        s.stages = r.strings("stages");
        s.tau_e = r.numbers("tau_e_s", {});
        s.zetas = r.numbers("zeta_rad", s.zetas);
        s.filters = r.string("filters", s.filters);
        s.grid_scale = r.number("grid_scale", s.grid_scale);
        s.squeeze_sweep_db = r.numbers("squeeze_sweep_db", {});
        s.ellipse_squeeze_db = r.numbers("ellipse_squeeze_db", {});
        r.finish();
    } else {
        throw ValidationError(src + ": missing [scenario] table");
    }

    if (const toml::table* t = subtable(root, "budget", src)) {
        TableReader r(*t, "budget", src);
        NoiseBudget base;
        base.mass = 10.0;
        base.omega_q = hz_to_rad(100.0);
        s.budget = read_budget(r, base);
        s.budget.q = squeeze_q_from_db(r.number("squeeze_db", 0.0));
        r.finish();
    }

    if (const toml::table* t = subtable(root, "tomography", src)) {
        TableReader r(*t, "tomography", src);
        auto& tm = s.tomography;
        tm.half_width = r.number("half_width", tm.half_width);
        tm.points = r.integer("points", tm.points);
        tm.v_add_heisenberg = r.numbers("v_add_heisenberg", tm.v_add_heisenberg);
        tm.use_budget_v_add = r.boolean("use_budget_v_add", tm.use_budget_v_add);
        tm.emit_grid = r.boolean("emit_grid", tm.emit_grid);
        r.finish();
    }

    if (const toml::table* t = subtable(root, "entanglement", src)) {
        TableReader r(*t, "entanglement", src);
        auto& e = s.entanglement;
        e.omega_f_hz_sweep = r.numbers("omega_f_hz_sweep", e.omega_f_hz_sweep);
        e.omega_q_hz = r.number("omega_q_hz", e.omega_q_hz);
        e.mirror_mass_kg = r.number("mirror_mass_kg", e.mirror_mass_kg);
        e.squeeze_db = r.number("squeeze_db", e.squeeze_db);
        e.tau_e_max_tau_q = r.number("tau_e_max_tau_q", e.tau_e_max_tau_q);
        e.points = r.integer("points", e.points);
        r.finish();
    }

    if (const toml::table* t = subtable(root, "gravity", src)) {
        TableReader r(*t, "gravity", src);
        auto& g = s.gravity;
        g.density = r.number("density_kg_m3", g.density);
        g.separation = r.number("separation_m", g.separation);
        g.mass = r.number("mass_kg", g.mass);
        g.omega_q = hz_to_rad(r.number("omega_q_hz", g.omega_q / constants::two_pi));
        g.spread = r.number("spread_m", g.spread);
        r.finish();
    }

    if (const toml::table* modes = subtable(root, "modes", src)) {
        for (auto&& [k, v] : *modes) {
            const std::string key(k.str());
            if (key != "common" && key != "differential")
                throw ValidationError(where(src, v.source()) + ": [modes]." + key + ": expected common or differential");
            if (!v.is_table()) throw ValidationError(where(src, v.source()) + ": [modes." + key + "]: expected a table");
            TableReader r(*v.as_table(), "modes." + key, src);
            ModeSchedule m;
            NoiseBudget base;
            base.mass = s.entanglement.mirror_mass_kg / 2.0;
            base.omega_q = hz_to_rad(s.entanglement.omega_q_hz);
            m.budget = read_budget(r, base);
            m.q_prepare = squeeze_q_from_db(r.number("prepare_squeeze_db", 0.0));
            m.q_verify = squeeze_q_from_db(r.number("verify_squeeze_db", 0.0));
            r.finish();
            (key == "common" ? s.entanglement.common : s.entanglement.differential) = m;
        }
    }

    s.validate();
    return s;
}

Scenario load_scenario(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.string());
}

// ---------------------------------------------------------------------------
// presets

std::vector<std::string> preset_names() { return {"fig4", "fig6", "fig7", "fig9", "tauG"}; }

Scenario preset(const std::string& name)
{
    Scenario s;
    s.name = name;
    const NoiseBudget ref = NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.2, 0.2, 0.01, 0.0);
    if (name == "fig4") {
        s.stages = {"tomography"};
        s.tomography.v_add_heisenberg = {0.0, 0.25, 0.5};
    } else if (name == "fig6") {
        s.stages = {"preparation", "verification"};
        s.budget = ref;
        s.zetas = {0.0, constants::pi / 2};
        s.filters = "both";
    } else if (name == "fig7") {
        s.stages = {"preparation", "verification"};
        s.budget = ref;
        s.zetas = {0.0, constants::pi / 2};
        s.ellipse_squeeze_db = {0.0, 10.0};
        for (int k = 0; k <= 20; ++k) s.squeeze_sweep_db.push_back(k);
    } else if (name == "fig9") {
        s.stages = {"entanglement", "gravity"};
        s.entanglement.omega_f_hz_sweep = {10.0, 20.0};
    } else if (name == "tauG") {
        s.stages = {"gravity"};
    } else {
        std::string list;
        for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
        throw LookupError("unknown preset '" + name + "' (available: " + list + ")");
    }
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// emitters

namespace {

std::string num(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// RFC 4180: CRLF line ends, fields with comma, quote or line break quoted.
class CsvWriter {
public:
    CsvWriter(const fs::path& p, const std::vector<std::string>& header) : out_(p, std::ios::binary)
    {
        if (!out_) throw ValidationError("cannot write " + p.string());
        row(header);
    }
    void row(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << quote(fields[i]);
        }
        out_ << "\r\n";
    }
    void row(const std::vector<double>& v)
    {
        std::vector<std::string> f;
        f.reserve(v.size());
        for (double x : v) f.push_back(num(x));
        row(f);
    }

    static std::string quote(const std::string& s)
    {
        if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }

private:
    std::ofstream out_;
};

void write_json(const fs::path& p, const json& j)
{
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + p.string());
    out << j.dump(2) << "\n";
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json budget_json(const NoiseBudget& b)
{
    return {{"mass_kg", b.mass},
            {"omega_q_hz", b.omega_q / constants::two_pi},
            {"omega_m_hz", b.omega_m / constants::two_pi},
            {"gamma_m_per_s", b.gamma_m},
            {"omega_f_hz", b.omega_f / constants::two_pi},
            {"omega_x_hz", finite_or_null(b.omega_x / constants::two_pi)},
            {"eta", b.eta},
            {"squeeze_q", b.q},
            {"squeeze_db", 10.0 * std::log10(std::exp(2.0 * b.q))},
            {"temperature_k", b.temperature}};
}

struct Summary {
    json body = json::object();
    json residuals = json::array();
    std::vector<std::string> failures;
    std::vector<std::string> warnings;

    void residual(const std::string& name, double value, double tol)
    {
        const bool ok = std::isfinite(value) && value <= tol;
        residuals.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"passed", ok}});
        if (!ok) failures.push_back(name);
    }
    void warn(const std::string& stage, const std::vector<std::string>& w)
    {
        for (const auto& s : w) warnings.push_back(stage + ": " + s);
    }
};

double max_rel(const Mat2& a, const Mat2& b) { return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff(); }

json matrix_block(const Mat2& cov, const DerivedScales& d)
{
    const Mat2 n = normalized(cov, d);
    return {{"cov_si", to_json(cov)},
            {"cov_normalized", to_json(n)},
            {"ellipse_normalized", to_json(ellipse_of(Vec2::Zero(), n))},
            {"u", uncertainty_product(cov)}};
}

struct PipelineState {
    std::optional<ConditionalState> prepared;
    std::vector<std::pair<double, Mat2>> evolved;  // (tau, V(tau))
    std::optional<AddedNoise> added;
    double max_survival = -1;  // < 0: entanglement not run
};

void run_preparation(const Scenario& s, const fs::path& out, Summary& sum, PipelineState& ps)
{
    const NoiseBudget& b = s.budget;
    const DerivedScales d = derive(b);
    const ConditionalState cs = conditional_covariance(b);
    const ConditionalState ric = riccati_steady_state(b);
    ps.prepared = cs;
    sum.warn("preparation", cs.warnings);

    const double u0 = uncertainty_product(cs.state.cov);
    sum.residual("preparation.uncertainty_below_one", std::max(0.0, 1.0 - u0), 1e-9);
    sum.residual("preparation.riccati_residual",
                 filter_riccati_residual(ric.state.cov, b.mass, b.omega_m, b.gamma_m, d.s_f_th + d.s_f_ba,
                                         d.s_x_th + d.s_x_sh),
                 1e-9);
    // the densities imply their own N_x, N_F; compare the Kalman solution with the formula at those values
    const EffectiveN en = riccati_effective_n(b);
    if (b.omega_m == 0 && b.gamma_m == 0)
        sum.residual("preparation.riccati_vs_closed_form",
                     max_rel(ric.state.cov, free_mass_conditional_cov(b.mass, std::exp(b.q) * b.omega_q, en.n_f, en.n_x)),
                     1e-6);

    const json u0j = {{"exact", u0}, {"order_of_magnitude", d.n_x * d.n_f}};
    json j = {{"budget", budget_json(b)},
              {"derived",
               {{"zeta_f", d.zeta_f},
                {"zeta_x", d.zeta_x},
                {"n_f", d.n_f},
                {"n_x", d.n_x},
                {"dx_q_m", d.dx_q},
                {"dp_q_kg_m_per_s", d.dp_q},
                {"tau_q_s", d.tau_q},
                {"tau_f_s", finite_or_null(d.tau_f)},
                {"lambda", d.lambda},
                {"zeta_f_eff", d.zeta_f_eff},
                {"chi", d.chi}}},
              {"closed_form", matrix_block(cs.state.cov, d)},
              {"riccati", matrix_block(ric.state.cov, d)},
              {"riccati_effective_n", {{"n_f", en.n_f}, {"n_x", en.n_x}}},
              {"u0", u0j},
              {"warnings", cs.warnings}};
    write_json(out / "preparation.json", j);
    sum.body["u0"] = u0j;
}

void run_evolution(const Scenario& s, const fs::path& out, Summary& sum, PipelineState& ps)
{
    const NoiseBudget& b = s.budget;
    const DerivedScales d = derive(b);
    const GaussianState s0 = ps.prepared->state;
    CsvWriter csv(out / "evolution.csv", {"tau_e_s", "omega_m_tau", "vxx_norm", "vxp_norm", "vpp_norm", "u",
                                          "u_thermal", "u_growth_quadratic", "u_growth_linear"});
    json rows = json::array();
    std::set<std::string> seen_warnings;
    for (double tau : s.tau_e) {
        const EvolutionResult r = evolve_exact(s0, b, tau);
        for (const auto& w : r.warnings)
            if (seen_warnings.insert(w).second) sum.warn("evolution", {w});
        const Mat2 n = normalized(r.state.cov, d);
        const double quad = leading_order_u_growth(s0.cov, b, tau), lin = linear_u_growth(s0.cov, b, tau);
        csv.row(std::vector<double>{tau, r.phase, n(0, 0), n(0, 1), n(1, 1), r.u, r.u_thermal, quad, lin});
        rows.push_back({{"tau_e_s", tau}, {"u", r.u}, {"growth_quadratic", quad}, {"growth_linear", lin}});
        ps.evolved.emplace_back(tau, r.state.cov);
    }
    if (!s.tau_e.empty()) {
        const double t = *std::max_element(s.tau_e.begin(), s.tau_e.end());
        if (t > 0) {
            const Mat2 half = evolve_exact(evolve_exact(s0, b, t / 2).state, b, t / 2).state.cov;
            const Mat2 full = evolve_exact(s0, b, t).state.cov;
            sum.residual("evolution.semigroup", max_rel(normalized(half, d), normalized(full, d)), 1e-10);
        }
    }
    sum.body["u_tau_e"] = rows;
}

void run_verification(const Scenario& s, const fs::path& out, Summary& sum, PipelineState& ps)
{
    const NoiseBudget& b = s.budget;
    const DerivedScales d = derive(b);
    json j;
    j["budget"] = budget_json(b);

    const AddedNoise an = added_noise_covariance(b);
    ps.added = an;
    auto ellipse_entry = [&](const NoiseBudget& bb, const AddedNoise& a) {
        const DerivedScales dd = derive(bb);
        const Mat2 n = normalized(a.cov, dd);
        return json{{"squeeze_db", 10.0 * std::log10(std::exp(2.0 * bb.q))},
                    {"u_add", a.u_add},
                    {"lambda", a.lambda},
                    {"zeta_f_eff", a.zeta_f_eff},
                    {"chi", a.chi},
                    {"v_add_normalized", to_json(n)},
                    {"ellipse_normalized", to_json(ellipse_of(Vec2::Zero(), n))}};
    };
    j["added_noise"] = ellipse_entry(b, an);
    json ellipses = json::array();
    json u_add_by_sq = json::array();
    for (double db : s.ellipse_squeeze_db) {
        NoiseBudget bb = b;
        bb.q = squeeze_q_from_db(db);
        const AddedNoise a = added_noise_covariance(bb);
        ellipses.push_back(ellipse_entry(bb, a));
        u_add_by_sq.push_back({{"squeeze_db", db}, {"u_add", a.u_add}});
    }
    j["ellipses"] = ellipses;

    const bool free_mass = b.omega_m == 0 && b.gamma_m == 0;
    const bool want_cf = s.filters != "wiener_hopf", want_wh = s.filters != "closed_form";
    if (want_cf && !free_mass)
        sum.warnings.push_back("verification: closed-form filters assume a free mass; omega_m or gamma_m is nonzero");

    const TimeGrid grid = default_filter_grid(b, s.grid_scale);
    const double tau_v = 1.0 / (b.omega_q * d.chi);
    json filters = json::array();
    json wh_solutions = json::array();
    auto emit = [&](const FilterPair& f, const std::string& file) {
        CsvWriter csv(out / file, {"t_s", "g1_per_s", "g2_per_s", "weight_per_s", "lo_phase_rad"});
        const auto w = f.weight();
        const auto ph = f.local_oscillator_phase();
        for (std::size_t i = 0; i < f.t.size(); ++i) csv.row(std::vector<double>{f.t[i], f.g1[i], f.g2[i], w[i], ph[i]});
    };
    for (std::size_t k = 0; k < s.zetas.size(); ++k) {
        const double zeta = s.zetas[k];
        const std::string tag = "zeta" + std::to_string(k);
        if (want_cf) {
            const FilterPair f = closed_form_filters(b, zeta, grid);
            const std::string file = "filters_closed_form_" + tag + ".csv";
            emit(f, file);
            const Normalization n = filter_normalization(f, b);
            sum.residual("verification.normalization.closed_form." + tag,
                         std::max(std::abs(n.c1 - std::cos(zeta)), std::abs(n.c2 - std::sin(zeta))), 1e-6);
            json fj = {{"zeta_rad", zeta},
                       {"source", "closed_form"},
                       {"file", file},
                       {"normalization", {{"g2_f1", n.c1}, {"g2_f2", n.c2}}},
                       {"fitted_verification_time_s", fitted_verification_time(f)},
                       {"expected_verification_time_s", tau_v}};
            if (b.eta == 0) {
                const double r = bae_residual(f, b);
                fj["bae_residual"] = r;
                sum.residual("verification.bae_residual." + tag, r, 1e-3);
            }
            filters.push_back(fj);
        }
        if (want_wh) {
            const WHSolution w = solve_optimal_filters(b, zeta);
            sum.warn("verification", w.warnings);
            const FilterPair f = w.filters(grid);
            const std::string file = "filters_wiener_hopf_" + tag + ".csv";
            emit(f, file);
            const Normalization n = filter_normalization(f, b);
            const WHTimeResidual tr = time_domain_residual(w);
            sum.residual("verification.wiener_hopf.frequency_residual." + tag, w.frequency_residual, 1e-9);
            sum.residual("verification.wiener_hopf.bae_time_residual." + tag, tr.bae, 1e-6);
            sum.residual("verification.wiener_hopf.variational_time_residual." + tag, tr.variational, 1e-6);
            if (free_mass)
                sum.residual("verification.wiener_hopf.v_add_vs_closed_form." + tag,
                             max_rel(w.v_add_norm, normalized(an.cov, d)), 1e-4);
            filters.push_back({{"zeta_rad", zeta},
                               {"source", "wiener_hopf"},
                               {"file", file},
                               {"normalization", {{"g2_f1", n.c1}, {"g2_f2", n.c2}}},
                               {"truncation_error", w.truncation_error(grid.length())},
                               {"u_add", w.u_add}});
            wh_solutions.push_back(w.to_json());
        }
    }
    j["filters"] = filters;
    if (!wh_solutions.empty()) j["wiener_hopf"] = wh_solutions;

    if (!s.squeeze_sweep_db.empty()) {
        std::vector<double> qs;
        for (double db : s.squeeze_sweep_db) qs.push_back(squeeze_q_from_db(db));
        const SqueezingTradeoff t = squeezing_tradeoff(b, qs);
        CsvWriter csv(out / "squeezing_tradeoff.csv",
                      {"squeeze_db", "q", "u_add", "no_bae_shot", "no_bae_sensing"});
        for (std::size_t i = 0; i < qs.size(); ++i)
            csv.row(std::vector<double>{s.squeeze_sweep_db[i], t.q[i], t.u_add[i], t.no_bae_shot[i],
                                        t.no_bae_sensing[i]});
        j["tradeoff"] = {{"file", "squeezing_tradeoff.csv"},
                         {"limit", t.limit},
                         {"limit_estimate", t.limit_estimate}};
    }

    // reconstructed state: prepared (and evolved) covariance plus V^add
    json recon = json::array();
    if (ps.evolved.empty()) {
        const Mat2 v = ps.prepared->state.cov + an.cov;
        recon.push_back({{"tau_e_s", 0.0}, {"u_recon", uncertainty_product(v)}});
    }
    for (const auto& [tau, v] : ps.evolved)
        recon.push_back({{"tau_e_s", tau}, {"u_recon", uncertainty_product(Mat2(v + an.cov))}});
    j["reconstruction"] = recon;
    write_json(out / "verification.json", j);

    sum.body["u_add"] = an.u_add;
    if (!u_add_by_sq.empty()) sum.body["u_add_by_squeeze"] = u_add_by_sq;
    sum.body["u_recon"] = recon;
}

void run_tomography(const Scenario& s, const fs::path& out, Summary& sum, PipelineState& ps)
{
    const auto& t = s.tomography;
    const PhaseSpaceGrid w1 = sample(FockWigner(1), t.half_width, t.points);
    sum.residual("tomography.source_normalization", std::abs(w1.integral() - 1.0), 1e-6);
    const PhaseSpaceGrid q = q_function(w1);
    sum.residual("tomography.q_function_negativity", std::max(0.0, -q.min_value()), 1e-9);

    std::vector<std::string> labels;
    std::vector<PhaseSpaceGrid> grids;
    json cases = json::array();
    auto add_case = [&](const std::string& label, const Mat2& v, double level) {
        PhaseSpaceGrid g = reconstruct(w1, v);
        json c = {{"label", label},
                  {"v_add_grid", to_json(v)},
                  {"negativity_volume", negativity_volume(g)},
                  {"w_origin", g.at(g.n / 2, g.n / 2)},
                  {"min", g.min_value()},
                  {"max", g.max_value()},
                  {"integral", g.integral()}};
        if (level >= 0) c["v_add_heisenberg"] = level;
        cases.push_back(c);
        labels.push_back(label);
        grids.push_back(std::move(g));
    };
    for (double level : t.v_add_heisenberg) add_case("w_" + num(level) + "H", 0.5 * level * Mat2::Identity(), level);
    if (t.use_budget_v_add && ps.added) {
        try {
            add_case("w_budget", to_grid_units(ps.added->cov, derive(s.budget)), -1);
        } catch (const ValidationError& e) {
            sum.warnings.push_back(std::string("tomography: budget V_add skipped: ") + e.what());
        }
    }

    std::vector<std::string> header{"x_grid", "x_display"};
    header.insert(header.end(), labels.begin(), labels.end());
    CsvWriter csv(out / "tomography_slice.csv", header);
    std::vector<std::vector<double>> slices;
    for (const auto& g : grids) slices.push_back(g.slice_p0());
    for (int i = 0; i < w1.n; ++i) {
        std::vector<double> row{w1.coord(i), display_per_grid * w1.coord(i)};
        for (const auto& sl : slices) row.push_back(sl[i]);
        csv.row(row);
    }
    if (t.emit_grid) {
        json g = json::array();
        for (std::size_t k = 0; k < grids.size(); ++k) {
            json e = grids[k].to_json();
            e["label"] = labels[k];
            g.push_back(e);
        }
        write_json(out / "tomography_grid.json", g);
    }
    sum.body["tomography"] = cases;
}

void run_entanglement(const Scenario& s, const fs::path& out, Summary& sum, PipelineState& ps)
{
    const auto& e = s.entanglement;
    struct Case {
        std::string label;
        double omega_f_hz;
        ModeSchedule c, d;
    };
    std::vector<Case> cases;
    if (e.common) {
        cases.push_back({"custom", e.common->budget.omega_f / constants::two_pi, *e.common, *e.differential});
    } else {
        for (double f : e.omega_f_hz_sweep) {
            const auto [c, d] = detector_mode_schedules(f, e.omega_q_hz, e.mirror_mass_kg, e.squeeze_db);
            cases.push_back({"omega_f_" + num(f) + "hz", f, c, d});
        }
    }
    CsvWriter csv(out / "entanglement.csv", {"label", "omega_f_hz", "tau_e_s", "tau_e_over_tau_q", "e_n"});
    json curves = json::array();
    double best = 0;
    for (const auto& cs : cases) {
        const double tq = 1.0 / cs.c.budget.omega_q;
        std::vector<double> taus;
        for (int k = 0; k < e.points; ++k) taus.push_back(e.tau_e_max_tau_q * tq * k / (e.points - 1));
        const SurvivalCurve curve = survival_curve(cs.c, cs.d, taus);
        for (std::size_t k = 0; k < taus.size(); ++k)
            csv.row({cs.label, num(cs.omega_f_hz), num(taus[k]), num(taus[k] / tq), num(curve.e_n[k])});

        const BipartiteState st = assemble_bipartite(total_covariance(cs.c, 0.0), total_covariance(cs.d, 0.0));
        sum.residual("entanglement.sigma_minus_vs_partial_transpose." + cs.label,
                     std::abs(sigma_minus(st) - partial_transpose_sigma_minus(st.cov)) / (constants::hbar / 2), 1e-9);

        json cj = curve.to_json();
        cj["label"] = cs.label;
        cj["omega_f_hz"] = cs.omega_f_hz;
        cj["e_n_0"] = curve.e_n.front();
        cj["survival_over_tau_q"] = finite_or_null(curve.survival_time / tq);
        curves.push_back(cj);
        best = std::max(best, curve.survival_time);
    }
    ps.max_survival = best;
    sum.body["e_n"] = curves;
}

void run_gravity(const Scenario& s, Summary& sum, PipelineState& ps)
{
    const GravityTimescales t = gravity_timescales(s.gravity);
    sum.body["tau_g"] = {{"tau_g_a_s", t.tau_a}, {"tau_g_b_s", t.tau_b}};
    double survival = ps.max_survival;
    if (survival < 0) {
        sum.warnings.push_back("gravity: entanglement stage not run, survival time unknown");
        survival = 0;
    }
    sum.body["testability"] = testability_report(s.gravity, survival).to_json();
}

} // namespace

json Scenario::to_json() const
{
    json tm = {{"half_width", tomography.half_width},
               {"points", tomography.points},
               {"v_add_heisenberg", tomography.v_add_heisenberg},
               {"use_budget_v_add", tomography.use_budget_v_add},
               {"emit_grid", tomography.emit_grid}};
    json en = {{"omega_f_hz_sweep", entanglement.omega_f_hz_sweep},
               {"omega_q_hz", entanglement.omega_q_hz},
               {"mirror_mass_kg", entanglement.mirror_mass_kg},
               {"squeeze_db", entanglement.squeeze_db},
               {"tau_e_max_tau_q", entanglement.tau_e_max_tau_q},
               {"points", entanglement.points}};
    if (entanglement.common) {
        auto mode = [](const ModeSchedule& m) {
            return json{{"budget", budget_json(m.budget)},
                        {"prepare_squeeze_db", 10.0 * std::log10(std::exp(2.0 * m.q_prepare))},
                        {"verify_squeeze_db", 10.0 * std::log10(std::exp(2.0 * m.q_verify))}};
        };
        en["modes"] = {{"common", mode(*entanglement.common)}, {"differential", mode(*entanglement.differential)}};
    }
    return {{"name", name},
            {"stages", stages},
            {"budget", budget_json(budget)},
            {"tau_e_s", tau_e},
            {"zeta_rad", zetas},
            {"filters", filters},
            {"grid_scale", grid_scale},
            {"squeeze_sweep_db", squeeze_sweep_db},
            {"ellipse_squeeze_db", ellipse_squeeze_db},
            {"tomography", tm},
            {"entanglement", en},
            {"gravity",
             {{"density_kg_m3", gravity.density},
              {"separation_m", gravity.separation},
              {"mass_kg", gravity.mass},
              {"omega_q_hz", gravity.omega_q / constants::two_pi},
              {"spread_m", gravity.spread}}}};
}

json run_scenario(const Scenario& s, const fs::path& out)
{
    s.validate();
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ValidationError("cannot create output directory " + out.string() + ": " + ec.message());

    Summary sum;
    PipelineState ps;
    // fixed pipeline order, independent of how the stages were listed
    if (s.has_stage("preparation")) with_context("preparation", [&] { run_preparation(s, out, sum, ps); });
    if (s.has_stage("evolution")) with_context("evolution", [&] { run_evolution(s, out, sum, ps); });
    if (s.has_stage("verification")) with_context("verification", [&] { run_verification(s, out, sum, ps); });
    if (s.has_stage("tomography")) with_context("tomography", [&] { run_tomography(s, out, sum, ps); });
    if (s.has_stage("entanglement")) with_context("entanglement", [&] { run_entanglement(s, out, sum, ps); });
    if (s.has_stage("gravity")) with_context("gravity", [&] { run_gravity(s, sum, ps); });

    json j = sum.body;
    j["scenario"] = s.to_json();
    j["residuals"] = {{"checks", sum.residuals}, {"failures", sum.failures}, {"passed", sum.failures.empty()}};
    j["warnings"] = sum.warnings;
    write_json(out / "summary.json", j);
    return j;
}

} // namespace mqm
