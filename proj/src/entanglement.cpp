#include "mqm/entanglement.hpp"

#include "mqm/errors.hpp"
#include "mqm/evolution.hpp"
#include "mqm/preparation.hpp"
#include "mqm/verification.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mqm {

namespace {

Mat2 mode_block(const Mat2& a, const Mat2& b, double sign)
{
    Mat2 m;
    m(0, 0) = (a(0, 0) + sign * b(0, 0)) / 4.0;
    m(0, 1) = m(1, 0) = (a(0, 1) + sign * b(0, 1)) / 2.0;
    m(1, 1) = a(1, 1) + sign * b(1, 1);
    return m;
}

// -log2(2 sigma_- / hbar) without the clamp at zero; positive when entangled.
double entanglement_margin(const ModeSchedule& c, const ModeSchedule& d, double tau)
{
    const BipartiteState s = assemble_bipartite(total_covariance(c, tau), total_covariance(d, tau));
    return -std::log2(2.0 * sigma_minus(s) / constants::hbar);
}

} // namespace

BipartiteState assemble_bipartite(const Mat2& vc, const Mat2& vd)
{
    BipartiteState s;
    const Mat2 same = mode_block(vc, vd, 1.0), cross = mode_block(vc, vd, -1.0);
    s.cov.block<2, 2>(0, 0) = same;
    s.cov.block<2, 2>(2, 2) = same;
    s.cov.block<2, 2>(0, 2) = cross;
    s.cov.block<2, 2>(2, 0) = cross;
    Eigen::SelfAdjointEigenSolver<Mat4> es(s.cov);
    const double scale = s.cov.diagonal().cwiseAbs().sum();
    if (es.eigenvalues()(0) < -1e-12 * scale) {
        std::ostringstream os;
        os << "assemble_bipartite: covariance is not PSD, eigenvalues " << es.eigenvalues().transpose();
        throw InvalidCovarianceError(os.str());
    }
    return s;
}

double sigma_minus(const BipartiteState& s)
{
    const double sigma = s.nn().determinant() + s.ee().determinant() - 2.0 * s.ne().determinant();
    const double det = s.cov.determinant();
    double disc = sigma * sigma - 4.0 * det;
    if (disc < 0) {
        if (disc < -1e-12 * sigma * sigma) {
            std::ostringstream os;
            os << "sigma_minus: Sigma^2 - 4 det V = " << disc << " is negative";
            throw NumericalError(os.str());
        }
        disc = 0;
    }
    const double inner = 0.5 * (sigma - std::sqrt(disc));
    return std::sqrt(std::max(inner, 0.0));
}

double partial_transpose_sigma_minus(const Mat4& cov)
{
    Mat4 omega = Mat4::Zero();
    omega(0, 1) = omega(2, 3) = 1.0;
    omega(1, 0) = omega(3, 2) = -1.0;
    const Eigen::Vector4d flip(1.0, 1.0, 1.0, -1.0);
    const Mat4 pt = flip.asDiagonal() * cov * flip.asDiagonal();
    Eigen::EigenSolver<Mat4> es(omega * pt, false);
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) m = std::min(m, std::abs(es.eigenvalues()(i)));
    return m;
}

double log_negativity(const BipartiteState& s, double hbar)
{
    return std::max(0.0, -std::log2(2.0 * sigma_minus(s) / hbar));
}

Mat2 total_covariance(const ModeSchedule& m, double tau_e)
{
    NoiseBudget prep = m.budget, ver = m.budget;
    prep.q = m.q_prepare;
    ver.q = m.q_verify;
    const GaussianState s0 = conditional_covariance(prep).state;
    const Mat2 v = evolve_exact(s0, m.budget, tau_e).state.cov;
    return v + added_noise_covariance(ver).cov;
}

double log_negativity_at(const ModeSchedule& common, const ModeSchedule& diff, double tau_e)
{
    return log_negativity(assemble_bipartite(total_covariance(common, tau_e), total_covariance(diff, tau_e)));
}

SurvivalCurve survival_curve(const ModeSchedule& common, const ModeSchedule& diff, const std::vector<double>& tau_e)
{
    if (tau_e.empty()) throw ValidationError("survival_curve: empty tau_E list");
    for (std::size_t i = 1; i < tau_e.size(); ++i)
        if (!(tau_e[i] > tau_e[i - 1])) throw ValidationError("survival_curve: tau_E must be strictly ascending");
    SurvivalCurve c;
    c.tau_e = tau_e;
    std::vector<double> margin(tau_e.size());
    for (std::size_t i = 0; i < tau_e.size(); ++i) {
        margin[i] = entanglement_margin(common, diff, tau_e[i]);
        c.e_n.push_back(std::max(0.0, margin[i]));
    }
    if (margin[0] <= 0) {
        c.survival_time = 0;
        return c;
    }
    for (std::size_t i = 1; i < tau_e.size(); ++i) {
        if (margin[i] > 0) continue;
        double lo = tau_e[i - 1], hi = tau_e[i];
        for (int it = 0; it < 100 && hi - lo > 1e-14 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (entanglement_margin(common, diff, mid) > 0 ? lo : hi) = mid;
        }
        c.survival_time = 0.5 * (lo + hi);
        break;
    }
    return c;
}

nlohmann::json SurvivalCurve::to_json() const
{
    nlohmann::json j;
    j["tau_e_s"] = tau_e;
    j["e_n"] = e_n;
    if (std::isfinite(survival_time))
        j["survival_time_s"] = survival_time;
    else
        j["survival_time_s"] = nullptr;
    return j;
}

std::pair<ModeSchedule, ModeSchedule> detector_mode_schedules(double omega_f_hz, double omega_q_hz, double mirror_mass,
                                                              double squeeze_db)
{
    NoiseBudget b;
    b.mass = mirror_mass / 2.0;
    b.omega_q = hz_to_rad(omega_q_hz);
    b.omega_f = hz_to_rad(omega_f_hz);
    b.validate();
    const double q = squeeze_q_from_db(squeeze_db);
    ModeSchedule common{b, q, q};
    ModeSchedule diff{b, -q, q};
    return {common, diff};
}

void GravityDecoherenceParams::validate() const
{
    if (!(density > 0) || !(separation > 0) || !(mass > 0) || !(omega_q > 0) || !(spread >= 0))
        throw ValidationError("gravity decoherence parameters must be positive");
}

GravityTimescales gravity_timescales(const GravityDecoherenceParams& p)
{
    p.validate();
    using constants::G;
    using constants::hbar;
    GravityTimescales t;
    t.tau_a = p.omega_q / (G * p.density);
    t.tau_b = std::sqrt(hbar) * p.separation * p.separation * std::sqrt(p.omega_q) / (G * std::pow(p.mass, 1.5));
    return t;
}

TestabilityReport testability_report(const GravityDecoherenceParams& p, double survival_time)
{
    TestabilityReport r;
    r.timescales = gravity_timescales(p);
    r.survival_time = survival_time;
    r.omega_q_tau_b = p.omega_q * r.timescales.tau_b;
    r.survival_over_tau_a = survival_time / r.timescales.tau_a;
    r.survival_over_tau_b = survival_time / r.timescales.tau_b;
    auto verdict = [&](double ratio) -> std::string {
        if (!(survival_time > 0)) return "inconclusive";
        if (ratio >= 10.0) return "testable";
        if (ratio < 1.0) return "untestable";
        return "inconclusive";
    };
    r.model_a = verdict(r.survival_over_tau_a);
    r.model_b = verdict(r.survival_over_tau_b);
    return r;
}

nlohmann::json TestabilityReport::to_json() const
{
    nlohmann::json j;
    j["tau_g_a_s"] = timescales.tau_a;
    j["tau_g_b_s"] = timescales.tau_b;
    j["omega_q_tau_g_b"] = omega_q_tau_b;
    if (std::isfinite(survival_time)) {
        j["survival_time_s"] = survival_time;
        j["survival_over_tau_g_a"] = survival_over_tau_a;
        j["survival_over_tau_g_b"] = survival_over_tau_b;
    } else {
        j["survival_time_s"] = nullptr;
    }
    j["model_a"] = model_a;
    j["model_b"] = model_b;
    return j;
}

} // namespace mqm
