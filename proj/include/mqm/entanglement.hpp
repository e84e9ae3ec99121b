#pragma once

#include "mqm/gaussian.hpp"
#include "mqm/params.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <limits>
#include <string>
#include <vector>

namespace mqm {

using Mat4 = Eigen::Matrix4d;

// Covariance over (x_E, p_E, x_N, p_N) built from the common (x_E + x_N)
// and differential (x_E - x_N) mode covariances.
struct BipartiteState {
    Mat4 cov = Mat4::Zero();
    Mat2 ee() const { return cov.block<2, 2>(0, 0); }
    Mat2 en() const { return cov.block<2, 2>(0, 2); }
    Mat2 ne() const { return cov.block<2, 2>(2, 0); }
    Mat2 nn() const { return cov.block<2, 2>(2, 2); }
};

// V_EE = V_NN = [[(c+d)_xx/4, (c+d)_xp/2], [., (c+d)_pp]], V_EN = V_NE the same with c-d.
// Throws InvalidCovarianceError when the 4x4 matrix is not PSD.
BipartiteState assemble_bipartite(const Mat2& v_common, const Mat2& v_diff);

// Sigma = det V_NN + det V_EE - 2 det V_NE, sigma_- = sqrt((Sigma - sqrt(Sigma^2 - 4 det V))/2).
double sigma_minus(const BipartiteState& s);
// Smallest symplectic eigenvalue of the partially transposed covariance (p_N -> -p_N).
double partial_transpose_sigma_minus(const Mat4& cov);
// max(0, -log2(2 sigma_- / hbar)).
double log_negativity(const BipartiteState& s, double hbar = constants::hbar);

// One mode of the pair: its budget (mode mass, noise) and the squeeze factors
// used while preparing (t < 0) and verifying (t > tau_E).
struct ModeSchedule {
    NoiseBudget budget;
    double q_prepare = 0;
    double q_verify = 0;
};

// V(tau_E) + V^add for one mode.
Mat2 total_covariance(const ModeSchedule& m, double tau_e);

double log_negativity_at(const ModeSchedule& common, const ModeSchedule& diff, double tau_e);

struct SurvivalCurve {
    std::vector<double> tau_e;  // s
    std::vector<double> e_n;
    // First zero of E_N; +inf when it stays positive over the scan, 0 when E_N(0) = 0.
    double survival_time = std::numeric_limits<double>::infinity();
    nlohmann::json to_json() const;
};

// Samples E_N over tau_e (ascending) and locates the first zero by bisection
// inside the bracketing interval.
SurvivalCurve survival_curve(const ModeSchedule& common, const ModeSchedule& diff, const std::vector<double>& tau_e);

// Two mirrors of mass mirror_mass in a detector with measurement frequency
// omega_q_hz, thermal force omega_f_hz, no sensing noise or loss, 10 dB
// squeezing: the common mode is phase squeezed throughout, the differential
// mode is amplitude squeezed during preparation and phase squeezed during
// verification. Mode mass is mirror_mass/2.
std::pair<ModeSchedule, ModeSchedule> detector_mode_schedules(double omega_f_hz, double omega_q_hz = 100.0,
                                                              double mirror_mass = 10.0, double squeeze_db = 10.0);

struct GravityDecoherenceParams {
    double density = 2200.0;  // kg/m^3
    double separation = 10.0; // m
    double mass = 10.0;       // kg
    double omega_q = constants::two_pi * 100.0;
    double spread = 0.0;      // m, informational (dx_q of the prepared state)
    void validate() const;
};

struct GravityTimescales {
    double tau_a = 0;  // Omega_q / (G rho)
    double tau_b = 0;  // hbar^{1/2} L^2 Omega_q^{1/2} / (G m^{3/2})
};

GravityTimescales gravity_timescales(const GravityDecoherenceParams& p);

struct TestabilityReport {
    GravityTimescales timescales;
    double survival_time = 0;
    double omega_q_tau_b = 0;
    double survival_over_tau_b = 0;
    double survival_over_tau_a = 0;
    std::string model_a;  // "testable" | "untestable" | "inconclusive"
    std::string model_b;
    nlohmann::json to_json() const;
};

// A model counts as testable when the entanglement outlives its timescale by
// at least a factor 10, untestable when the survival is shorter than it.
TestabilityReport testability_report(const GravityDecoherenceParams& p, double survival_time);

} // namespace mqm
