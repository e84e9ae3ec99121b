#pragma once

#include "mqm/gaussian.hpp"
#include "mqm/params.hpp"

#include <string>
#include <vector>

namespace mqm {

enum class Provenance { closed_form, riccati, wiener_hopf };
const char* to_string(Provenance p);

struct ConditionalState {
    GaussianState state;
    Provenance provenance = Provenance::closed_form;
    NoiseBudget budget;
    std::vector<std::string> warnings;
};

// Free-mass conditional covariance after a long continuous position
// measurement. Squeezing q enters through the effective measurement
// frequency e^{q} Omega_q; for q = 0 this is
//   Vxx = N_F^{1/4} N_x^{3/4} sqrt2 dx_q^2
//   Vxp = (N_F N_x)^{1/2} hbar/2
//   Vpp = N_F^{3/4} N_x^{1/4} sqrt2 dp_q^2
ConditionalState conditional_covariance(const NoiseBudget& b);

// The same formula for arbitrary N_F, N_x at measurement frequency omega.
Mat2 free_mass_conditional_cov(double mass, double omega, double n_f, double n_x);

// Steady-state filtering error covariance P of
//   dx = p/m dt,  dp = (-m w^2 x - 2 gamma p) dt + F dt,  y = x + n,
// with one-sided densities s_force (of F) and s_meas (of n), i.e. white
// intensities s_force/2 and s_meas/2.
Mat2 solve_filter_riccati(double mass, double omega_m, double gamma_m, double s_force, double s_meas);

// Riccati residual A P + P A^T - P C^T R^-1 C P + Q, relative to |Q|.
double filter_riccati_residual(const Mat2& P, double mass, double omega_m, double gamma_m, double s_force,
                               double s_meas);

// Kalman oracle driven by the budget's noise densities.
ConditionalState riccati_steady_state(const NoiseBudget& b);

// N_F, N_x implied by the budget's densities relative to the quantum
// back-action and shot-noise levels: S_F/(hbar m Omega^2), S_x m Omega^2/hbar
// with Omega = e^{q} Omega_q.
struct EffectiveN {
    double n_f = 1;
    double n_x = 1;
};
EffectiveN riccati_effective_n(const NoiseBudget& b);

struct OrderOfMagnitude {
    double dx2 = 0;
    double dp2 = 0;
    double u_est = 0;     // (2/hbar) sqrt(dx2 dp2)
    double u_nx_nf = 0;   // N_x N_F
};
OrderOfMagnitude order_of_magnitude_prepared(const NoiseBudget& b, double tau);

} // namespace mqm
