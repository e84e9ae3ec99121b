#pragma once

#include "mqm/gaussian.hpp"
#include "mqm/params.hpp"

#include <string>
#include <vector>

namespace mqm {

struct EvolutionResult {
    GaussianState state;
    double phase = 0;      // omega_m tau
    double u = 0;          // U(tau)
    double u_initial = 0;  // U(0)
    double u_thermal = 0;  // U(tau) - U(0)
    std::vector<std::string> warnings;
};

// Thermal diffusion accumulated over tau (the additive term of the exact
// evolution); finite as omega_m -> 0.
Mat2 thermal_diffusion(const NoiseBudget& b, double tau);

// Free oscillator plus thermal force, no measurement: V -> R^T V R + D.
EvolutionResult evolve_exact(const GaussianState& s, const NoiseBudget& b, double tau);

// Free-mass expansion in Omega_q tau, valid for omega_m tau << 1.
EvolutionResult evolve_leading_order(const GaussianState& s, const NoiseBudget& b, double tau);

// (V_xx/dx_q^2)(tau/tau_F)^2, the quadratic-in-tau growth estimate of U.
double leading_order_u_growth(const Mat2& cov, const NoiseBudget& b, double tau);

// First-order increment of U in tau: (V_xx/dx_q^2) zeta_F^2 Omega_q tau / U(0).
double linear_u_growth(const Mat2& cov, const NoiseBudget& b, double tau);

// (tau/tau_F)^2.
double thermal_growth_estimate(const NoiseBudget& b, double tau);

} // namespace mqm
