#pragma once

#include "mqm/gaussian.hpp"
#include "mqm/params.hpp"
#include "mqm/rational.hpp"
#include "mqm/verification.hpp"

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mqm {

// Everything below works in the dimensionless frequency nu = Omega/Omega_q
// and time Omega_q t. A filter g(t) (1/s) maps to g^(Omega_q t) = g(t)/Omega_q,
// and its transform int g e^{i Omega t} dt equals the dimensionless transform
// evaluated at nu = Omega/Omega_q.
//
// Mechanical response: G~(nu) = -1/D(nu), D = (nu + w + i g)(nu - w + i g)
// with w = omega_m/Omega_q, g = gamma_m/Omega_q (amplitude decay rate).

// Damping used for the free-mass regularization, in units of Omega_q.
inline constexpr double free_mass_gamma = 1e-6;

// Output-noise spectra of the two readout quadratures.
struct NoiseSpectra {
    double s11 = 0;          // (eta + (1-eta)e^{2q})/2
    double k = 0;            // (1-eta)e^{2q}/2
    double beta = 0;         // (1-eta)(e^{2q} + 2 zeta_F^2)/2
    double kappa = 0;        // beta - k^2/s11 = zeta_F'^2
    double lambda = 0;
    RationalSpectrum response;      // G~
    RationalSpectrum response_adj;  // G~*(nu) = G~(-nu), poles in the upper half plane
    RationalSpectrum s12, s21, s22;
    RationalSpectrum m_inverse;     // s22 - s21 s12 / s11
};

NoiseSpectra noise_spectra(const NoiseBudget& b, double omega_m, double gamma_m);

struct WHSolution {
    NoiseBudget budget;
    double zeta = 0;
    double omega_m = 0, gamma_m = 0;  // rad/s, as used in the spectra

    NoiseSpectra spectra;
    SpectralFactors factors;

    // Dimensionless filter transforms for the requested quadrature.
    PartialFractions g1_hat, g2_hat;
    // Responses to the two constraint functions, g2 = mu_hat . basis.
    std::array<PartialFractions, 2> basis_g2;

    Vec2 mu = Vec2::Zero();           // Lagrange multipliers, 1/s
    Mat2 moments = Mat2::Zero();      // (f_i|M|f_j), s
    Mat2 v_add_norm = Mat2::Zero();
    NoiseEllipse v_add = NoiseEllipse::Zero();
    double u_add = 0;

    double kappa = 0;                 // m^2 Omega_q^4 zeta_F'^2
    double frequency_residual = 0;    // plus part of the g2 equation / max|h~| on a real grid
    double decay_rate = 0;            // slowest filter decay, 1/s

    std::vector<std::string> warnings;

    // Filter transforms in SI frequency (rad/s).
    cx g1_tilde(double omega) const;
    cx g2_tilde(double omega) const;

    // exp(-decay_rate * T): relative size of the filters cut off by a finite window.
    double truncation_error(double length) const;

    FilterPair filters(const TimeGrid& grid) const;

    nlohmann::json to_json() const;
};

// Optimal filters for the quadrature x cos(zeta) + (p/m omega_m) sin(zeta).
// gamma_m must be positive; the constraint functions are the damped
// free evolutions of x and p over the verification window.
WHSolution solve_optimal_filters(const NoiseBudget& b, double zeta, double omega_m, double gamma_m);
// Uses the budget's omega_m and gamma_m, with gamma_m = free_mass_gamma Omega_q when it is zero.
WHSolution solve_optimal_filters(const NoiseBudget& b, double zeta);

struct WHTimeResidual {
    double bae = 0;       // |s11 g1 + k G*g2| / |s11 g1|, L2 over the window
    double variational = 0;  // |C21 g1 + C22 g2 - h| / |h|, L2 over the window
    double step = 0;      // grid step, s
    double length = 0;    // window, s
};

// Substitutes the inverse-transformed filters into the time-domain integral
// equations on a uniform grid with step step_hat/Omega_q over
// length_in_decay_times/decay_rate.
WHTimeResidual time_domain_residual(const WHSolution& s, double step_hat = 1e-3,
                                    double length_in_decay_times = 32.0);

} // namespace mqm
