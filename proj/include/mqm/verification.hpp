#pragma once

#include "mqm/gaussian.hpp"
#include "mqm/params.hpp"
#include "mqm/preparation.hpp"
#include "mqm/quadrature.hpp"

#include <string>
#include <vector>

namespace mqm {

// Time-domain filters applied to the amplitude (g1) and phase (g2)
// output quadratures; time origin at the start of verification.
struct FilterPair {
    double zeta = 0;
    TimeGrid grid;
    std::vector<double> t, g1, g2;  // g in 1/s
    Provenance provenance = Provenance::closed_form;

    std::vector<double> weight() const;                  // sqrt(g1^2 + g2^2)
    std::vector<double> local_oscillator_phase() const;  // atan2(g2, g1)
};

// Default filter grid: step tau_q/200, length 20/(Omega_q chi).
TimeGrid default_filter_grid(const NoiseBudget& b, double grid_scale = 1.0);

// Free-mass optimal filters for the quadrature x cos(zeta) + (p/m omega_m) sin(zeta).
// Throws ValidationError when the grid is shorter than 10/(Omega_q chi).
FilterPair closed_form_filters(const NoiseBudget& b, double zeta, const TimeGrid& grid);
FilterPair closed_form_filters(const NoiseBudget& b, double zeta);

// Signal templates: f1 = cos(omega_m t), f2 = (Omega_q/omega_m) sin(omega_m t),
// with f2 = Omega_q t when omega_m t < 1e-4.
double signal_f1(const NoiseBudget& b, double t);
double signal_f2(const NoiseBudget& b, double t);

struct Normalization {
    double c1 = 0;  // (g2|f1)
    double c2 = 0;  // (g2|f2)
};
Normalization filter_normalization(const FilterPair& f, const NoiseBudget& b);

// r(t) = g1 + [(1-eta)e^{2q}/(eta+(1-eta)e^{2q})] (alpha^2/hbar) int_t^T G_x(t'-t) g2(t') dt'
std::vector<double> bae_residual_curve(const FilterPair& f, const NoiseBudget& b);
// max|r| / max|g1|
double bae_residual(const FilterPair& f, const NoiseBudget& b);

// Envelope decay time of g2 from its extrema; compare with 1/(Omega_q chi).
double fitted_verification_time(const FilterPair& f);

struct AddedNoise {
    NoiseEllipse cov = NoiseEllipse::Zero();
    double u_add = 0;
    double lambda = 0;
    double zeta_f_eff = 0;
    double chi = 0;
};
AddedNoise added_noise_covariance(const NoiseBudget& b);

struct SqueezingTradeoff {
    std::vector<double> q;
    std::vector<double> u_add;
    std::vector<double> no_bae_shot;     // e^{-q}
    std::vector<double> no_bae_sensing;  // zeta_x
    double limit = 0;                    // 2 zeta_x zeta_F at eta = 0, the q -> inf value of u_add
    double limit_estimate = 0;           // zeta_x zeta_F
};
SqueezingTradeoff squeezing_tradeoff(const NoiseBudget& b, const std::vector<double>& qs);

// Variance of the normalized zeta-quadrature for the state, the added
// noise, and their sum (the marginal seen by tomography).
struct QuadratureMarginal {
    double signal = 0;
    double noise = 0;
    double total = 0;
};
QuadratureMarginal estimator_signal_noise(double zeta, const Mat2& state_cov, const NoiseEllipse& added,
                                          const DerivedScales& d);
QuadratureMarginal estimator_signal_noise(const FilterPair& f, const GaussianState& s, const NoiseBudget& b);

} // namespace mqm
