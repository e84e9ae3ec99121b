#pragma once

#include <limits>

namespace mqm {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double G = 6.67430e-11;         // m^3 kg^-1 s^-2
inline constexpr double kB = 1.380649e-23;       // J/K
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
} // namespace constants

inline double hz_to_rad(double f_hz) { return constants::two_pi * f_hz; }

// Squeeze factor q from a squeezing level in dB (e^{2q} = 10^{dB/10}).
double squeeze_q_from_db(double db);

// Physical inputs of one mechanical mode and its readout.
//
// All frequencies in rad/s. Spectral densities derived from these are
// one-sided with the symmetrized correlator <xi(t) xi(t')> = S delta(t-t')/2.
// omega_x = +inf switches sensing noise off. Positive q squeezes the
// phase quadrature (e^{-2q} on the shot noise, e^{+2q} on back action).
struct NoiseBudget {
    double mass = 1.0;
    double omega_m = 0.0;
    double gamma_m = 0.0;
    double omega_q = 1.0;
    double omega_f = 0.0;
    double omega_x = std::numeric_limits<double>::infinity();
    double eta = 0.0;
    double q = 0.0;
    double temperature = 0.0;  // informational only, 0 when unset

    static NoiseBudget from_ratios(double mass, double omega_q, double zeta_f, double zeta_x,
                                   double eta = 0.0, double q = 0.0);

    // Throws ValidationError when an invariant is violated.
    void validate() const;
};

struct DerivedScales {
    double zeta_f = 0, zeta_x = 0;
    double n_f = 1, n_x = 1;
    double dx_q = 0, dp_q = 0;      // dx_q * dp_q = hbar/2
    double dx_q2 = 0, dp_q2 = 0;
    double tau_q = 0, tau_f = 0;    // tau_f = inf when omega_f = 0
    double s_f_th = 0, s_f_ba = 0;  // N^2 s
    double s_x_th = 0, s_x_sh = 0;  // m^2 s
    double alpha = 0, alpha2 = 0;
    double lambda = 0;
    double zeta_f_eff = 0;
    double chi = 0;
};

DerivedScales derive(const NoiseBudget& b);

double lambda_factor(double eta, double q, double zeta_x);
double lambda_factor(const NoiseBudget& b);

double effective_zeta_f(double eta, double q, double zeta_f);
double effective_zeta_f(const NoiseBudget& b);
// sqrt(eta/2 + zeta_f^2), the small-loss, strong-squeezing approximation.
double effective_zeta_f_approx(double eta, double zeta_f);

// Dimensionless verification rate; filters decay as exp(-Omega_q chi t).
// chi^2 = zeta_f_eff / Lambda.
double chi_factor(double zeta_f_eff, double lambda);
// The alternative reading chi^2 = zeta_f_eff^2 / Lambda, kept for reports.
double chi_factor_alt(double zeta_f_eff, double lambda);

} // namespace mqm
