#include "mqm/evolution.hpp"

#include "mqm/errors.hpp"

#include <cmath>
#include <sstream>

namespace mqm {

namespace {

constexpr double kSeriesPhase = 1e-4;

// (2 phi - sin 2 phi) / phi^3
double g_xx(double phi)
{
    if (phi < kSeriesPhase) return 4.0 / 3.0 - 4.0 * phi * phi / 15.0;
    return (2 * phi - std::sin(2 * phi)) / (phi * phi * phi);
}

// (sin phi / phi)^2
double g_xp(double phi)
{
    if (phi < kSeriesPhase) return 1.0 - phi * phi / 3.0;
    const double s = std::sin(phi) / phi;
    return s * s;
}

// (2 phi + sin 2 phi) / phi
double g_pp(double phi)
{
    if (phi < kSeriesPhase) return 4.0 - 4.0 * phi * phi / 3.0;
    return (2 * phi + std::sin(2 * phi)) / phi;
}

void check_tau(double tau)
{
    if (!(tau >= 0) || !std::isfinite(tau)) throw ValidationError("evolution: tau_E must be finite and >= 0");
}

} // namespace

Mat2 thermal_diffusion(const NoiseBudget& b, double tau)
{
    check_tau(tau);
    const DerivedScales d = derive(b);
    const double m = b.mass;
    const double phi = b.omega_m * tau;
    const double s = d.s_f_th;
    Mat2 D;
    D(0, 0) = s * tau * tau * tau / (8 * m * m) * g_xx(phi);
    D(0, 1) = D(1, 0) = s * tau * tau / (4 * m) * g_xp(phi);
    D(1, 1) = s * tau / 8 * g_pp(phi);
    return D;
}

EvolutionResult evolve_exact(const GaussianState& s, const NoiseBudget& b, double tau)
{
    check_tau(tau);
    EvolutionResult r;
    r.phase = b.omega_m * tau;
    const Mat2 R = rotation_matrix(r.phase, b.mass, b.omega_m, tau);
    r.state = symplectic_transform(s, R, true);
    r.state.cov += thermal_diffusion(b, tau);
    r.u_initial = uncertainty_product(s.cov);
    r.u = uncertainty_product(r.state.cov);
    r.u_thermal = r.u - r.u_initial;
    if (b.gamma_m * tau > 0.1) {
        std::ostringstream os;
        os << "gamma_m tau_E = " << b.gamma_m * tau << " > 0.1: damping during evolution is not negligible";
        r.warnings.push_back(os.str());
    }
    return r;
}

EvolutionResult evolve_leading_order(const GaussianState& s, const NoiseBudget& b, double tau)
{
    check_tau(tau);
    const DerivedScales d = derive(b);
    using constants::hbar;
    const double u = b.omega_q * tau;
    const double z2 = d.zeta_f * d.zeta_f;
    const Mat2& V = s.cov;
    EvolutionResult r;
    r.phase = b.omega_m * tau;
    r.state.mean = Vec2(s.mean(0) + s.mean(1) * tau / b.mass, s.mean(1));
    Mat2& W = r.state.cov;
    W(0, 0) = V(0, 0) + 4 * d.dx_q2 / hbar * V(0, 1) * u + d.dx_q2 / d.dp_q2 * V(1, 1) * u * u +
              2 * d.dx_q2 * z2 * u * u * u / 3;
    W(0, 1) = W(1, 0) = V(0, 1) + hbar / (2 * d.dp_q2) * V(1, 1) * u + hbar / 2 * z2 * u * u;
    W(1, 1) = V(1, 1) + 2 * d.dp_q2 * z2 * u;
    r.u_initial = uncertainty_product(V);
    r.u = uncertainty_product(W);
    r.u_thermal = r.u - r.u_initial;
    if (r.phase >= 0.1) {
        std::ostringstream os;
        os << "omega_m tau_E = " << r.phase << " >= 0.1: leading-order expansion not applicable";
        r.warnings.push_back(os.str());
    }
    return r;
}

double leading_order_u_growth(const Mat2& cov, const NoiseBudget& b, double tau)
{
    const DerivedScales d = derive(b);
    return cov(0, 0) / d.dx_q2 * thermal_growth_estimate(b, tau);
}

double linear_u_growth(const Mat2& cov, const NoiseBudget& b, double tau)
{
    // d(det V)/dtau at tau = 0 is S_F^th V_xx / 2, so
    // dU = (2/hbar) S_F^th V_xx tau / (4 sqrt(det V)) = (V_xx/dx_q^2) zeta_F^2 Omega_q tau / U(0)
    const DerivedScales d = derive(b);
    const double u0 = uncertainty_product(cov);
    return cov(0, 0) / d.dx_q2 * d.zeta_f * d.zeta_f * b.omega_q * tau / u0;
}

double thermal_growth_estimate(const NoiseBudget& b, double tau)
{
    const double x = b.omega_f * tau;
    return x * x;
}

} // namespace mqm
