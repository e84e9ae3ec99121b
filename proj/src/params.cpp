#include "mqm/params.hpp"

#include "mqm/errors.hpp"

#include <cmath>
#include <sstream>

namespace mqm {

double squeeze_q_from_db(double db) { return 0.5 * std::log(std::pow(10.0, db / 10.0)); }

NoiseBudget NoiseBudget::from_ratios(double mass, double omega_q, double zeta_f, double zeta_x,
                                     double eta, double q)
{
    NoiseBudget b;
    b.mass = mass;
    b.omega_q = omega_q;
    b.omega_f = zeta_f * omega_q;
    b.omega_x = zeta_x > 0 ? omega_q / zeta_x : std::numeric_limits<double>::infinity();
    b.eta = eta;
    b.q = q;
    return b;
}

void NoiseBudget::validate() const
{
    auto fail = [](const char* field, double v, const char* rule) {
        std::ostringstream os;
        os << "noise budget: " << field << " = " << v << " violates " << rule;
        throw ValidationError(os.str());
    };
    if (!(mass > 0) || !std::isfinite(mass)) fail("mass", mass, "m > 0");
    if (!(omega_m >= 0) || !std::isfinite(omega_m)) fail("omega_m", omega_m, "omega_m >= 0");
    if (!(gamma_m >= 0) || !std::isfinite(gamma_m)) fail("gamma_m", gamma_m, "gamma_m >= 0");
    if (!(omega_q > 0) || !std::isfinite(omega_q)) fail("omega_q", omega_q, "omega_q > 0");
    if (!(omega_f >= 0) || !std::isfinite(omega_f)) fail("omega_f", omega_f, "omega_f >= 0");
    if (!(omega_x > 0)) fail("omega_x", omega_x, "omega_x > 0");
    if (!(eta >= 0 && eta < 1)) fail("eta", eta, "0 <= eta < 1");
    if (!std::isfinite(q)) fail("q", q, "finite squeeze factor");
    if (!(temperature >= 0)) fail("temperature", temperature, "T >= 0");
}

double lambda_factor(double eta, double q, double zeta_x)
{
    return std::sqrt(2.0 * (eta + (1.0 - eta) * (std::exp(-2.0 * q) + 2.0 * zeta_x * zeta_x)));
}

double lambda_factor(const NoiseBudget& b)
{
    b.validate();
    return lambda_factor(b.eta, b.q, b.omega_q / b.omega_x);
}

double effective_zeta_f(double eta, double q, double zeta_f)
{
    const double e2q = std::exp(2.0 * q);
    const double loss = eta * (1.0 - eta) * e2q / (2.0 * (eta + (1.0 - eta) * e2q));
    return std::sqrt(loss + (1.0 - eta) * zeta_f * zeta_f);
}

double effective_zeta_f(const NoiseBudget& b)
{
    b.validate();
    return effective_zeta_f(b.eta, b.q, b.omega_f / b.omega_q);
}

double effective_zeta_f_approx(double eta, double zeta_f) { return std::sqrt(eta / 2.0 + zeta_f * zeta_f); }

double chi_factor(double zeta_f_eff, double lambda) { return std::sqrt(zeta_f_eff / lambda); }

double chi_factor_alt(double zeta_f_eff, double lambda) { return zeta_f_eff / std::sqrt(lambda); }

DerivedScales derive(const NoiseBudget& b)
{
    b.validate();
    using constants::hbar;
    DerivedScales d;
    const double m = b.mass;
    d.zeta_f = b.omega_f / b.omega_q;
    d.zeta_x = b.omega_q / b.omega_x;
    d.n_f = 1.0 + 2.0 * d.zeta_f * d.zeta_f;
    d.n_x = 1.0 + 2.0 * d.zeta_x * d.zeta_x;
    d.dx_q2 = hbar / (2.0 * m * b.omega_q);
    d.dp_q2 = hbar * m * b.omega_q / 2.0;
    d.dx_q = std::sqrt(d.dx_q2);
    d.dp_q = std::sqrt(d.dp_q2);
    d.tau_q = 1.0 / b.omega_q;
    d.tau_f = b.omega_f > 0 ? 1.0 / b.omega_f : std::numeric_limits<double>::infinity();
    d.s_f_th = 2.0 * hbar * m * b.omega_f * b.omega_f;
    d.s_f_ba = std::exp(2.0 * b.q) * hbar * m * b.omega_q * b.omega_q;
    d.s_x_th = std::isinf(b.omega_x) ? 0.0 : hbar / (m * b.omega_x * b.omega_x);
    d.alpha2 = hbar * m * b.omega_q * b.omega_q;
    d.alpha = std::sqrt(d.alpha2);
    d.s_x_sh = hbar * hbar / d.alpha2 * std::exp(-2.0 * b.q);
    d.lambda = lambda_factor(b.eta, b.q, d.zeta_x);
    d.zeta_f_eff = effective_zeta_f(b.eta, b.q, d.zeta_f);
    d.chi = chi_factor(d.zeta_f_eff, d.lambda);
    return d;
}

} // namespace mqm
