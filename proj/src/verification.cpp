#include "mqm/verification.hpp"

#include "mqm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mqm {

namespace {

constexpr double kSeriesPhase = 1e-4;

double bae_factor(const NoiseBudget& b)
{
    const double e2q = std::exp(2.0 * b.q);
    return (1.0 - b.eta) * e2q / (b.eta + (1.0 - b.eta) * e2q);
}

double max_abs(const std::vector<double>& v)
{
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

std::vector<double> FilterPair::weight() const
{
    std::vector<double> w(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) w[i] = std::hypot(g1[i], g2[i]);
    return w;
}

std::vector<double> FilterPair::local_oscillator_phase() const
{
    std::vector<double> phi(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) phi[i] = std::atan2(g2[i], g1[i]);
    return phi;
}

TimeGrid default_filter_grid(const NoiseBudget& b, double grid_scale)
{
    if (!(grid_scale > 0)) throw ValidationError("grid scale must be positive");
    const DerivedScales d = derive(b);
    TimeGrid g;
    g.step = d.tau_q / (200.0 * grid_scale);
    const double length = 20.0 / (b.omega_q * d.chi);
    g.points = static_cast<std::size_t>(std::ceil(length / g.step)) + 1;
    return g;
}

double signal_f1(const NoiseBudget& b, double t) { return std::cos(b.omega_m * t); }

double signal_f2(const NoiseBudget& b, double t)
{
    const double phi = b.omega_m * t;
    if (phi < kSeriesPhase) return b.omega_q * t * (1.0 - phi * phi / 6.0);
    return b.omega_q / b.omega_m * std::sin(phi);
}

FilterPair closed_form_filters(const NoiseBudget& b, double zeta, const TimeGrid& grid)
{
    const DerivedScales d = derive(b);
    const double a = b.omega_q * d.chi;
    if (grid.length() * a < 10.0) {
        std::ostringstream os;
        os << "closed_form_filters: grid length " << grid.length() << " s covers only " << grid.length() * a
           << " verification times (< 10); truncation error ~ " << std::exp(-grid.length() * a);
        throw ValidationError(os.str());
    }
    FilterPair f;
    f.zeta = zeta;
    f.grid = grid;
    f.provenance = Provenance::closed_form;
    f.t = grid.samples();
    f.g1.resize(grid.points);
    f.g2.resize(grid.points);
    const double wq = b.omega_q, chi = d.chi;
    const double cz = std::cos(zeta), sz = std::sin(zeta);
    const double r2 = std::sqrt(2.0);
    const double quarter = constants::pi / 4;
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double at = a * f.t[i];
        const double env = std::exp(-at);
        const double g1x = wq / chi * env * std::sin(at);
        const double g1p = -r2 * wq * env * std::sin(at + quarter);
        const double g2x = 2 * a * env * std::cos(at);
        const double g2p = 2 * r2 * wq * chi * chi * env * std::sin(at - quarter);
        f.g1[i] = g1x * cz + g1p * sz;
        f.g2[i] = g2x * cz + g2p * sz;
    }
    return f;
}

FilterPair closed_form_filters(const NoiseBudget& b, double zeta)
{
    return closed_form_filters(b, zeta, default_filter_grid(b));
}

Normalization filter_normalization(const FilterPair& f, const NoiseBudget& b)
{
    std::vector<double> y1(f.t.size()), y2(f.t.size());
    for (std::size_t i = 0; i < f.t.size(); ++i) {
        y1[i] = f.g2[i] * signal_f1(b, f.t[i]);
        y2[i] = f.g2[i] * signal_f2(b, f.t[i]);
    }
    return {integrate(y1, f.grid.step), integrate(y2, f.grid.step)};
}

std::vector<double> bae_residual_curve(const FilterPair& f, const NoiseBudget& b)
{
    const std::size_t n = f.t.size();
    const double h = f.grid.step;
    // alpha^2/hbar * G_x(s) = Omega_q^2 sin(omega_m s)/omega_m, separable in (t, t')
    const double k = bae_factor(b) * b.omega_q * b.omega_q;
    std::vector<double> r(n);
    if (b.omega_m * f.grid.length() < kSeriesPhase) {
        std::vector<double> tg(n);
        for (std::size_t i = 0; i < n; ++i) tg[i] = f.t[i] * f.g2[i];
        const auto i0 = tail_integral(f.g2, h);
        const auto i1 = tail_integral(tg, h);
        for (std::size_t i = 0; i < n; ++i) r[i] = f.g1[i] + k * (i1[i] - f.t[i] * i0[i]);
    } else {
        const double w = b.omega_m;
        std::vector<double> sg(n), cg(n);
        for (std::size_t i = 0; i < n; ++i) {
            sg[i] = std::sin(w * f.t[i]) * f.g2[i];
            cg[i] = std::cos(w * f.t[i]) * f.g2[i];
        }
        const auto is = tail_integral(sg, h);
        const auto ic = tail_integral(cg, h);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = f.g1[i] + k / w * (std::cos(w * f.t[i]) * is[i] - std::sin(w * f.t[i]) * ic[i]);
    }
    return r;
}

double bae_residual(const FilterPair& f, const NoiseBudget& b)
{
    const double peak = max_abs(f.g1);
    if (!(peak > 0)) throw NumericalError("bae_residual: g1 vanishes identically");
    return max_abs(bae_residual_curve(f, b)) / peak;
}

double fitted_verification_time(const FilterPair& f) { return 1.0 / extrema_decay_rate(f.t, f.g2); }

AddedNoise added_noise_covariance(const NoiseBudget& b)
{
    const DerivedScales d = derive(b);
    using constants::hbar;
    AddedNoise a;
    a.lambda = d.lambda;
    a.zeta_f_eff = d.zeta_f_eff;
    a.chi = d.chi;
    const double L = d.lambda, z = d.zeta_f_eff, s = 1.0 / (1.0 - b.eta);
    a.cov(0, 0) = s * std::pow(L, 1.5) * std::sqrt(z) * d.dx_q2;
    a.cov(0, 1) = a.cov(1, 0) = -s * L * z * hbar / 2;
    a.cov(1, 1) = s * 2 * std::sqrt(L) * std::pow(z, 1.5) * d.dp_q2;
    a.u_add = L * z * s;
    return a;
}

SqueezingTradeoff squeezing_tradeoff(const NoiseBudget& b, const std::vector<double>& qs)
{
    const DerivedScales d = derive(b);
    SqueezingTradeoff t;
    for (double q : qs) {
        NoiseBudget bq = b;
        bq.q = q;
        t.q.push_back(q);
        t.u_add.push_back(added_noise_covariance(bq).u_add);
        t.no_bae_shot.push_back(std::exp(-q));
        t.no_bae_sensing.push_back(d.zeta_x);
    }
    t.limit = 2.0 * d.zeta_x * d.zeta_f;
    t.limit_estimate = d.zeta_x * d.zeta_f;
    return t;
}

QuadratureMarginal estimator_signal_noise(double zeta, const Mat2& state_cov, const NoiseEllipse& added,
                                          const DerivedScales& d)
{
    const Vec2 u(std::cos(zeta), std::sin(zeta));
    QuadratureMarginal m;
    m.signal = u.dot(normalized(state_cov, d) * u);
    m.noise = u.dot(normalized(Mat2(added), d) * u);
    m.total = m.signal + m.noise;
    return m;
}

QuadratureMarginal estimator_signal_noise(const FilterPair& f, const GaussianState& s, const NoiseBudget& b)
{
    return estimator_signal_noise(f.zeta, s.cov, added_noise_covariance(b).cov, derive(b));
}

} // namespace mqm
