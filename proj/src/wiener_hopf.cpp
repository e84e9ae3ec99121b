#include "mqm/wiener_hopf.hpp"

#include "mqm/errors.hpp"
#include "mqm/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mqm {

namespace {

const cx I(0.0, 1.0);

// Below this omega_m/Omega_q the two response poles are merged into a double pole.
constexpr double kFreeMassOmega = 1e-7;

struct Geometry {
    double w = 0, g = 0;
    bool free_mass = false;
    std::vector<Root> d_roots;    // roots of D, lower half plane
    std::vector<Root> dbar_roots; // conjugates, upper half plane
};

Geometry geometry(double w, double g)
{
    Geometry geo;
    geo.g = g;
    geo.free_mass = w < kFreeMassOmega;
    geo.w = geo.free_mass ? 0.0 : w;
    if (geo.free_mass) {
        geo.d_roots = {{cx(0.0, -g), 2}};
        geo.dbar_roots = {{cx(0.0, g), 2}};
    } else {
        geo.d_roots = {{cx(-w, -g), 1}, {cx(w, -g), 1}};
        geo.dbar_roots = {{cx(w, g), 1}, {cx(-w, g), 1}};
    }
    return geo;
}

// Transforms of the damped free evolutions on t > 0:
// b1 = e^{-g t} cos(w t), b2 = e^{-g t} sin(w t)/w.
PartialFractions b1_tilde(const Geometry& geo)
{
    return to_partial_fractions(RationalSpectrum(I, {{cx(0.0, -geo.g), 1}}, geo.d_roots));
}

PartialFractions b2_tilde(const Geometry& geo)
{
    return to_partial_fractions(RationalSpectrum(-1.0, {}, geo.d_roots));
}

// (b1|g) and (b2|g) for a causal transform g~.
Vec2 b_moments(const PartialFractions& g, const Geometry& geo)
{
    const cx up(geo.w, geo.g), um(-geo.w, geo.g);
    cx m1, m2;
    if (geo.free_mass) {
        const auto t = g.taylor(cx(0.0, geo.g), 2);
        m1 = t[0];
        m2 = -I * t[1];
    } else {
        const cx a = g(up), b = g(um);
        m1 = 0.5 * (a + b);
        m2 = (a - b) / (2.0 * I * geo.w);
    }
    return {m1.real(), m2.real()};
}

// Constraint functions f1 = b1 + g b2 (position), f2 = b2 (momentum).
Vec2 f_moments(const PartialFractions& g, const Geometry& geo)
{
    const Vec2 b = b_moments(g, geo);
    return {b(0) + geo.g * b(1), b(1)};
}

double l2(const std::vector<double>& v, double h)
{
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s * h);
}

double slowest_decay(const PartialFractions& f)
{
    double r = std::numeric_limits<double>::infinity();
    for (const auto& t : f.terms()) r = std::min(r, -t.pole.imag());
    return r;
}

// Polynomials as ascending coefficient vectors.
std::vector<cx> poly_mul(const std::vector<cx>& a, const std::vector<cx>& b)
{
    std::vector<cx> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

std::vector<cx> poly_add(std::vector<cx> a, const std::vector<cx>& b)
{
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

std::vector<cx> poly_scale(std::vector<cx> a, cx s)
{
    for (auto& c : a) c *= s;
    return a;
}

cx poly_derivative_at(const std::vector<cx>& p, cx z, int k)
{
    cx v = 0.0;
    for (std::size_t n = p.size(); n-- > static_cast<std::size_t>(k);) {
        double fall = 1;
        for (int i = 0; i < k; ++i) fall *= static_cast<double>(n) - i;
        v += p[n] * fall * std::pow(z, static_cast<int>(n) - k);
    }
    return v;
}

// Quotient of p by (nu - z); the remainder is dropped.
std::vector<cx> poly_deflate(const std::vector<cx>& p, cx z)
{
    if (p.size() < 2) throw NumericalError("poly_deflate: constant polynomial");
    std::vector<cx> q(p.size() - 1);
    cx carry = 0.0;
    for (std::size_t n = p.size(); n-- > 1;) {
        carry = p[n] + carry * z;
        q[n - 1] = carry;
    }
    return q;
}

// num(nu) / (den_gain prod (nu - r)).
RationalSpectrum polynomial_over_roots(std::vector<cx> num, double den_gain, const std::vector<Root>& roots)
{
    double big = 0;
    for (const auto& c : num) big = std::max(big, std::abs(c));
    while (num.size() > 1 && std::abs(num.back()) <= 1e-14 * big) num.pop_back();
    std::vector<Root> zeros;
    for (cx r : polynomial_roots(num)) zeros.push_back({r, 1});
    return RationalSpectrum(num.back() / den_gain, zeros, roots);
}

nlohmann::json pf_json(const PartialFractions& f) { return f.to_json(); }

} // namespace

NoiseSpectra noise_spectra(const NoiseBudget& b, double omega_m, double gamma_m)
{
    b.validate();
    if (!(gamma_m > 0)) throw ValidationError("noise_spectra: gamma_m must be positive (real-axis response poles)");
    if (!(omega_m >= 0)) throw ValidationError("noise_spectra: omega_m must be non-negative");
    const DerivedScales d = derive(b);
    const Geometry geo = geometry(omega_m / b.omega_q, gamma_m / b.omega_q);
    const double e2q = std::exp(2.0 * b.q);
    NoiseSpectra s;
    s.s11 = 0.5 * (b.eta + (1.0 - b.eta) * e2q);
    s.k = 0.5 * (1.0 - b.eta) * e2q;
    s.beta = 0.5 * (1.0 - b.eta) * (e2q + 2.0 * d.zeta_f * d.zeta_f);
    s.kappa = s.beta - s.k * s.k / s.s11;
    s.lambda = d.lambda;
    s.response = RationalSpectrum(-1.0, {}, geo.d_roots);
    s.response_adj = RationalSpectrum(-1.0, {}, geo.dbar_roots);
    s.s12 = s.response_adj.scaled(s.k);
    s.s21 = s.response.scaled(s.k);

    // L^2/4 + c/(D Dbar) as a single ratio; the numerator roots are found
    // from the real quartic L^2/4 D Dbar + c.
    auto combine = [&](double c) {
        auto dd = expand_roots(geo.d_roots);
        auto db = expand_roots(geo.dbar_roots);
        std::vector<cx> prod(dd.size() + db.size() - 1, 0.0);
        for (std::size_t i = 0; i < dd.size(); ++i)
            for (std::size_t j = 0; j < db.size(); ++j) prod[i + j] += dd[i] * db[j];
        const double l24 = s.lambda * s.lambda / 4.0;
        std::vector<cx> num(prod.size());
        for (std::size_t i = 0; i < prod.size(); ++i) num[i] = cx(l24 * prod[i].real(), 0.0);
        num[0] += c;
        std::vector<Root> zeros;
        for (cx r : polynomial_roots(num)) zeros.push_back({r, 1});
        std::vector<Root> poles = geo.d_roots;
        poles.insert(poles.end(), geo.dbar_roots.begin(), geo.dbar_roots.end());
        return RationalSpectrum(l24, zeros, poles);
    };
    s.s22 = combine(s.beta);
    s.m_inverse = combine(s.kappa);
    return s;
}

WHSolution solve_optimal_filters(const NoiseBudget& b, double zeta, double omega_m, double gamma_m)
{
    WHSolution sol;
    sol.budget = b;
    sol.zeta = zeta;
    sol.omega_m = omega_m;
    sol.gamma_m = gamma_m;
    sol.spectra = noise_spectra(b, omega_m, gamma_m);
    const NoiseSpectra& sp = sol.spectra;
    const DerivedScales d = derive(b);
    const Geometry geo = geometry(omega_m / b.omega_q, gamma_m / b.omega_q);
    if (geo.free_mass && omega_m > 0) sol.warnings.push_back("omega_m below 1e-7 Omega_q treated as a free mass");

    sol.factors = spectral_factorize(sp.m_inverse);
    const double l24 = sp.lambda * sp.lambda / 4.0;

    // With T the Hermite interpolant of g2 at the poles of G~* (the anticausal
    // constants), (G~* g2)_- = -T/Dbar and the equation for g2 becomes
    //   g2 = (H Dbar + kappa T) / (L^2/4 Z+ Z-),   h~ = H/D,
    // where Z+- are the zeros of psi+-. Causality of g2 requires the
    // numerator to vanish on the zeros of psi-, which fixes T.
    const std::vector<cx> dbar = expand_roots(geo.dbar_roots);
    const cx centre(0.0, geo.g);
    const int nt = static_cast<int>(dbar.size()) - 1;
    std::vector<Root> zminus = sol.factors.minus.zeros();
    std::vector<Root> zplus = sol.factors.plus.zeros();
    std::vector<std::pair<cx, int>> conditions;  // (root, derivative order)
    for (const auto& z : zminus)
        for (int k = 0; k < z.multiplicity; ++k) conditions.emplace_back(z.value, k);
    if (static_cast<int>(conditions.size()) != nt)
        throw FactorizationError("solve_optimal_filters: psi- has an unexpected number of zeros");

    // H for the constraint functions: f1 = b1 + g b2 -> i nu - 2g, f2 = b2 -> -1.
    const std::array<std::vector<cx>, 2> hpoly = {std::vector<cx>{cx(-2.0 * geo.g, 0.0), I}, std::vector<cx>{-1.0}};

    Eigen::MatrixXcd sys(nt, nt);
    for (int r = 0; r < nt; ++r)
        for (int c = 0; c < nt; ++c) {
            // d^k/dnu^k (nu - centre)^c at the root
            const auto [z, k] = conditions[r];
            double fall = 1;
            for (int i = 0; i < k; ++i) fall *= (c - i);
            sys(r, c) = c >= k ? sp.kappa * fall * std::pow(z - centre, c - k) : cx(0.0);
        }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(sys);
    if (!lu.isInvertible()) throw NumericalError("solve_optimal_filters: anticausal-constant system is singular");

    Mat2 mhat;
    for (int j = 0; j < 2; ++j) {
        const std::vector<cx> hd = poly_mul(hpoly[j], dbar);
        Eigen::VectorXcd rhs(nt);
        for (int r = 0; r < nt; ++r) rhs(r) = -poly_derivative_at(hd, conditions[r].first, conditions[r].second);
        const Eigen::VectorXcd t = lu.solve(rhs);
        // numerator H Dbar + kappa T in powers of nu
        std::vector<cx> num = hd;
        std::vector<cx> shift{1.0};
        for (int c = 0; c < nt; ++c) {
            num = poly_add(num, poly_scale(shift, sp.kappa * t(c)));
            shift = poly_mul(shift, {-centre, 1.0});
        }
        for (const auto& z : zminus)
            for (int k = 0; k < z.multiplicity; ++k) num = poly_deflate(num, z.value);
        sol.basis_g2[j] = to_partial_fractions(polynomial_over_roots(num, l24, zplus));
        mhat.col(j) = f_moments(sol.basis_g2[j], geo);
    }
    mhat = 0.5 * (mhat + mhat.transpose()).eval();

    const double det = mhat.determinant();
    if (!(std::abs(det) > 1e-12 * mhat.squaredNorm()))
        throw DegenerateStateError("solve_optimal_filters: Lagrange system is singular (det = " + std::to_string(det) + ")");
    const Mat2 minv = mhat.inverse();
    const Vec2 mu_hat = minv * Vec2(std::cos(zeta), std::sin(zeta));

    sol.g2_hat = sol.basis_g2[0].scaled(mu_hat(0)) + sol.basis_g2[1].scaled(mu_hat(1));
    const CausalSplit adj = causal_split(sol.g2_hat.times(sp.response_adj));
    sol.g1_hat = adj.plus.scaled(-sp.k / sp.s11);

    sol.mu = mu_hat * b.omega_q;
    sol.moments = mhat / b.omega_q;
    sol.v_add_norm = 2.0 / (1.0 - b.eta) * minv;
    const Mat2 sc = Vec2(d.dx_q, d.dp_q).asDiagonal();
    sol.v_add = sc * sol.v_add_norm * sc;
    sol.u_add = std::sqrt(std::max(sol.v_add_norm.determinant(), 0.0));
    sol.kappa = b.mass * b.mass * std::pow(b.omega_q, 4) * sp.kappa;
    sol.decay_rate = b.omega_q * std::min(slowest_decay(sol.g2_hat), slowest_decay(sol.g1_hat));

    // L^2/4 g2 + kappa G~ (G~* g2)_+ - h~ = 0 pointwise on a real grid, relative
    // to the sum of the magnitudes of the three terms.
    {
        const PartialFractions hz = b1_tilde(geo).scaled(mu_hat(0)) + b2_tilde(geo).scaled(geo.g * mu_hat(0) + mu_hat(1));
        const PartialFractions back = adj.plus.times(sp.response.scaled(sp.kappa));
        const double span = 50.0 * sol.decay_rate / b.omega_q;
        double worst = 0;
        for (int i = -500; i <= 500; ++i) {
            const double nu_i = span * i / 500.0;
            const cx t1 = l24 * sol.g2_hat(nu_i), t2 = back(nu_i), t3 = hz(nu_i);
            const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
            if (scale > 0) worst = std::max(worst, std::abs(t1 + t2 - t3) / scale);
        }
        sol.frequency_residual = worst;
    }
    return sol;
}

WHSolution solve_optimal_filters(const NoiseBudget& b, double zeta)
{
    const double gamma = b.gamma_m > 0 ? b.gamma_m : free_mass_gamma * b.omega_q;
    return solve_optimal_filters(b, zeta, b.omega_m, gamma);
}

cx WHSolution::g1_tilde(double omega) const { return g1_hat(omega / budget.omega_q); }
cx WHSolution::g2_tilde(double omega) const { return g2_hat(omega / budget.omega_q); }

double WHSolution::truncation_error(double length) const { return std::exp(-decay_rate * length); }

FilterPair WHSolution::filters(const TimeGrid& grid) const
{
    FilterPair f;
    f.zeta = zeta;
    f.grid = grid;
    f.provenance = Provenance::wiener_hopf;
    f.t = grid.samples();
    std::vector<double> th(f.t.size());
    for (std::size_t i = 0; i < th.size(); ++i) th[i] = budget.omega_q * f.t[i];
    const auto s1 = inverse_transform(g1_hat, th);
    const auto s2 = inverse_transform(g2_hat, th);
    if (s1.max_imag_rel > 1e-8 || s2.max_imag_rel > 1e-8) {
        std::ostringstream os;
        os << "WHSolution::filters: inverse transform is not real (rel. imaginary part "
           << std::max(s1.max_imag_rel, s2.max_imag_rel) << ")";
        throw NumericalError(os.str());
    }
    f.g1.resize(th.size());
    f.g2.resize(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) {
        f.g1[i] = budget.omega_q * s1.values[i];
        f.g2[i] = budget.omega_q * s2.values[i];
    }
    return f;
}

nlohmann::json WHSolution::to_json() const
{
    nlohmann::json j;
    j["zeta"] = zeta;
    j["omega_m"] = omega_m;
    j["gamma_m"] = gamma_m;
    j["kappa"] = kappa;
    j["kappa_hat"] = spectra.kappa;
    j["mu"] = {mu(0), mu(1)};
    j["moments"] = mqm::to_json(moments);
    j["v_add_norm"] = mqm::to_json(v_add_norm);
    j["v_add"] = mqm::to_json(Mat2(v_add));
    j["u_add"] = u_add;
    j["decay_rate"] = decay_rate;
    j["frequency_residual"] = frequency_residual;
    j["m_inverse"] = spectra.m_inverse.to_json();
    j["psi_plus"] = factors.plus.to_json();
    j["psi_minus"] = factors.minus.to_json();
    j["g1_hat"] = pf_json(g1_hat);
    j["g2_hat"] = pf_json(g2_hat);
    j["warnings"] = warnings;
    return j;
}

WHTimeResidual time_domain_residual(const WHSolution& s, double step_hat, double length_in_decay_times)
{
    if (!(step_hat > 0) || !(length_in_decay_times > 0)) throw ValidationError("time_domain_residual: bad grid");
    const NoiseBudget& b = s.budget;
    const NoiseSpectra& sp = s.spectra;
    const Geometry geo = geometry(s.omega_m / b.omega_q, s.gamma_m / b.omega_q);
    const double len_hat = length_in_decay_times * b.omega_q / s.decay_rate;
    if (geo.g * len_hat > 600) throw ValidationError("time_domain_residual: damping too strong for the separable kernel");
    TimeGrid grid;
    grid.step = step_hat;
    grid.points = static_cast<std::size_t>(std::ceil(len_hat / step_hat)) + 1;
    const auto t = grid.samples();
    const std::size_t n = t.size();
    const auto g1 = inverse_transform(s.g1_hat, t).values;
    const auto g2 = inverse_transform(s.g2_hat, t).values;
    const Vec2 mu_hat = s.mu / b.omega_q;

    // G^(t' - t) = sum_k a_k(t) c_k(t') for t' > t.
    std::array<std::vector<double>, 2> a, c;
    for (auto* v : {&a[0], &a[1], &c[0], &c[1]}) v->resize(n);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double up = std::exp(geo.g * t[i]), dn = std::exp(-geo.g * t[i]);
        double f2;
        if (geo.free_mass) {
            a[0][i] = up;
            a[1][i] = -t[i] * up;
            c[0][i] = t[i] * dn;
            c[1][i] = dn;
            f2 = t[i] * dn;
        } else {
            const double cw = std::cos(geo.w * t[i]), sw = std::sin(geo.w * t[i]);
            a[0][i] = up * cw / geo.w;
            a[1][i] = -up * sw / geo.w;
            c[0][i] = dn * sw;
            c[1][i] = dn * cw;
            f2 = dn * sw / geo.w;
        }
        const double b1 = geo.free_mass ? dn : dn * std::cos(geo.w * t[i]);
        h[i] = mu_hat(0) * (b1 + geo.g * f2) + mu_hat(1) * f2;
    }
    auto backward = [&](const std::vector<double>& v) {  // int_t^T G(t'-t) v(t') dt'
        std::vector<double> out(n, 0.0), y(n);
        for (int k = 0; k < 2; ++k) {
            for (std::size_t i = 0; i < n; ++i) y[i] = c[k][i] * v[i];
            const auto tail = tail_integral_cubic(y, step_hat);
            for (std::size_t i = 0; i < n; ++i) out[i] += a[k][i] * tail[i];
        }
        return out;
    };
    auto forward = [&](const std::vector<double>& v) {  // int_0^t G(t-t1) v(t1) dt1
        std::vector<double> out(n, 0.0), y(n);
        for (int k = 0; k < 2; ++k) {
            for (std::size_t i = 0; i < n; ++i) y[i] = a[k][i] * v[i];
            const auto head = head_integral_cubic(y, step_hat);
            for (std::size_t i = 0; i < n; ++i) out[i] += c[k][i] * head[i];
        }
        return out;
    };
    const auto u = backward(g2);
    const auto fu = forward(u);
    const auto fg1 = forward(g1);
    std::vector<double> r1(n), r2(n), s1g1(n);
    const double l24 = sp.lambda * sp.lambda / 4.0;
    for (std::size_t i = 0; i < n; ++i) {
        s1g1[i] = sp.s11 * g1[i];
        r1[i] = s1g1[i] + sp.k * u[i];
        r2[i] = l24 * g2[i] + sp.beta * fu[i] + sp.k * fg1[i] - h[i];
    }
    WHTimeResidual res;
    res.bae = l2(r1, step_hat) / l2(s1g1, step_hat);
    res.variational = l2(r2, step_hat) / l2(h, step_hat);
    res.step = step_hat / b.omega_q;
    res.length = grid.length() / b.omega_q;
    return res;
}

} // namespace mqm
