#include "mqm/rational.hpp"

#include "mqm/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mqm {

namespace {

const cx I(0.0, 1.0);

bool same_root(cx a, cx b)
{
    if (a == b) return true;
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

void merge_into(std::vector<Root>& roots, const Root& r)
{
    for (auto& e : roots)
        if (same_root(e.value, r.value)) {
            e.multiplicity += r.multiplicity;
            return;
        }
    roots.push_back(r);
}

int total(const std::vector<Root>& roots)
{
    int n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
}

double binom(int n, int k)
{
    double b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// truncated product of two power series in u
std::vector<cx> series_mul(const std::vector<cx>& a, const std::vector<cx>& b, std::size_t order)
{
    std::vector<cx> out(order, 0.0);
    for (std::size_t i = 0; i < std::min(order, a.size()); ++i)
        for (std::size_t j = 0; i + j < order && j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// (u + a)^m, m >= 0, truncated
std::vector<cx> shifted_power(cx a, int m, std::size_t order)
{
    std::vector<cx> s(order, 0.0);
    for (int n = 0; n <= m && n < static_cast<int>(order); ++n) s[n] = binom(m, n) * std::pow(a, m - n);
    return s;
}

// (u + b)^{-m}, m > 0, truncated
std::vector<cx> shifted_inverse_power(cx b, int m, std::size_t order)
{
    std::vector<cx> s(order, 0.0);
    for (int n = 0; n < static_cast<int>(order); ++n)
        s[n] = (n % 2 ? -1.0 : 1.0) * binom(m + n - 1, n) * std::pow(b, -m - n);
    return s;
}

cx horner(const std::vector<cx>& c, cx z, cx* deriv)
{
    cx p = 0.0, dp = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
        dp = dp * z + p;
        p = p * z + c[k];
    }
    if (deriv) *deriv = dp;
    return p;
}

std::string root_str(cx r)
{
    std::ostringstream os;
    os << "(" << r.real() << (r.imag() < 0 ? " - " : " + ") << std::abs(r.imag()) << "i)";
    return os.str();
}

} // namespace

std::vector<cx> polynomial_roots(const std::vector<cx>& coeffs_ascending, double tol)
{
    std::vector<cx> c = coeffs_ascending;
    while (!c.empty() && c.back() == cx(0.0)) c.pop_back();
    if (c.size() < 2) return {};
    const int n = static_cast<int>(c.size()) - 1;
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<cx> z(es.eigenvalues().data(), es.eigenvalues().data() + n);
    // Aberth polishing
    for (int it = 0; it < 100; ++it) {
        double max_step = 0;
        for (int k = 0; k < n; ++k) {
            cx dp;
            const cx p = horner(c, z[k], &dp);
            if (p == cx(0.0)) continue;
            const cx ratio = p / dp;
            cx s = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != k) s += 1.0 / (z[k] - z[j]);
            const cx w = ratio / (1.0 - ratio * s);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
            z[k] -= w;
            max_step = std::max(max_step, std::abs(w) / std::max(std::abs(z[k]), 1e-300));
        }
        if (max_step < tol) break;
    }
    return z;
}

std::vector<cx> expand_roots(const std::vector<Root>& roots)
{
    std::vector<cx> c{1.0};
    for (const auto& r : roots)
        for (int m = 0; m < r.multiplicity; ++m) {
            std::vector<cx> next(c.size() + 1, 0.0);
            for (std::size_t k = 0; k < c.size(); ++k) {
                next[k + 1] += c[k];
                next[k] -= r.value * c[k];
            }
            c = std::move(next);
        }
    return c;
}

bool on_real_axis(cx r) { return std::abs(r.imag()) < 1e-10 * (1.0 + std::abs(r)); }

HalfPlane half_plane_of(cx r)
{
    if (on_real_axis(r)) throw FactorizationError("root " + root_str(r) + " lies on the real axis");
    return r.imag() > 0 ? HalfPlane::upper : HalfPlane::lower;
}

RationalSpectrum::RationalSpectrum(cx gain, std::vector<Root> zeros, std::vector<Root> poles) : gain_(gain)
{
    for (const auto& z : zeros)
        if (z.multiplicity > 0) merge_into(zeros_, z);
    for (const auto& p : poles)
        if (p.multiplicity > 0) merge_into(poles_, p);
    for (auto& z : zeros_)
        for (auto& p : poles_)
            if (z.multiplicity > 0 && p.multiplicity > 0 && same_root(z.value, p.value)) {
                const int k = std::min(z.multiplicity, p.multiplicity);
                z.multiplicity -= k;
                p.multiplicity -= k;
            }
    auto empty = [](const Root& r) { return r.multiplicity == 0; };
    zeros_.erase(std::remove_if(zeros_.begin(), zeros_.end(), empty), zeros_.end());
    poles_.erase(std::remove_if(poles_.begin(), poles_.end(), empty), poles_.end());
    if (gain_ == cx(0.0)) {
        zeros_.clear();
        poles_.clear();
    }
}

RationalSpectrum RationalSpectrum::from_coefficients(const std::vector<double>& num, const std::vector<double>& den)
{
    auto lead = [](const std::vector<double>& c) {
        for (std::size_t k = c.size(); k-- > 0;)
            if (c[k] != 0.0) return c[k];
        return 0.0;
    };
    const double ln = lead(num), ld = lead(den);
    if (ld == 0.0) throw ValidationError("rational spectrum: zero denominator");
    auto roots_of = [](const std::vector<double>& c) {
        std::vector<cx> cc(c.begin(), c.end());
        std::vector<Root> out;
        for (cx r : polynomial_roots(cc)) out.push_back({r, 1});
        return out;
    };
    return RationalSpectrum(ln / ld, roots_of(num), roots_of(den));
}

cx RationalSpectrum::operator()(cx w) const
{
    cx v = gain_;
    for (const auto& z : zeros_) v *= std::pow(w - z.value, z.multiplicity);
    for (const auto& p : poles_) v /= std::pow(w - p.value, p.multiplicity);
    return v;
}

RationalSpectrum RationalSpectrum::operator*(const RationalSpectrum& o) const
{
    std::vector<Root> z = zeros_, p = poles_;
    z.insert(z.end(), o.zeros_.begin(), o.zeros_.end());
    p.insert(p.end(), o.poles_.begin(), o.poles_.end());
    return RationalSpectrum(gain_ * o.gain_, z, p);
}

RationalSpectrum RationalSpectrum::inverse() const
{
    if (gain_ == cx(0.0)) throw NumericalError("rational spectrum: inverse of zero");
    return RationalSpectrum(1.0 / gain_, poles_, zeros_);
}

int RationalSpectrum::numerator_degree() const { return total(zeros_); }
int RationalSpectrum::denominator_degree() const { return total(poles_); }

std::vector<Root> RationalSpectrum::zeros_in(HalfPlane h) const
{
    std::vector<Root> out;
    for (const auto& z : zeros_)
        if (half_plane_of(z.value) == h) out.push_back(z);
    return out;
}

std::vector<Root> RationalSpectrum::poles_in(HalfPlane h) const
{
    std::vector<Root> out;
    for (const auto& p : poles_)
        if (half_plane_of(p.value) == h) out.push_back(p);
    return out;
}

std::vector<cx> RationalSpectrum::numerator_coefficients() const
{
    auto c = expand_roots(zeros_);
    for (auto& v : c) v *= gain_;
    return c;
}

std::vector<cx> RationalSpectrum::denominator_coefficients() const { return expand_roots(poles_); }

namespace {
nlohmann::json roots_json(const std::vector<Root>& roots)
{
    auto a = nlohmann::json::array();
    for (const auto& r : roots) a.push_back({{"re", r.value.real()}, {"im", r.value.imag()}, {"multiplicity", r.multiplicity}});
    return a;
}
} // namespace

nlohmann::json RationalSpectrum::to_json() const
{
    return {{"gain", {gain_.real(), gain_.imag()}}, {"zeros", roots_json(zeros_)}, {"poles", roots_json(poles_)}};
}

cx PartialFractions::operator()(cx w) const
{
    cx v = constant_;
    for (const auto& t : terms_) {
        const cx inv = 1.0 / (w - t.pole);
        cx pw = inv;
        for (const auto& c : t.coeffs) {
            v += c * pw;
            pw *= inv;
        }
    }
    return v;
}

std::vector<cx> PartialFractions::taylor(cx at, int order) const
{
    std::vector<cx> out(std::max(order, 0), 0.0);
    if (order <= 0) return out;
    out[0] = constant_;
    for (const auto& t : terms_) {
        const cx b = at - t.pole;
        if (b == cx(0.0)) throw NumericalError("taylor expansion requested at a pole");
        for (std::size_t j = 0; j < t.coeffs.size(); ++j) {
            const auto s = shifted_inverse_power(b, static_cast<int>(j) + 1, order);
            for (int n = 0; n < order; ++n) out[n] += t.coeffs[j] * s[n];
        }
    }
    return out;
}

void PartialFractions::add_term(cx pole, int order, cx coeff)
{
    if (order < 1) throw ValidationError("partial fraction term order must be >= 1");
    for (auto& t : terms_)
        if (same_root(t.pole, pole)) {
            if (static_cast<int>(t.coeffs.size()) < order) t.coeffs.resize(order, 0.0);
            t.coeffs[order - 1] += coeff;
            return;
        }
    PoleTerm t;
    t.pole = pole;
    t.coeffs.assign(order, 0.0);
    t.coeffs[order - 1] = coeff;
    terms_.push_back(std::move(t));
}

PartialFractions& PartialFractions::operator+=(const PartialFractions& o)
{
    constant_ += o.constant_;
    for (const auto& t : o.terms_)
        for (std::size_t j = 0; j < t.coeffs.size(); ++j)
            if (t.coeffs[j] != cx(0.0)) add_term(t.pole, static_cast<int>(j) + 1, t.coeffs[j]);
    return *this;
}

PartialFractions PartialFractions::operator+(const PartialFractions& o) const
{
    PartialFractions r = *this;
    r += o;
    return r;
}

PartialFractions PartialFractions::operator-(const PartialFractions& o) const { return *this + o.scaled(-1.0); }

PartialFractions PartialFractions::scaled(cx s) const
{
    PartialFractions r = *this;
    r.constant_ *= s;
    for (auto& t : r.terms_)
        for (auto& c : t.coeffs) c *= s;
    return r;
}

PartialFractions PartialFractions::times(const RationalSpectrum& r) const
{
    PartialFractions out;
    if (constant_ != cx(0.0)) out += to_partial_fractions(r.scaled(constant_));
    for (const auto& t : terms_)
        for (std::size_t j = 0; j < t.coeffs.size(); ++j) {
            if (t.coeffs[j] == cx(0.0)) continue;
            const RationalSpectrum term(t.coeffs[j], {}, {{t.pole, static_cast<int>(j) + 1}});
            out += to_partial_fractions(term * r);
        }
    return out;
}

PartialFractions PartialFractions::principal_part_at(cx pole) const
{
    PartialFractions out;
    for (const auto& t : terms_)
        if (same_root(t.pole, pole)) out.terms_.push_back(t);
    return out;
}

nlohmann::json PartialFractions::to_json() const
{
    auto terms = nlohmann::json::array();
    for (const auto& t : terms_) {
        auto cs = nlohmann::json::array();
        for (const auto& c : t.coeffs) cs.push_back({c.real(), c.imag()});
        terms.push_back({{"pole", {t.pole.real(), t.pole.imag()}}, {"coefficients", cs}});
    }
    return {{"constant", {constant_.real(), constant_.imag()}}, {"terms", terms}};
}

PartialFractions to_partial_fractions(const RationalSpectrum& r)
{
    const int nd = r.numerator_degree(), dd = r.denominator_degree();
    if (nd > dd) throw ValidationError("partial fractions: numerator degree exceeds denominator degree");
    PartialFractions out(nd == dd ? r.gain() : cx(0.0));
    for (const auto& p : r.poles()) {
        const std::size_t k = static_cast<std::size_t>(p.multiplicity);
        std::vector<cx> g(k, 0.0);
        g[0] = r.gain();
        for (const auto& z : r.zeros()) g = series_mul(g, shifted_power(p.value - z.value, z.multiplicity, k), k);
        for (const auto& q : r.poles()) {
            if (&q == &p) continue;
            g = series_mul(g, shifted_inverse_power(p.value - q.value, q.multiplicity, k), k);
        }
        for (std::size_t j = 1; j <= k; ++j) out.add_term(p.value, static_cast<int>(j), g[k - j]);
    }
    return out;
}

CausalSplit causal_split(const PartialFractions& f)
{
    CausalSplit s;
    s.plus.set_constant(f.constant());
    for (const auto& t : f.terms()) {
        PartialFractions one;
        for (std::size_t j = 0; j < t.coeffs.size(); ++j) one.add_term(t.pole, static_cast<int>(j) + 1, t.coeffs[j]);
        if (half_plane_of(t.pole) == HalfPlane::lower)
            s.plus += one;
        else
            s.minus += one;
    }
    return s;
}

CausalSplit causal_split(const RationalSpectrum& f) { return causal_split(to_partial_fractions(f)); }

SpectralFactors spectral_factorize(const RationalSpectrum& s)
{
    const cx g = s.gain();
    if (!(g.real() > 0) || std::abs(g.imag()) > 1e-12 * std::abs(g))
        throw FactorizationError("spectral_factorize: spectrum gain is not real and positive");
    for (cx w : {cx(0.0), cx(1.0), cx(-1.0)}) {
        const cx v = s(w);
        if (!(v.real() > 0) || std::abs(v.imag()) > 1e-8 * std::abs(v))
            throw FactorizationError("spectral_factorize: spectrum is not real and positive on the real axis");
    }
    const auto zl = s.zeros_in(HalfPlane::lower), zu = s.zeros_in(HalfPlane::upper);
    const auto pl = s.poles_in(HalfPlane::lower), pu = s.poles_in(HalfPlane::upper);
    const int kl = total(pl) - total(zl);
    const int ku = total(pu) - total(zu);
    if (kl != ku || total(zl) != total(zu))
        throw FactorizationError("spectral_factorize: roots are not paired across the real axis");
    cx phase = 1.0;
    for (int i = 0; i < ((kl % 4) + 4) % 4; ++i) phase *= I;
    const cx gp = std::sqrt(g.real()) * phase;
    SpectralFactors f;
    f.plus = RationalSpectrum(gp, zl, pl);
    f.minus = RationalSpectrum(g / gp, zu, pu);
    return f;
}

TimeSamples inverse_transform(const PartialFractions& causal, const std::vector<double>& t)
{
    for (const auto& term : causal.terms())
        if (half_plane_of(term.pole) == HalfPlane::upper)
            throw NumericalError("inverse_transform: pole " + root_str(term.pole) + " in the upper half plane violates causality");
    TimeSamples out;
    out.impulse = causal.constant();
    out.values.resize(t.size());
    double max_re = 0, max_im = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        cx v = 0.0;
        for (const auto& term : causal.terms()) {
            const cx e = std::exp(-I * term.pole * t[i]);
            cx pw = 1.0;  // (-i t)^j / j!
            for (std::size_t j = 0; j < term.coeffs.size(); ++j) {
                v += -I * term.coeffs[j] * pw * e;
                pw *= -I * t[i] / static_cast<double>(j + 1);
            }
        }
        out.values[i] = v.real();
        max_re = std::max(max_re, std::abs(v.real()));
        max_im = std::max(max_im, std::abs(v.imag()));
    }
    out.max_imag_rel = max_re > 0 ? max_im / max_re : max_im;
    return out;
}

} // namespace mqm
