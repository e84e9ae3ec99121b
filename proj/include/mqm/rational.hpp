#pragma once

#include <complex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mqm {

using cx = std::complex<double>;

struct Root {
    cx value;
    int multiplicity = 1;
};

// Roots of sum_k c[k] z^k (ascending coefficients): companion-matrix
// eigenvalues polished by Aberth iterations.
std::vector<cx> polynomial_roots(const std::vector<cx>& coeffs_ascending, double tol = 1e-13);

// Ascending coefficients of prod (z - r_k)^{m_k}.
std::vector<cx> expand_roots(const std::vector<Root>& roots);

enum class HalfPlane { upper, lower };

// |Im r| < 1e-10 (1 + |r|) counts as on the real axis.
bool on_real_axis(cx r);
HalfPlane half_plane_of(cx r);

// gain * prod (w - z)^m / prod (w - p)^m. Coincident zeros and poles
// cancel on construction; repeated roots merge into multiplicities.
class RationalSpectrum {
public:
    RationalSpectrum() = default;
    RationalSpectrum(cx gain, std::vector<Root> zeros, std::vector<Root> poles);

    static RationalSpectrum constant(cx c) { return RationalSpectrum(c, {}, {}); }
    // Ascending real coefficients of numerator and denominator.
    static RationalSpectrum from_coefficients(const std::vector<double>& num, const std::vector<double>& den);

    cx operator()(cx w) const;

    RationalSpectrum operator*(const RationalSpectrum& o) const;
    RationalSpectrum inverse() const;
    RationalSpectrum scaled(cx s) const { return RationalSpectrum(gain_ * s, zeros_, poles_); }

    cx gain() const { return gain_; }
    const std::vector<Root>& zeros() const { return zeros_; }
    const std::vector<Root>& poles() const { return poles_; }
    int numerator_degree() const;
    int denominator_degree() const;

    std::vector<Root> zeros_in(HalfPlane h) const;
    std::vector<Root> poles_in(HalfPlane h) const;

    std::vector<cx> numerator_coefficients() const;    // ascending, gain included
    std::vector<cx> denominator_coefficients() const;  // ascending, monic

    nlohmann::json to_json() const;

private:
    cx gain_ = 0.0;
    std::vector<Root> zeros_;
    std::vector<Root> poles_;
};

// c[j] multiplies 1/(w - pole)^{j+1}.
struct PoleTerm {
    cx pole;
    std::vector<cx> coeffs;
};

// constant + sum of principal parts.
class PartialFractions {
public:
    PartialFractions() = default;
    explicit PartialFractions(cx constant) : constant_(constant) {}

    cx operator()(cx w) const;
    // Coefficients of (w - at)^n, n = 0 .. order-1, about a regular point.
    std::vector<cx> taylor(cx at, int order) const;

    PartialFractions& operator+=(const PartialFractions& o);
    PartialFractions operator+(const PartialFractions& o) const;
    PartialFractions operator-(const PartialFractions& o) const;
    PartialFractions scaled(cx s) const;

    // Product with a rational function, term by term so that zeros of r
    // cancel the poles of each term exactly.
    PartialFractions times(const RationalSpectrum& r) const;

    void add_term(cx pole, int order, cx coeff);

    // Terms whose pole matches `pole`.
    PartialFractions principal_part_at(cx pole) const;

    cx constant() const { return constant_; }
    void set_constant(cx c) { constant_ = c; }
    const std::vector<PoleTerm>& terms() const { return terms_; }

    nlohmann::json to_json() const;

private:
    cx constant_ = 0.0;
    std::vector<PoleTerm> terms_;
};

PartialFractions to_partial_fractions(const RationalSpectrum& r);

struct CausalSplit {
    PartialFractions plus;   // poles in the lower half plane, plus the constant at infinity
    PartialFractions minus;  // poles in the upper half plane
};

CausalSplit causal_split(const PartialFractions& f);
CausalSplit causal_split(const RationalSpectrum& f);

struct SpectralFactors {
    RationalSpectrum plus;   // zeros and poles in the lower half plane
    RationalSpectrum minus;  // zeros and poles in the upper half plane
};

// S = psi_plus psi_minus with psi_minus = conj(psi_plus) on the real axis.
// psi_plus carries the phase i^k (k = pole excess) so that it is the
// transform of a real causal function.
SpectralFactors spectral_factorize(const RationalSpectrum& s);

struct TimeSamples {
    std::vector<double> values;
    double max_imag_rel = 0;  // max |Im| / max |Re| before discarding Im
    cx impulse = 0.0;         // weight of delta(t) from the constant term
};

// g(t) = (1/2pi) int g~(w) e^{-i w t} dw for t > 0 where
// g~(w) = int g(t) e^{i w t} dt. Throws when a pole lies in the upper half plane.
TimeSamples inverse_transform(const PartialFractions& causal, const std::vector<double>& t);

} // namespace mqm
