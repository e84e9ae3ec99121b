#include <doctest.h>

#include "generators.hpp"
#include "mqm/errors.hpp"
#include "mqm/rational.hpp"
#include "mqm/verification.hpp"
#include "mqm/wiener_hopf.hpp"

#include <cmath>

using namespace mqm;
using constants::pi;

namespace {

const cx I(0.0, 1.0);

// Random real rational function with simple poles off the real axis.
RationalSpectrum random_rational(gen::Rng& rng)
{
    std::vector<Root> poles, zeros;
    const int np = 1 + static_cast<int>(gen::uniform(rng, 0, 2.99));
    for (int k = 0; k < np; ++k) {
        const double re = gen::uniform(rng, -2, 2), im = gen::uniform(rng, 0.2, 2) * (k % 2 ? 1 : -1);
        poles.push_back({cx(re, im), 1});
        poles.push_back({cx(-re, im), 1});  // f(-w*)* = f(w): real impulse response
    }
    const int nz = static_cast<int>(gen::uniform(rng, 0, 2 * np - 0.01));
    for (int k = 0; k < nz; ++k) zeros.push_back({cx(0, gen::uniform(rng, -3, 3)), 1});
    return RationalSpectrum(gen::uniform(rng, 0.5, 2), zeros, poles);
}

} // namespace

TEST_CASE("polynomial_roots recovers known roots")
{
    const std::vector<Root> r{{cx(1, 0), 1}, {cx(-2, 0.5), 1}, {cx(0.3, -1), 1}, {cx(0, 3), 1}};
    const auto roots = polynomial_roots(expand_roots(r));
    REQUIRE(roots.size() == 4);
    for (const auto& want : r) {
        double best = 1e9;
        for (cx z : roots) best = std::min(best, std::abs(z - want.value));
        CHECK(best < 1e-12);
    }
}

TEST_CASE("causal split of a Lorentzian")
{
    const double a = 0.7;
    const RationalSpectrum f(2 * a, {}, {{cx(0, -a), 1}, {cx(0, a), 1}});
    const CausalSplit s = causal_split(f);
    for (double w : {-3.0, -0.5, 0.0, 1.2, 4.0}) {
        CHECK(std::abs(s.plus(w) - I / (w + I * a)) < 1e-12);
        CHECK(std::abs(s.minus(w) + I / (w - I * a)) < 1e-12);
    }
    const CausalSplit c = causal_split(RationalSpectrum::constant(2.5));
    CHECK(std::abs(c.plus(0.3) - 2.5) < 1e-15);
    CHECK(c.minus.terms().empty());
}

TEST_CASE("property: causal split reconstructs and is idempotent")
{
    gen::Rng rng(601);
    for (int i = 0; i < 100; ++i) {
        const RationalSpectrum f = random_rational(rng);
        const CausalSplit s = causal_split(f);
        for (int k = 0; k < 50; ++k) {
            const double w = gen::uniform(rng, -10, 10);
            CHECK(std::abs(s.plus(w) + s.minus(w) - f(w)) < 1e-10 * (1 + std::abs(f(w))));
        }
        const CausalSplit again = causal_split(s.plus);
        CHECK(again.minus.terms().empty());
        for (double w : {-1.0, 0.5, 2.0}) CHECK(std::abs(again.plus(w) - s.plus(w)) < 1e-12);
    }
}

TEST_CASE("spectral factorization")
{
    const SpectralFactors c = spectral_factorize(RationalSpectrum::constant(4.0));
    CHECK(std::abs(c.plus(0.3) - 2.0) < 1e-14);

    const double a = 0.5, b = 2.0;
    // (w^2 + a^2)/(w^2 + b^2)
    const RationalSpectrum s(1.0, {{cx(0, a), 1}, {cx(0, -a), 1}}, {{cx(0, b), 1}, {cx(0, -b), 1}});
    const SpectralFactors f = spectral_factorize(s);
    for (double w : {-5.0, -1.0, 0.0, 0.7, 3.0}) {
        CHECK(std::abs(f.plus(w) * f.minus(w) - s(w)) < 1e-12);
        CHECK(std::abs(std::abs(f.plus(w)) - std::abs((w + I * a) / (w + I * b))) < 1e-12);
    }
    for (const auto& z : f.plus.zeros()) CHECK(z.value.imag() < 0);
    for (const auto& p : f.plus.poles()) CHECK(p.value.imag() < 0);
}

TEST_CASE("factorization of the conditional noise spectrum")
{
    const NoiseBudget b = NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.2, 0.2, 0.01, 0.0);
    const NoiseSpectra ns = noise_spectra(b, 0.0, free_mass_gamma * b.omega_q);
    const SpectralFactors f = spectral_factorize(ns.m_inverse);
    CHECK(ns.m_inverse.numerator_degree() == 4);
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
        const double w = -5.0 + 10.0 * k / 999;
        const cx s = ns.m_inverse(w);
        worst = std::max(worst, std::abs(f.plus(w) * std::conj(f.plus(w)) - s) / std::abs(s));
    }
    CHECK(worst < 1e-10);
    CHECK(ns.kappa == doctest::Approx(std::pow(effective_zeta_f(b), 2)).epsilon(1e-12));
}

TEST_CASE("inverse transform")
{
    const double a = 1.3;
    PartialFractions g;
    g.add_term(cx(0, -a), 1, I);
    const std::vector<double> t{0.0, 0.5, 1.0, 3.0};
    const TimeSamples s = inverse_transform(g, t);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(s.values[k] == doctest::Approx(std::exp(-a * t[k])));

    // conjugate pole pair -> damped sinusoid, real
    PartialFractions h;
    h.add_term(cx(2.0, -0.3), 1, cx(0.5, 0.2));
    h.add_term(cx(-2.0, -0.3), 1, cx(-0.5, 0.2));
    const TimeSamples hs = inverse_transform(h, {0.1, 0.7, 2.0});
    CHECK(hs.max_imag_rel < 1e-12);

    PartialFractions bad;
    bad.add_term(cx(0, 1), 1, 1.0);
    CHECK_THROWS(inverse_transform(bad, t));
}

TEST_CASE("optimal filters agree with the free-mass closed forms")
{
    for (double eta : {0.0, 0.01})
        for (double q : {0.0, squeeze_q_from_db(10.0)}) {
            const NoiseBudget b = NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.2, 0.2, eta, q);
            const DerivedScales d = derive(b);
            const TimeGrid grid = default_filter_grid(b);
            const double tv = 1.0 / (b.omega_q * d.chi);
            const Mat2 cf = normalized(added_noise_covariance(b).cov, d);
            for (double zeta : {0.0, pi / 2}) {
                const WHSolution s = solve_optimal_filters(b, zeta);
                const FilterPair w = s.filters(grid), c = closed_form_filters(b, zeta, grid);
                double num = 0, den = 0;
                for (std::size_t i = 0; i < grid.points && w.t[i] <= 10 * tv; ++i) {
                    num += std::pow(w.g2[i] - c.g2[i], 2);
                    den += c.g2[i] * c.g2[i];
                }
                CHECK(std::sqrt(num / den) < 1e-2);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) CHECK(s.v_add_norm(i, j) == doctest::Approx(cf(i, j)).epsilon(1e-2));
                CHECK(s.decay_rate == doctest::Approx(b.omega_q * d.chi).epsilon(0.02));
            }
        }
}

TEST_CASE("integral-equation residuals")
{
    gen::Rng rng(602);
    for (int i = 0; i < 6; ++i) {
        const NoiseBudget b = NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), gen::uniform(rng, 0.1, 0.5),
                                                       gen::uniform(rng, 0.05, 0.5), i % 2 ? 0.0 : 0.02,
                                                       gen::uniform(rng, 0, 1));
        const double wm = gen::uniform(rng, 0, 0.5) * b.omega_q, gm = gen::log_uniform(rng, 1e-6, 0.05) * b.omega_q;
        const WHSolution s = solve_optimal_filters(b, gen::uniform(rng, 0, pi), wm, gm);
        const WHTimeResidual r = time_domain_residual(s);
        CHECK(s.frequency_residual < 1e-9);
        CHECK(r.bae < 1e-6);
        CHECK(r.variational < 1e-6);
    }
}

TEST_CASE("solver input checks")
{
    const NoiseBudget b = NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.2, 0.2);
    CHECK_THROWS_AS(noise_spectra(b, 0.0, 0.0), ValidationError);
}
