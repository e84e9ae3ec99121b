#include <doctest.h>

#include "generators.hpp"
#include "mqm/evolution.hpp"
#include "mqm/preparation.hpp"

#include <cmath>

using namespace mqm;
using constants::pi;

namespace {

NoiseBudget oscillator(double zeta_f, double omega_m_hz)
{
    NoiseBudget b = NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), zeta_f, 0.2);
    b.omega_m = hz_to_rad(omega_m_hz);
    return b;
}

double max_rel(const Mat2& a, const Mat2& b) { return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("evolve_exact at tau = 0 is the identity")
{
    const NoiseBudget b = oscillator(0.2, 1.0);
    const GaussianState s = conditional_covariance(b).state;
    const EvolutionResult r = evolve_exact(s, b, 0.0);
    CHECK(max_rel(r.state.cov, s.cov) < 1e-15);
}

TEST_CASE("quarter period without thermal noise swaps the quadratures")
{
    NoiseBudget b = oscillator(0.0, 1.0);
    GaussianState s;
    s.cov << 3e-36, 0.0, 0.0, 7e-31;
    const double tau = (pi / 2) / b.omega_m;
    const Mat2 v = evolve_exact(s, b, tau).state.cov;
    const double mw = b.mass * b.omega_m;
    CHECK(v(0, 0) == doctest::Approx(s.cov(1, 1) / (mw * mw)));
    CHECK(v(1, 1) == doctest::Approx(s.cov(0, 0) * mw * mw));
    CHECK(std::abs(v(0, 1)) < 1e-12 * std::sqrt(v(0, 0) * v(1, 1)));
}

TEST_CASE("property: det preserved without thermal noise over Phi in [0, 4 pi]")
{
    gen::Rng rng(401);
    const NoiseBudget b = oscillator(0.0, 1.0);
    const GaussianState s = conditional_covariance(b).state;
    for (int i = 0; i < 200; ++i) {
        const double phi = gen::uniform(rng, 0, 4 * pi);
        const Mat2 v = evolve_exact(s, b, phi / b.omega_m).state.cov;
        CHECK(v.determinant() == doctest::Approx(s.cov.determinant()).epsilon(1e-12));
    }
}

TEST_CASE("property: semigroup over random states and splits")
{
    gen::Rng rng(402);
    for (int i = 0; i < 200; ++i) {
        NoiseBudget b = gen::budget(rng);
        b.omega_m = gen::uniform(rng, 0.0, 0.3) * b.omega_q;
        const DerivedScales d = derive(b);
        GaussianState s;
        const Mat2 n = gen::physical_cov(rng) * 2.0;  // vacuum = I in normalized units
        s.cov << n(0, 0) * d.dx_q2, n(0, 1) * d.dx_q * d.dp_q, n(1, 0) * d.dx_q * d.dp_q, n(1, 1) * d.dp_q2;
        const double t1 = gen::uniform(rng, 0, 5) * d.tau_q, t2 = gen::uniform(rng, 0, 5) * d.tau_q;
        const Mat2 two = evolve_exact(evolve_exact(s, b, t1).state, b, t2).state.cov;
        const Mat2 one = evolve_exact(s, b, t1 + t2).state.cov;
        CHECK(max_rel(normalized(two, d), normalized(one, d)) < 1e-10);
    }
}

TEST_CASE("position variance growth for the pure conditional state")
{
    // V_xx(tau)/V_xx(0) = 1 + sqrt2 u + u^2 with u = Omega_q tau: the
    // momentum feed-through dominates for u >> 1.
    const NoiseBudget b = NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.0, 0.0);
    const DerivedScales d = derive(b);
    const GaussianState s = conditional_covariance(b).state;
    for (double u : {0.1, 1.0, 10.0}) {
        const Mat2 v = evolve_exact(s, b, u * d.tau_q).state.cov;
        CHECK(v(0, 0) / s.cov(0, 0) == doctest::Approx(1 + std::sqrt(2.0) * u + u * u));
    }
}

TEST_CASE("leading order")
{
    const NoiseBudget b = oscillator(0.2, 0.0);
    const DerivedScales d = derive(b);
    const GaussianState s = conditional_covariance(b).state;
    // free mass: the expansion is exact
    const Mat2 lo = evolve_leading_order(s, b, 3 * d.tau_q).state.cov;
    const Mat2 ex = evolve_exact(s, b, 3 * d.tau_q).state.cov;
    CHECK(max_rel(normalized(lo, d), normalized(ex, d)) < 1e-12);

    // without thermal force only the rotation terms remain
    const NoiseBudget cold = oscillator(0.0, 0.0);
    const Mat2 c = evolve_leading_order(s, cold, 2 * d.tau_q).state.cov;
    CHECK(c(1, 1) == doctest::Approx(s.cov(1, 1)));

    // error against exact scales as (omega_m tau)^2
    const double tau = 10 * d.tau_q;
    double prev = 0;
    for (double phi : {1e-3, 1e-2}) {
        NoiseBudget bb = b;
        bb.omega_m = phi / tau;
        const double e = max_rel(normalized(evolve_leading_order(s, bb, tau).state.cov, d),
                                 normalized(evolve_exact(s, bb, tau).state.cov, d));
        if (prev > 0) CHECK(std::log10(e / prev) == doctest::Approx(2.0).epsilon(0.02));
        prev = e;
    }
}

TEST_CASE("growth estimates")
{
    const NoiseBudget b = oscillator(0.2, 0.0);
    const DerivedScales d = derive(b);
    CHECK(thermal_growth_estimate(b, d.tau_f) == doctest::Approx(1.0));
    CHECK(thermal_growth_estimate(b, d.tau_f / 10) == doctest::Approx(0.01));
    const NoiseBudget b2 = oscillator(0.4, 0.0);
    CHECK(thermal_growth_estimate(b2, d.tau_f) == doctest::Approx(4.0));

    Mat2 v;
    v << d.dx_q2, 0, 0, d.dp_q2;
    CHECK(leading_order_u_growth(v, b, d.tau_f) == doctest::Approx(1.0));

    // linear form is the slope of U at tau = 0 (finite-difference oracle)
    const GaussianState s = conditional_covariance(b).state;
    const double h = 1e-4 * d.tau_q;
    const double slope = (evolve_exact(s, b, h).u - evolve_exact(s, b, 0).u);
    CHECK(linear_u_growth(s.cov, b, h) == doctest::Approx(slope).epsilon(1e-3));
}
