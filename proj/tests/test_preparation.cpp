#include <doctest.h>

#include "generators.hpp"
#include "mqm/errors.hpp"
#include "mqm/preparation.hpp"

#include <cmath>

using namespace mqm;
using constants::hbar;

TEST_CASE("conditional_covariance with N = 1")
{
    const NoiseBudget b = NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.0, 0.0);
    const DerivedScales d = derive(b);
    const Mat2 v = conditional_covariance(b).state.cov;
    CHECK(v(0, 0) == doctest::Approx(std::sqrt(2.0) * d.dx_q2));
    CHECK(v(0, 1) == doctest::Approx(hbar / 2));
    CHECK(v(1, 1) == doctest::Approx(std::sqrt(2.0) * d.dp_q2));
    CHECK(uncertainty_product(v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("conditional_covariance N scaling")
{
    const Mat2 v1 = conditional_covariance(NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.0, 0.0)).state.cov;
    const Mat2 v = conditional_covariance(NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.2, 0.2)).state.cov;
    // N_F = N_x = 1.08: every entry scales by 1.08
    CHECK(v(0, 0) / v1(0, 0) == doctest::Approx(1.08));
    CHECK(v(0, 1) / v1(0, 1) == doctest::Approx(1.08));
    CHECK(v(1, 1) / v1(1, 1) == doctest::Approx(1.08));

    // V_pp grows as N_F^{3/4} at fixed zeta_x
    const Mat2 a = conditional_covariance(NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 2.0, 0.1)).state.cov;
    const Mat2 c = conditional_covariance(NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 4.0, 0.1)).state.cov;
    CHECK(c(1, 1) / a(1, 1) == doctest::Approx(std::pow(33.0 / 9.0, 0.75)));
}

TEST_CASE("riccati free-mass scaling laws")
{
    const double m = 3.0, sf = 2e-33, sx = 5e-37;
    const Mat2 p = solve_filter_riccati(m, 0, 0, sf, sx);
    const Mat2 py = solve_filter_riccati(m, 0, 0, sf, 10 * sx);
    const Mat2 pf = solve_filter_riccati(m, 0, 0, 10 * sf, sx);
    CHECK(py(0, 0) / p(0, 0) == doctest::Approx(std::pow(10.0, 0.75)));
    CHECK(pf(1, 1) / p(1, 1) == doctest::Approx(std::pow(10.0, 0.75)));
    CHECK(pf(0, 0) / p(0, 0) == doctest::Approx(std::pow(10.0, 0.25)));
    CHECK(filter_riccati_residual(p, m, 0, 0, sf, sx) < 1e-12);
}

TEST_CASE("riccati general path agrees with the free-mass roots as omega_m -> 0")
{
    const double m = 10.0, sf = 1e-34, sx = 1e-36;
    const Mat2 free = solve_filter_riccati(m, 0, 0, sf, sx);
    const Mat2 tiny = solve_filter_riccati(m, 1e-6, 0, sf, sx);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(tiny(i, j) == doctest::Approx(free(i, j)).epsilon(1e-6));
}

TEST_CASE("riccati oracle vs closed form, zero classical noise")
{
    for (double q : {0.0, squeeze_q_from_db(10.0), -0.3}) {
        const NoiseBudget b = NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.0, 0.0, 0.0, q);
        const Mat2 r = riccati_steady_state(b).state.cov;
        const Mat2 c = conditional_covariance(b).state.cov;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(r(i, j) == doctest::Approx(c(i, j)).epsilon(1e-6));
        CHECK(uncertainty_product(r) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("riccati with classical noise matches the formula at its own N")
{
    gen::Rng rng(301);
    for (int i = 0; i < 50; ++i) {
        const NoiseBudget b = gen::budget(rng);
        const EffectiveN n = riccati_effective_n(b);
        const Mat2 r = riccati_steady_state(b).state.cov;
        const Mat2 c = free_mass_conditional_cov(b.mass, std::exp(b.q) * b.omega_q, n.n_f, n.n_x);
        for (int a = 0; a < 2; ++a)
            for (int k = 0; k < 2; ++k) CHECK(r(a, k) == doctest::Approx(c(a, k)).epsilon(1e-9));
    }
}

TEST_CASE("property: conditional states are physical")
{
    gen::Rng rng(302);
    for (int i = 0; i < 1000; ++i) {
        const NoiseBudget b = gen::budget(rng);
        const Mat2 v = conditional_covariance(b).state.cov;
        CHECK(is_physical(v));
        CHECK(uncertainty_product(v) >= 1.0 - 1e-12);
    }
}

TEST_CASE("property: damped-oscillator Riccati residual")
{
    gen::Rng rng(303);
    for (int i = 0; i < 200; ++i) {
        const double m = gen::log_uniform(rng, 0.1, 10), w = gen::log_uniform(rng, 0.01, 100);
        const double g = gen::log_uniform(rng, 1e-4, 10), sf = gen::log_uniform(rng, 0.01, 100);
        const double sx = gen::log_uniform(rng, 0.01, 100);
        const Mat2 p = solve_filter_riccati(m, w, g, sf, sx);
        CHECK(filter_riccati_residual(p, m, w, g, sf, sx) < 1e-9);
        CHECK(is_psd(p));
    }
}

TEST_CASE("order_of_magnitude_prepared")
{
    const NoiseBudget b = NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.0, 0.0);
    const DerivedScales d = derive(b);
    const OrderOfMagnitude o = order_of_magnitude_prepared(b, d.tau_q);
    // S_x/tau + tau^3 S_F/m^2 at tau_q with zero thermal noise: 2 + 2 in units of dx_q^2
    CHECK(o.dx2 / d.dx_q2 == doctest::Approx(4.0).epsilon(1e-12));
    // large tau: tau^3 growth; small tau: 1/tau growth
    const double big = order_of_magnitude_prepared(b, 1e3 * d.tau_q).dx2;
    const double bigger = order_of_magnitude_prepared(b, 2e3 * d.tau_q).dx2;
    CHECK(bigger / big == doctest::Approx(8.0).epsilon(1e-3));
    const double small = order_of_magnitude_prepared(b, 1e-3 * d.tau_q).dx2;
    const double smaller = order_of_magnitude_prepared(b, 0.5e-3 * d.tau_q).dx2;
    CHECK(smaller / small == doctest::Approx(2.0).epsilon(1e-3));
    CHECK_THROWS_AS(order_of_magnitude_prepared(b, 0.0), ValidationError);
}
