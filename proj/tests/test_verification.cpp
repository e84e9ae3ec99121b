#include <doctest.h>

#include "generators.hpp"
#include "mqm/errors.hpp"
#include "mqm/preparation.hpp"
#include "mqm/verification.hpp"
#include "mqm/wiener_hopf.hpp"

#include <cmath>

using namespace mqm;
using constants::hbar;
using constants::pi;

namespace {

NoiseBudget fig7(double eta = 0.01, double q = 0.0)
{
    return NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.2, 0.2, eta, q);
}

} // namespace

TEST_CASE("closed-form filters at t = 0")
{
    const NoiseBudget b = fig7();
    const DerivedScales d = derive(b);
    const FilterPair f = closed_form_filters(b, 0.0);
    CHECK(f.g2[0] == doctest::Approx(2 * b.omega_q * d.chi));
    CHECK(std::abs(f.g1[0]) < 1e-12 * std::abs(f.g2[0]));
}

TEST_CASE("closed-form filter normalization for both quadratures")
{
    const NoiseBudget b = fig7();
    const Normalization x = filter_normalization(closed_form_filters(b, 0.0), b);
    CHECK(x.c1 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(x.c2) < 1e-6);
    const Normalization p = filter_normalization(closed_form_filters(b, pi / 2), b);
    CHECK(std::abs(p.c1) < 1e-6);
    CHECK(p.c2 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("property: normalization on 16 zeta values")
{
    const NoiseBudget b = fig7();
    const TimeGrid g = default_filter_grid(b);
    for (int k = 0; k < 16; ++k) {
        const double zeta = 2 * pi * k / 16;
        const Normalization n = filter_normalization(closed_form_filters(b, zeta, g), b);
        CHECK(n.c1 * n.c1 + n.c2 * n.c2 == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(n.c1 == doctest::Approx(std::cos(zeta)).epsilon(1e-6));
    }
}

TEST_CASE("grid shorter than ten verification times is rejected")
{
    const NoiseBudget b = fig7();
    TimeGrid g = default_filter_grid(b);
    g.points /= 4;
    CHECK_THROWS_AS(closed_form_filters(b, 0.0, g), ValidationError);
    CHECK_THROWS_AS(default_filter_grid(b, 0.0), ValidationError);
}

TEST_CASE("BAE residual")
{
    const NoiseBudget b = fig7(0.0);
    for (double zeta : {0.0, pi / 2}) {
        CHECK(bae_residual(closed_form_filters(b, zeta), b) < 1e-3);
        CHECK(bae_residual(closed_form_filters(b, zeta, default_filter_grid(b, 4.0)), b) < 1e-5);
    }
    // exact lossy optimum satisfies the loss-weighted condition, not the lossless one
    const NoiseBudget lossy = fig7(0.5);
    const FilterPair w = solve_optimal_filters(lossy, 0.0).filters(default_filter_grid(lossy, 4.0));
    CHECK(bae_residual(w, lossy) < 1e-3);
    CHECK(bae_residual(w, b) > 1e-2);
}

TEST_CASE("verification time from the filter envelope")
{
    for (double q : {0.0, squeeze_q_from_db(10.0)}) {
        const NoiseBudget b = fig7(0.01, q);
        const DerivedScales d = derive(b);
        const double tv = fitted_verification_time(closed_form_filters(b, 0.3));
        CHECK(tv == doctest::Approx(1.0 / (b.omega_q * d.chi)).epsilon(0.02));
    }
}

TEST_CASE("added noise values")
{
    // Lambda = sqrt2, zeta_F' = zeta_F when loss, squeezing and sensing noise are off
    const AddedNoise a = added_noise_covariance(NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.3, 0.0));
    CHECK(a.u_add == doctest::Approx(std::sqrt(2.0) * 0.3));
    // Lambda zeta_F'/(1-eta) at the lossy budget: 1.469149 * 0.211069 / 0.99
    CHECK(added_noise_covariance(fig7()).u_add == doctest::Approx(0.313224).epsilon(1e-5));
}

TEST_CASE("property: det V_add identity and sub-Heisenberg regime")
{
    gen::Rng rng(501);
    for (int i = 0; i < 500; ++i) {
        const NoiseBudget b = gen::budget(rng);
        const AddedNoise a = added_noise_covariance(b);
        const double target = a.lambda * a.zeta_f_eff / (1 - b.eta);
        CHECK(std::abs(uncertainty_product(a.cov) - target) < 1e-12 * std::max(1.0, target));
        CHECK((a.u_add < 1) == (a.lambda * a.zeta_f_eff < 1 - b.eta));
    }
}

TEST_CASE("squeezing tradeoff")
{
    const NoiseBudget b = NoiseBudget::from_ratios(10.0, hz_to_rad(100.0), 0.1, 0.1);
    const SqueezingTradeoff t = squeezing_tradeoff(b, {0.0, 1.0, 10.0});
    CHECK(t.u_add[0] == doctest::Approx(added_noise_covariance(b).u_add));
    CHECK(t.limit == doctest::Approx(0.02));
    CHECK(t.limit_estimate == doctest::Approx(0.01));
    CHECK(t.u_add[2] == doctest::Approx(t.limit).epsilon(1e-6));
    CHECK(t.u_add[1] < t.u_add[0]);
}

TEST_CASE("estimator marginals")
{
    const NoiseBudget b = fig7();
    const DerivedScales d = derive(b);
    const Mat2 v = conditional_covariance(b).state.cov;
    const QuadratureMarginal none = estimator_signal_noise(0.4, v, NoiseEllipse::Zero(), d);
    CHECK(none.noise == 0.0);
    CHECK(none.total == none.signal);

    NoiseEllipse iso;
    iso << 0.3 * d.dx_q2, 0, 0, 0.3 * d.dp_q2;
    for (double z : {0.0, 1.0, 2.0})
        CHECK(estimator_signal_noise(z, v, iso, d).noise == doctest::Approx(0.3));

    const AddedNoise a = added_noise_covariance(b);
    const QuadratureMarginal m = estimator_signal_noise(0.0, v, a.cov, d);
    CHECK(m.signal == doctest::Approx(v(0, 0) / d.dx_q2));
    CHECK(m.noise == doctest::Approx(std::pow(a.lambda, 1.5) * std::sqrt(a.zeta_f_eff) / (1 - b.eta)));
}
