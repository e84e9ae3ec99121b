#include <doctest.h>

#include "generators.hpp"
#include "mqm/errors.hpp"
#include "mqm/entanglement.hpp"

#include <cmath>

using namespace mqm;

namespace {

Mat2 diag(double a, double b)
{
    Mat2 m;
    m << a, 0, 0, b;
    return m;
}

} // namespace

TEST_CASE("bipartite blocks")
{
    gen::Rng rng(801);
    const Mat2 c = gen::physical_cov(rng), d = gen::physical_cov(rng);
    const BipartiteState s = assemble_bipartite(c, d);
    const Mat2 p = c + d, m = c - d;
    CHECK(s.ee()(0, 0) == doctest::Approx(p(0, 0) / 4));
    CHECK(s.ee()(0, 1) == doctest::Approx(p(0, 1) / 2));
    CHECK(s.ee()(1, 1) == doctest::Approx(p(1, 1)));
    CHECK(s.en()(0, 0) == doctest::Approx(m(0, 0) / 4));
    CHECK(s.en()(1, 1) == doctest::Approx(m(1, 1)));
    CHECK(s.ee() == s.nn());
    CHECK(s.en() == s.ne());

    const BipartiteState same = assemble_bipartite(c, c);
    CHECK(same.en().norm() == 0.0);
    CHECK(log_negativity(same, 1.0) == 0.0);
}

TEST_CASE("two-mode squeezed vacuum")
{
    CHECK(log_negativity(assemble_bipartite(diag(0.5, 0.5), diag(0.5, 0.5)), 1.0) == 0.0);
    const double r = 1.0;
    const Mat2 c = diag(0.5 * std::exp(-2 * r), 0.5 * std::exp(2 * r));
    const Mat2 d = diag(0.5 * std::exp(2 * r), 0.5 * std::exp(-2 * r));
    const BipartiteState s = assemble_bipartite(c, d);
    // sigma_- = e^{-2r}/2 by hand, so E_N = 2r/ln2
    CHECK(sigma_minus(s) == doctest::Approx(std::exp(-2 * r) / 2));
    CHECK(log_negativity(s, 1.0) == doctest::Approx(2 * r / std::log(2.0)));
    CHECK(partial_transpose_sigma_minus(s.cov) == doctest::Approx(sigma_minus(s)).epsilon(1e-9));
}

TEST_CASE("property: symplectic formula agrees with the partial transpose")
{
    gen::Rng rng(802);
    for (int i = 0; i < 300; ++i) {
        const BipartiteState s{gen::two_mode_cov(rng)};
        CHECK(std::abs(sigma_minus(s) - partial_transpose_sigma_minus(s.cov)) < 1e-9);
    }
}

TEST_CASE("property: product states and local maps")
{
    gen::Rng rng(803);
    for (int i = 0; i < 200; ++i) {
        BipartiteState p;
        p.cov.block<2, 2>(0, 0) = gen::physical_cov(rng);
        p.cov.block<2, 2>(2, 2) = gen::physical_cov(rng);
        CHECK(log_negativity(p, 1.0) == 0.0);

        const BipartiteState s{gen::two_mode_cov(rng)};
        Mat4 loc = Mat4::Zero();
        loc.block<2, 2>(0, 0) = gen::symplectic(rng);
        loc.block<2, 2>(2, 2) = gen::symplectic(rng);
        const BipartiteState t{loc * s.cov * loc.transpose()};
        CHECK(std::abs(log_negativity(t, 1.0) - log_negativity(s, 1.0)) < 1e-8);
    }
}

TEST_CASE("property: added noise never raises E_N")
{
    gen::Rng rng(804);
    for (int i = 0; i < 200; ++i) {
        const double r = gen::uniform(rng, 0.1, 1.5);
        const Mat2 c = diag(0.5 * std::exp(-2 * r), 0.5 * std::exp(2 * r));
        const Mat2 d = diag(0.5 * std::exp(2 * r), 0.5 * std::exp(-2 * r));
        const Mat2 n = gen::psd(rng);
        double prev = log_negativity(assemble_bipartite(c, d), 1.0);
        for (double s : {0.1, 0.3, 1.0}) {
            const double e = log_negativity(assemble_bipartite(c + s * n, d + s * n), 1.0);
            CHECK(e <= prev + 1e-12);
            prev = e;
        }
    }
}

TEST_CASE("not PSD")
{
    CHECK_THROWS_AS(assemble_bipartite(diag(1, 1), diag(-3, 1)), InvalidCovarianceError);
}

TEST_CASE("survival in the detector configuration")
{
    std::vector<double> tau;
    const double tq = 1.0 / hz_to_rad(100.0);
    for (int k = 0; k <= 200; ++k) tau.push_back(20 * tq * k / 200);
    const auto [c10, d10] = detector_mode_schedules(10.0);
    const auto [c20, d20] = detector_mode_schedules(20.0);
    const SurvivalCurve s10 = survival_curve(c10, d10, tau), s20 = survival_curve(c20, d20, tau);
    CHECK(s10.e_n.front() > 0);
    CHECK(std::isfinite(s10.survival_time));
    CHECK(s10.survival_time > s20.survival_time);
    CHECK(s20.survival_time >= 1.0 * tq);

    const auto [c0, d0] = detector_mode_schedules(0.0);
    CHECK(std::isinf(survival_curve(c0, d0, tau).survival_time));
    CHECK(c10.budget.mass == doctest::Approx(5.0));
}

TEST_CASE("gravity timescales")
{
    GravityDecoherenceParams p;
    const GravityTimescales t = gravity_timescales(p);
    CHECK(t.tau_a == doctest::Approx(p.omega_q / (constants::G * p.density)));
    GravityDecoherenceParams q = p;
    q.omega_q *= 2;
    q.separation *= 3;
    const GravityTimescales u = gravity_timescales(q);
    CHECK(u.tau_a / t.tau_a == doctest::Approx(2.0));
    CHECK(u.tau_b / t.tau_b == doctest::Approx(9 * std::sqrt(2.0)));
    q = p;
    q.mass = -1;
    CHECK_THROWS_AS(gravity_timescales(q), ValidationError);
}

TEST_CASE("testability verdicts")
{
    GravityDecoherenceParams p;
    const GravityTimescales t = gravity_timescales(p);
    CHECK(testability_report(p, 20 * t.tau_b).model_b == "testable");
    CHECK(testability_report(p, 0.5 * t.tau_b).model_b == "untestable");
    CHECK(testability_report(p, 3 * t.tau_b).model_b == "inconclusive");
    CHECK(testability_report(p, 0.0).model_a == "inconclusive");
}
