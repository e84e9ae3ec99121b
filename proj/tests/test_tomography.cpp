#include <doctest.h>

#include "generators.hpp"
#include "mqm/errors.hpp"
#include "mqm/tomography.hpp"

#include <cmath>

using namespace mqm;

namespace {

double max_diff(const PhaseSpaceGrid& a, const PhaseSpaceGrid& b)
{
    double m = 0;
    for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

Mat2 diag(double a, double b)
{
    Mat2 m;
    m << a, 0, 0, b;
    return m;
}

} // namespace

TEST_CASE("fock wigner functions")
{
    const FockWigner w0(0), w1(1);
    CHECK(w0(0, 0) == doctest::Approx(1 / constants::pi));
    CHECK(w1(0, 0) == doctest::Approx(-1 / constants::pi));
    const PhaseSpaceGrid g = sample(w1);
    CHECK(g.integral() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(g.min_value() == doctest::Approx(-1 / constants::pi));
    CHECK(g.at(g.n / 2, g.n / 2) == g.min_value());
    CHECK_THROWS_AS(FockWigner(2), ValidationError);
}

TEST_CASE("property: gaussian source convolves to the covariance sum")
{
    gen::Rng rng(701);
    for (int i = 0; i < 20; ++i) {
        // both ellipses well inside the grid (total sigma < 1.1 on a half width of 6)
        const Mat2 r0 = gen::rotation(gen::uniform(rng, 0, 3.2)), ra = gen::rotation(gen::uniform(rng, 0, 3.2));
        const Mat2 v0 = r0 * diag(gen::uniform(rng, 0.1, 0.6), gen::uniform(rng, 0.1, 0.6)) * r0.transpose();
        const Mat2 va = ra * diag(gen::uniform(rng, 0.05, 0.6), gen::uniform(rng, 0.05, 0.6)) * ra.transpose();
        const PhaseSpaceGrid out = reconstruct(sample_gaussian(v0, 6.0, 301), va);
        const PhaseSpaceGrid want = sample_gaussian(v0 + va, 6.0, 301);
        CHECK(max_diff(out, want) < 1e-6);
    }
}

TEST_CASE("husimi function")
{
    const PhaseSpaceGrid q1 = q_function(sample(FockWigner(1)));
    CHECK(std::abs(q1.at(q1.n / 2, q1.n / 2)) < 1e-12);
    CHECK(q1.min_value() >= -1e-9);
    const PhaseSpaceGrid q0 = q_function(sample(FockWigner(0)));
    CHECK(max_diff(q0, sample_gaussian(Mat2::Identity())) < 1e-9);
}

TEST_CASE("negativity volume")
{
    CHECK(negativity_volume(sample_gaussian(diag(0.5, 0.5))) == 0.0);
    // integral of (2R^2 - 1) e^{-R^2}/pi over R^2 < 1/2: 2 e^{-1/2} - 1
    const double exact = 2 * std::exp(-0.5) - 1;
    const double coarse = negativity_volume(sample(FockWigner(1), 5.0, 101));
    const double fine = negativity_volume(sample(FockWigner(1), 5.0, 801));
    CHECK(fine == doctest::Approx(exact).epsilon(1e-3));
    CHECK(std::abs(fine - exact) < std::abs(coarse - exact));
}

TEST_CASE("property: nested added noise lowers the negativity")
{
    gen::Rng rng(702);
    const PhaseSpaceGrid w1 = sample(FockWigner(1), 5.0, 201);
    for (int i = 0; i < 4; ++i) {
        const Mat2 r0 = gen::rotation(gen::uniform(rng, 0, 3.2));
        const Mat2 v0 = r0 * diag(gen::uniform(rng, 0.1, 0.3), gen::uniform(rng, 0.1, 0.3)) * r0.transpose();
        double prev = negativity_volume(w1);
        for (int k = 1; k <= 5; ++k) {
            const double nv = negativity_volume(reconstruct(w1, (0.4 + 0.2 * k) * v0));
            CHECK(nv <= prev);
            prev = nv;
        }
    }
}

TEST_CASE("normalization and symmetry")
{
    const PhaseSpaceGrid w1 = sample(FockWigner(1));
    const PhaseSpaceGrid a = reconstruct(w1, diag(0.1, 0.3));
    const PhaseSpaceGrid b = reconstruct(w1, diag(0.3, 0.1));
    CHECK(a.integral() == doctest::Approx(w1.integral()).epsilon(1e-6));
    double m = 0;
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) m = std::max(m, std::abs(a.at(i, j) - b.at(j, i)));
    CHECK(m < 1e-10);
    CHECK(max_diff(reconstruct(w1, Mat2::Zero()), w1) == 0.0);
}

TEST_CASE("reconstruction input checks")
{
    const PhaseSpaceGrid coarse = sample(FockWigner(1), 5.0, 41);
    CHECK_THROWS_AS(reconstruct(coarse, diag(0.01, 0.01)), ValidationError);
    Mat2 bad;
    bad << 0.1, 0.2, 0.2, 0.1;
    CHECK_THROWS_AS(reconstruct(sample(FockWigner(1)), bad), ValidationError);
}

TEST_CASE("unit conversions")
{
    CHECK(display_to_grid(Mat2::Identity()).isApprox(0.5 * Mat2::Identity()));
}
