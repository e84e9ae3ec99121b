#pragma once

// Hand-rolled generators for property tests. Every test seeds its own engine.

#include "mqm/entanglement.hpp"
#include "mqm/gaussian.hpp"
#include "mqm/params.hpp"

#include <cmath>
#include <random>

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& r, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(r); }
inline double log_uniform(Rng& r, double lo, double hi) { return std::exp(uniform(r, std::log(lo), std::log(hi))); }

inline mqm::Mat2 rotation(double th)
{
    mqm::Mat2 m;
    m << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return m;
}

// Unit-determinant map: rotation * squeeze * rotation.
inline mqm::Mat2 symplectic(Rng& r, double max_squeeze = 1.5)
{
    const double s = std::exp(uniform(r, -max_squeeze, max_squeeze));
    const mqm::Vec2 d(s, 1.0 / s);
    return rotation(uniform(r, 0, 6.3)) * d.asDiagonal() * rotation(uniform(r, 0, 6.3));
}

// Physical covariance in units hbar = 1: M^T diag(nu, nu) M with nu >= 1/2.
inline mqm::Mat2 physical_cov(Rng& r, double max_nu = 3.0)
{
    const mqm::Mat2 m = symplectic(r);
    const mqm::Mat2 v = uniform(r, 0.5, max_nu) * m.transpose() * m;
    return 0.5 * (v + v.transpose());
}

// Random PSD matrix (possibly rank deficient when rank1 is set).
inline mqm::Mat2 psd(Rng& r, bool rank1 = false)
{
    const mqm::Vec2 a(uniform(r, -1, 1), uniform(r, -1, 1)), b(uniform(r, -1, 1), uniform(r, -1, 1));
    mqm::Mat2 v = a * a.transpose();
    if (!rank1) v += b * b.transpose();
    return v;
}

// Valid budget with moderate noise ratios.
inline mqm::NoiseBudget budget(Rng& r, bool lossless = false)
{
    return mqm::NoiseBudget::from_ratios(log_uniform(r, 0.01, 50.0), mqm::hz_to_rad(log_uniform(r, 10.0, 1000.0)),
                                         uniform(r, 0.01, 0.8), uniform(r, 0.0, 0.8),
                                         lossless ? 0.0 : uniform(r, 0.0, 0.3), uniform(r, -0.5, 1.5));
}

// Two-mode physical covariance (hbar = 1) via a beam splitter mixing two
// independently squeezed thermal modes, then local symplectic maps.
inline mqm::Mat4 two_mode_cov(Rng& r)
{
    mqm::Mat4 v = mqm::Mat4::Zero();
    v.block<2, 2>(0, 0) = physical_cov(r);
    v.block<2, 2>(2, 2) = physical_cov(r);
    const double th = uniform(r, 0, 3.2);
    const double c = std::cos(th), s = std::sin(th);
    mqm::Mat4 bs = mqm::Mat4::Zero();
    bs(0, 0) = bs(1, 1) = bs(2, 2) = bs(3, 3) = c;
    bs(0, 2) = bs(1, 3) = s;
    bs(2, 0) = bs(3, 1) = -s;
    mqm::Mat4 loc = mqm::Mat4::Zero();
    loc.block<2, 2>(0, 0) = symplectic(r, 0.7);
    loc.block<2, 2>(2, 2) = symplectic(r, 0.7);
    const mqm::Mat4 m = loc * bs;
    const mqm::Mat4 out = m * v * m.transpose();
    return 0.5 * (out + out.transpose());
}

} // namespace gen
