#include "mqm/gaussian.hpp"

#include "mqm/errors.hpp"

#include <cmath>
#include <sstream>

namespace mqm {

namespace {

double det2(const Mat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

Mat2 symmetrized(const Mat2& m) { return 0.5 * (m + m.transpose()); }

// sin(phi)/phi, stable for small phi
double sinc(double phi)
{
    if (std::abs(phi) < 1e-4) {
        const double p2 = phi * phi;
        return 1.0 - p2 / 6.0 + p2 * p2 / 120.0;
    }
    return std::sin(phi) / phi;
}

} // namespace

double wigner(const GaussianState& s, double x, double p)
{
    const double det = det2(s.cov);
    if (!(det > 0)) {
        std::ostringstream os;
        os << "wigner: degenerate Gaussian state, det V = " << det;
        throw DegenerateStateError(os.str());
    }
    const Vec2 d(x - s.mean(0), p - s.mean(1));
    // V^{-1} for a 2x2 matrix written out to avoid a general solve
    const double q = (s.cov(1, 1) * d(0) * d(0) - 2.0 * s.cov(0, 1) * d(0) * d(1) + s.cov(0, 0) * d(1) * d(1)) / det;
    return std::exp(-0.5 * q) / (constants::two_pi * std::sqrt(det));
}

double uncertainty_product(const Mat2& cov)
{
    const double det = det2(symmetrized(cov));
    if (det < 0) {
        // tolerate rounding on a singular matrix
        const double scale = std::abs(cov(0, 0) * cov(1, 1)) + cov(0, 1) * cov(0, 1);
        if (det > -1e-12 * scale) return 0.0;
        std::ostringstream os;
        os << "uncertainty_product: negative determinant " << det;
        throw InvalidCovarianceError(os.str());
    }
    return 2.0 / constants::hbar * std::sqrt(det);
}

GaussianState convolve(const GaussianState& s, const NoiseEllipse& added)
{
    GaussianState out = s;
    out.cov = s.cov + added;
    return out;
}

GaussianState symplectic_transform(const GaussianState& s, const Mat2& M, bool allow_general)
{
    if (!allow_general && std::abs(det2(M) - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "symplectic_transform: det M = " << det2(M) << " is not 1";
        throw ValidationError(os.str());
    }
    GaussianState out;
    out.mean = M.transpose() * s.mean;
    out.cov = symmetrized(M.transpose() * s.cov * M);
    return out;
}

bool is_psd(const Mat2& cov, double rel_tol)
{
    const Mat2 c = symmetrized(cov);
    Eigen::SelfAdjointEigenSolver<Mat2> es(c, Eigen::EigenvaluesOnly);
    const double tol = rel_tol * std::abs(c.trace());
    return es.eigenvalues().minCoeff() >= -tol;
}

bool is_physical(const Mat2& cov, double tol)
{
    if (!is_psd(cov)) return false;
    return uncertainty_product(cov) >= 1.0 - tol;
}

Ellipse ellipse_of(const Vec2& center, const Mat2& cov)
{
    Eigen::SelfAdjointEigenSolver<Mat2> es(symmetrized(cov));
    Ellipse e;
    e.center = center;
    const auto& ev = es.eigenvalues();  // ascending
    e.semi_minor = std::sqrt(std::max(ev(0), 0.0));
    e.semi_major = std::sqrt(std::max(ev(1), 0.0));
    const Vec2 major = es.eigenvectors().col(1);
    e.tilt = std::atan2(major(1), major(0));
    // fold to (-pi/2, pi/2]
    if (e.tilt > constants::pi / 2) e.tilt -= constants::pi;
    if (e.tilt <= -constants::pi / 2) e.tilt += constants::pi;
    return e;
}

Mat2 normalized(const Mat2& cov, const DerivedScales& d)
{
    const Eigen::DiagonalMatrix<double, 2> inv(1.0 / d.dx_q, 1.0 / d.dp_q);
    return inv * cov * inv;
}

GaussianState normalized(const GaussianState& s, const DerivedScales& d)
{
    GaussianState out;
    out.mean = Vec2(s.mean(0) / d.dx_q, s.mean(1) / d.dp_q);
    out.cov = normalized(s.cov, d);
    return out;
}

Mat2 rotation_matrix(double phi, double mass, double omega_m, double tau)
{
    // [[cos, -m w sin], [sin/(m w), cos]] with sin/(m w) = tau sinc(phi)/m
    Mat2 r;
    const double c = std::cos(phi);
    const double s_over_w = tau * sinc(phi);
    r << c, -mass * omega_m * std::sin(phi), s_over_w / mass, c;
    return r;
}

nlohmann::json to_json(const Mat2& m)
{
    return nlohmann::json::array({nlohmann::json::array({m(0, 0), m(0, 1)}), nlohmann::json::array({m(1, 0), m(1, 1)})});
}

nlohmann::json to_json(const Ellipse& e)
{
    return {{"center", {e.center(0), e.center(1)}},
            {"semi_major", e.semi_major},
            {"semi_minor", e.semi_minor},
            {"tilt_rad", e.tilt}};
}

nlohmann::json to_json(const GaussianState& s)
{
    return {{"mean", {s.mean(0), s.mean(1)}}, {"cov", to_json(s.cov)}};
}

} // namespace mqm
