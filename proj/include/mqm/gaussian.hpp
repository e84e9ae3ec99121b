#pragma once

#include "mqm/params.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace mqm {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

// Phase-space Gaussian over (x, p) in SI units.
struct GaussianState {
    Vec2 mean = Vec2::Zero();
    Mat2 cov = Mat2::Zero();
};

// Added-noise or reconstruction ellipse; same shape as a covariance.
using NoiseEllipse = Mat2;

double wigner(const GaussianState& s, double x, double p);

// (2/hbar) sqrt(det V). Throws InvalidCovarianceError on det < 0.
double uncertainty_product(const Mat2& cov);

GaussianState convolve(const GaussianState& s, const NoiseEllipse& added);

// cov -> M^T cov M and mean -> M^T mean. M must have unit determinant
// (within 1e-12) unless allow_general is set.
GaussianState symplectic_transform(const GaussianState& s, const Mat2& M, bool allow_general = false);

bool is_psd(const Mat2& cov, double rel_tol = 1e-12);
// PSD and U >= 1 - tol.
bool is_physical(const Mat2& cov, double tol = 1e-9);

struct Ellipse {
    Vec2 center = Vec2::Zero();
    double semi_major = 0;
    double semi_minor = 0;
    double tilt = 0;  // angle of the major axis from the x axis, rad
};

Ellipse ellipse_of(const Vec2& center, const Mat2& cov);
inline Ellipse ellipse_of(const GaussianState& s) { return ellipse_of(s.mean, s.cov); }

// View in units of (dx_q, dp_q); the Heisenberg circle has radius 1.
GaussianState normalized(const GaussianState& s, const DerivedScales& d);
Mat2 normalized(const Mat2& cov, const DerivedScales& d);

// Rotation-plus-scale matrix R of the oscillator evolution (used as M^T V M).
Mat2 rotation_matrix(double phi, double mass, double omega_m, double tau);

nlohmann::json to_json(const Mat2& m);
nlohmann::json to_json(const Ellipse& e);
nlohmann::json to_json(const GaussianState& s);

} // namespace mqm
