#pragma once

#include "mqm/gaussian.hpp"
#include "mqm/params.hpp"

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mqm {

// Two scalings of phase space are used here.
//   grid (Fock) units:   X = x / (sqrt2 dx_q),  P = p / (sqrt2 dp_q); vacuum variance 1/2.
//   display units:       x / dx_q, p / dp_q;    vacuum variance 1, Heisenberg circle radius 1.
// Display = sqrt2 * grid. Densities on a PhaseSpaceGrid integrate to 1 in grid units.
inline constexpr double display_per_grid = 1.4142135623730951;

// Covariance in SI units -> grid units.
Mat2 to_grid_units(const Mat2& cov_si, const DerivedScales& d);
// Covariance in display units (x/dx_q, p/dp_q) -> grid units.
Mat2 display_to_grid(const Mat2& cov_display);

// Square grid symmetric about the origin, n x n samples over [-half_width, half_width]^2.
struct PhaseSpaceGrid {
    double half_width = 5.0;
    int n = 401;
    std::vector<double> values;  // values[i * n + j] at (X_i, P_j)

    static PhaseSpaceGrid make(double half_width = 5.0, int n = 401);

    double step() const { return 2.0 * half_width / (n - 1); }
    double coord(int k) const { return -half_width + step() * k; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }

    double integral() const;
    double min_value() const;
    double max_value() const;
    // W(X, P = 0) along the centre row.
    std::vector<double> slice_p0() const;

    nlohmann::json to_json() const;  // coordinates in grid units
};

// Fock state n in {0, 1}:
//   W0 = exp(-R^2)/pi,  W1 = (2R^2 - 1) exp(-R^2)/pi,  R^2 = X^2 + P^2.
struct FockWigner {
    int n = 1;
    explicit FockWigner(int photons = 1);
    double operator()(double X, double P) const;
};

PhaseSpaceGrid sample(const FockWigner& w, double half_width = 5.0, int n = 401);
// Centred Gaussian with covariance given in grid units.
PhaseSpaceGrid sample_gaussian(const Mat2& cov_grid, double half_width = 5.0, int n = 401);

// Convolution of the sampled source with the Gaussian of covariance v_add
// (grid units). v_add = 0 returns the source. A diagonal v_add is applied as
// two 1D passes; a correlated one as a 1D pass in X followed by a sheared
// pass along P (cubic interpolation in X).
// Throws ValidationError when v_add is not PSD or when the grid step exceeds
// sqrt(smallest eigenvalue)/4.
PhaseSpaceGrid reconstruct(const PhaseSpaceGrid& source, const Mat2& v_add_grid);

// Husimi Q function: reconstruct with the Heisenberg kernel (1/2) I.
PhaseSpaceGrid q_function(const PhaseSpaceGrid& source);

// Integral of max(0, -W) over the grid.
double negativity_volume(const PhaseSpaceGrid& g);

} // namespace mqm
