#include "mqm/tomography.hpp"

#include "mqm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mqm {

namespace {

using constants::pi;

std::vector<double> gaussian_weights(double var, double h)
{
    const double sigma = std::sqrt(var);
    const int k_max = static_cast<int>(std::ceil(9.0 * sigma / h));
    std::vector<double> w(2 * k_max + 1);
    const double norm = h / std::sqrt(2.0 * pi * var);
    for (int k = -k_max; k <= k_max; ++k) {
        const double u = k * h;
        w[k + k_max] = norm * std::exp(-0.5 * u * u / var);
    }
    return w;
}

// 1D convolution along X (axis 0) or P (axis 1), zero outside the grid.
PhaseSpaceGrid convolve_axis(const PhaseSpaceGrid& in, double var, int axis)
{
    PhaseSpaceGrid out = in;
    if (var <= 0) return out;
    const int n = in.n;
    const auto w = gaussian_weights(var, in.step());
    const int k_max = static_cast<int>(w.size() / 2);
    std::vector<double> line(n), res(n);
    for (int other = 0; other < n; ++other) {
        for (int k = 0; k < n; ++k) line[k] = axis == 0 ? in.at(k, other) : in.at(other, k);
        for (int k = 0; k < n; ++k) {
            double s = 0;
            const int lo = std::max(-k_max, k - (n - 1)), hi = std::min(k_max, k);
            for (int m = lo; m <= hi; ++m) s += w[m + k_max] * line[k - m];
            res[k] = s;
        }
        for (int k = 0; k < n; ++k) (axis == 0 ? out.at(k, other) : out.at(other, k)) = res[k];
    }
    return out;
}

// Value of row P_j at fractional X index x by cubic Lagrange interpolation.
double interp_row(const PhaseSpaceGrid& g, int j, double x)
{
    const int i0 = static_cast<int>(std::floor(x));
    const double f = x - i0;
    const double c[4] = {-f * (f - 1) * (f - 2) / 6, (f + 1) * (f - 1) * (f - 2) / 2, -(f + 1) * f * (f - 2) / 2,
                         (f + 1) * f * (f - 1) / 6};
    double s = 0;
    for (int m = 0; m < 4; ++m) {
        const int i = i0 - 1 + m;
        if (i >= 0 && i < g.n) s += c[m] * g.at(i, j);
    }
    return s;
}

// out(X, P) = int in(X - (c/b) u, P - u) N(u; b) du, u on the grid lattice.
PhaseSpaceGrid sheared_pass(const PhaseSpaceGrid& in, double b, double c)
{
    PhaseSpaceGrid out = in;
    const int n = in.n;
    const auto w = gaussian_weights(b, in.step());
    const int k_max = static_cast<int>(w.size() / 2);
    const double slope = c / b;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0;
            const int lo = std::max(-k_max, j - (n - 1)), hi = std::min(k_max, j);
            for (int k = lo; k <= hi; ++k) s += w[k + k_max] * interp_row(in, j - k, i - slope * k);
            out.at(i, j) = s;
        }
    return out;
}

} // namespace

Mat2 to_grid_units(const Mat2& cov_si, const DerivedScales& d) { return 0.5 * normalized(cov_si, d); }

Mat2 display_to_grid(const Mat2& cov_display) { return 0.5 * cov_display; }

PhaseSpaceGrid PhaseSpaceGrid::make(double half_width, int n)
{
    if (!(half_width > 0) || n < 3) throw ValidationError("PhaseSpaceGrid: need half_width > 0 and n >= 3");
    PhaseSpaceGrid g;
    g.half_width = half_width;
    g.n = n;
    g.values.assign(static_cast<std::size_t>(n) * n, 0.0);
    return g;
}

double PhaseSpaceGrid::integral() const
{
    double s = 0;
    for (double v : values) s += v;
    return s * step() * step();
}

double PhaseSpaceGrid::min_value() const { return *std::min_element(values.begin(), values.end()); }
double PhaseSpaceGrid::max_value() const { return *std::max_element(values.begin(), values.end()); }

std::vector<double> PhaseSpaceGrid::slice_p0() const
{
    std::vector<double> s(n);
    const int mid = n / 2;
    for (int i = 0; i < n; ++i) s[i] = at(i, mid);
    return s;
}

nlohmann::json PhaseSpaceGrid::to_json() const
{
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(values.begin() + static_cast<std::ptrdiff_t>(i) * n,
                                values.begin() + static_cast<std::ptrdiff_t>(i + 1) * n);
        rows.push_back(row);
    }
    return {{"units", "grid"}, {"half_width", half_width}, {"n", n}, {"step", step()},
            {"display_per_grid", display_per_grid}, {"values", rows}};
}

FockWigner::FockWigner(int photons) : n(photons)
{
    if (n != 0 && n != 1) throw ValidationError("FockWigner: only n = 0 and n = 1 are supported");
}

double FockWigner::operator()(double X, double P) const
{
    const double r2 = X * X + P * P;
    const double g = std::exp(-r2) / pi;
    return n == 0 ? g : (2.0 * r2 - 1.0) * g;
}

PhaseSpaceGrid sample(const FockWigner& w, double half_width, int n)
{
    PhaseSpaceGrid g = PhaseSpaceGrid::make(half_width, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.at(i, j) = w(g.coord(i), g.coord(j));
    return g;
}

PhaseSpaceGrid sample_gaussian(const Mat2& cov_grid, double half_width, int n)
{
    const double det = cov_grid.determinant();
    if (!(det > 0)) throw ValidationError("sample_gaussian: covariance must be positive definite");
    const Mat2 inv = cov_grid.inverse();
    const double norm = 1.0 / (2.0 * pi * std::sqrt(det));
    PhaseSpaceGrid g = PhaseSpaceGrid::make(half_width, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Vec2 z(g.coord(i), g.coord(j));
            g.at(i, j) = norm * std::exp(-0.5 * z.dot(inv * z));
        }
    return g;
}

PhaseSpaceGrid reconstruct(const PhaseSpaceGrid& source, const Mat2& v)
{
    const double scale = v.cwiseAbs().maxCoeff();
    if (scale == 0.0) return source;
    if (!is_psd(v)) throw ValidationError("reconstruct: added-noise covariance is not positive semidefinite");
    Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (v + v.transpose()));
    const double lmin = std::max(es.eigenvalues()(0), 0.0);
    const double h = source.step();
    if (h > std::sqrt(lmin) / 4.0) {
        std::ostringstream os;
        os << "reconstruct: grid step " << h << " exceeds sqrt(min eigenvalue)/4 = " << std::sqrt(lmin) / 4.0
           << "; refine the grid";
        throw ValidationError(os.str());
    }
    const double a = v(0, 0), b = v(1, 1), c = 0.5 * (v(0, 1) + v(1, 0));
    if (std::abs(c) <= 1e-14 * scale) return convolve_axis(convolve_axis(source, a, 0), b, 1);
    return sheared_pass(convolve_axis(source, a - c * c / b, 0), b, c);
}

PhaseSpaceGrid q_function(const PhaseSpaceGrid& source) { return reconstruct(source, 0.5 * Mat2::Identity()); }

double negativity_volume(const PhaseSpaceGrid& g)
{
    double s = 0;
    for (double v : g.values)
        if (v < 0) s -= v;
    return s * g.step() * g.step();
}

} // namespace mqm
