#pragma once

#include <cstddef>
#include <vector>

namespace mqm {

// Uniform grid t_i = i * step, i = 0 .. points-1.
struct TimeGrid {
    double step = 0;
    std::size_t points = 0;
    double at(std::size_t i) const { return step * static_cast<double>(i); }
    double length() const { return points > 0 ? step * static_cast<double>(points - 1) : 0.0; }
    std::vector<double> samples() const;
};

// Composite Simpson rule on uniform samples; a 3/8 panel absorbs an odd
// interval count. Falls back to the trapezoid rule below 4 samples.
double integrate(const std::vector<double>& y, double step);

// tail[i] = integral of y from t_i to the last sample (trapezoid rule).
std::vector<double> tail_integral(const std::vector<double>& y, double step);

// head[i] = integral of y from t_0 to t_i (trapezoid rule).
std::vector<double> head_integral(const std::vector<double>& y, double step);

// Fourth-order versions: each panel integrated with the cubic through its
// four nearest samples. Need at least 4 samples.
std::vector<double> tail_integral_cubic(const std::vector<double>& y, double step);
std::vector<double> head_integral_cubic(const std::vector<double>& y, double step);

// Decay rate of a damped oscillation from its successive extrema
// (least-squares slope of log|extremum| against time).
double extrema_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double floor_rel = 1e-8);

} // namespace mqm
