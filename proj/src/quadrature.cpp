#include "mqm/quadrature.hpp"

#include "mqm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mqm {

std::vector<double> TimeGrid::samples() const
{
    std::vector<double> t(points);
    for (std::size_t i = 0; i < points; ++i) t[i] = at(i);
    return t;
}

double integrate(const std::vector<double>& y, double step)
{
    const std::size_t n = y.size();
    if (n < 2) return 0.0;
    if (n < 4) {
        double s = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) s += 0.5 * (y[i] + y[i + 1]);
        return s * step;
    }
    std::size_t intervals = n - 1;
    std::size_t simpson_end = intervals;  // last index covered by Simpson panels
    double tail = 0;
    if (intervals % 2 == 1) {
        simpson_end = intervals - 3;
        const std::size_t k = simpson_end;
        tail = 3.0 * step / 8.0 * (y[k] + 3 * y[k + 1] + 3 * y[k + 2] + y[k + 3]);
    }
    double s = 0;
    if (simpson_end > 0) {
        s = y[0] + y[simpson_end];
        for (std::size_t i = 1; i < simpson_end; ++i) s += (i % 2 ? 4.0 : 2.0) * y[i];
        s *= step / 3.0;
    }
    return s + tail;
}

std::vector<double> tail_integral(const std::vector<double>& y, double step)
{
    std::vector<double> out(y.size(), 0.0);
    for (std::size_t i = y.size(); i-- > 1;) out[i - 1] = out[i] + 0.5 * step * (y[i - 1] + y[i]);
    return out;
}

std::vector<double> head_integral(const std::vector<double>& y, double step)
{
    std::vector<double> out(y.size(), 0.0);
    for (std::size_t i = 1; i < y.size(); ++i) out[i] = out[i - 1] + 0.5 * step * (y[i - 1] + y[i]);
    return out;
}

namespace {

// Integral over [t_i, t_{i+1}] of the cubic through four neighbouring samples.
std::vector<double> cubic_panels(const std::vector<double>& y, double h)
{
    const std::size_t n = y.size();
    if (n < 4) throw ValidationError("cubic cumulative integral needs at least 4 samples");
    std::vector<double> p(n - 1);
    const double c = h / 24.0;
    p[0] = c * (9 * y[0] + 19 * y[1] - 5 * y[2] + y[3]);
    p[n - 2] = c * (9 * y[n - 1] + 19 * y[n - 2] - 5 * y[n - 3] + y[n - 4]);
    for (std::size_t i = 1; i + 2 < n; ++i) p[i] = c * (-y[i - 1] + 13 * y[i] + 13 * y[i + 1] - y[i + 2]);
    return p;
}

} // namespace

std::vector<double> tail_integral_cubic(const std::vector<double>& y, double step)
{
    const auto p = cubic_panels(y, step);
    std::vector<double> out(y.size(), 0.0);
    for (std::size_t i = p.size(); i-- > 0;) out[i] = out[i + 1] + p[i];
    return out;
}

std::vector<double> head_integral_cubic(const std::vector<double>& y, double step)
{
    const auto p = cubic_panels(y, step);
    std::vector<double> out(y.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) out[i + 1] = out[i] + p[i];
    return out;
}

double extrema_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double floor_rel)
{
    double peak = 0;
    for (double v : y) peak = std::max(peak, std::abs(v));
    std::vector<double> te, le;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        const double a = std::abs(y[i - 1]), b = std::abs(y[i]), c = std::abs(y[i + 1]);
        if (b >= a && b > c && b > floor_rel * peak) {
            // parabola through the three samples
            const double den = a - 2 * b + c;
            const double off = den != 0 ? 0.5 * (a - c) / den : 0.0;
            const double h = t[i + 1] - t[i];
            te.push_back(t[i] + off * h);
            le.push_back(std::log(b - 0.25 * (a - c) * off));
        }
    }
    // skip the first extremum, where the start transient dominates
    if (te.size() < 4) throw NumericalError("extrema_decay_rate: fewer than four extrema above the floor");
    double st = 0, sl = 0, stt = 0, stl = 0;
    const std::size_t n = te.size() - 1;
    for (std::size_t i = 1; i < te.size(); ++i) {
        st += te[i];
        sl += le[i];
        stt += te[i] * te[i];
        stl += te[i] * le[i];
    }
    const double slope = (n * stl - st * sl) / (n * stt - st * st);
    return -slope;
}

} // namespace mqm
