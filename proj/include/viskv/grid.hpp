#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "viskv/errors.hpp"

namespace viskv {

/// Uniform delay-aligned time grid covering [-tau, horizon_delays*tau] with
/// dt = tau/n_per_delay. Node j sits at (j - n_per_delay)*dt, so t = 0 and
/// every whole multiple of tau are exact grid nodes.
inline std::vector<double> delay_aligned_grid(double tau, int n_per_delay, int horizon_delays) {
    if (!(tau > 0.0)) throw DomainError("delay grid requires tau > 0");
    if (n_per_delay < 2) throw DomainError("delay grid requires n_per_delay >= 2");
    if (horizon_delays < 1) throw DomainError("delay grid requires horizon_delays >= 1");
    const double dt = tau / static_cast<double>(n_per_delay);
    const std::size_t total = static_cast<std::size_t>(n_per_delay) *
                                  (static_cast<std::size_t>(horizon_delays) + 1) +
                              1;
    std::vector<double> t(total);
    for (std::size_t j = 0; j < total; ++j)
        t[j] = dt * (static_cast<double>(j) - static_cast<double>(n_per_delay));
    return t;
}

inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 2) throw ConfigError("linspace requires at least 2 points");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = b;
    return out;
}

/// Displacement (and optional velocity) samples on a space-time grid,
/// row-major in time: value(i, j) = y(t_i, x_j).
struct FieldGrid {
    std::vector<double> x_nodes;
    std::vector<double> t_nodes;
    std::vector<double> values;
    std::vector<double> velocities; // empty when the producer has no velocity data

    std::size_t x_count() const { return x_nodes.size(); }
    std::size_t t_count() const { return t_nodes.size(); }
    bool has_velocities() const { return !velocities.empty(); }

    double value(std::size_t ti, std::size_t xi) const { return values[ti * x_count() + xi]; }
    double velocity(std::size_t ti, std::size_t xi) const { return velocities[ti * x_count() + xi]; }

    std::span<const double> value_row(std::size_t ti) const {
        return {values.data() + ti * x_count(), x_count()};
    }
    std::span<const double> velocity_row(std::size_t ti) const {
        return {velocities.data() + ti * x_count(), x_count()};
    }

    double dt() const { return t_nodes.size() > 1 ? t_nodes[1] - t_nodes[0] : 0.0; }
    double dx() const { return x_nodes.size() > 1 ? x_nodes[1] - x_nodes[0] : 0.0; }
};

// Spatial quadrature on a uniform grid. The squared L2 norm uses the
// trapezoid rule on node values; the H1 seminorm uses per-cell forward
// differences, i.e. the exact L2 norm of the piecewise-linear interpolant's
// derivative.

inline double trapezoid_sq(std::span<const double> v, double dx) {
    if (v.size() < 2) return 0.0;
    double s = 0.5 * (v.front() * v.front() + v.back() * v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i] * v[i];
    return s * dx;
}

inline double trapezoid_inner(std::span<const double> a, std::span<const double> b, double dx) {
    if (a.size() < 2) return 0.0;
    double s = 0.5 * (a.front() * b.front() + a.back() * b.back());
    for (std::size_t i = 1; i + 1 < a.size(); ++i) s += a[i] * b[i];
    return s * dx;
}

inline double grad_sq(std::span<const double> v, double dx) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double g = (v[i + 1] - v[i]) / dx;
        s += g * g;
    }
    return s * dx;
}

inline double grad_diff_sq(std::span<const double> a, std::span<const double> b, double dx) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        const double g = ((a[i + 1] - b[i + 1]) - (a[i] - b[i])) / dx;
        s += g * g;
    }
    return s * dx;
}

inline double trapezoid_diff_sq(std::span<const double> a, std::span<const double> b, double dx) {
    if (a.size() < 2) return 0.0;
    const double e0 = a.front() - b.front();
    const double en = a.back() - b.back();
    double s = 0.5 * (e0 * e0 + en * en);
    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        const double e = a[i] - b[i];
        s += e * e;
    }
    return s * dx;
}

} // namespace viskv
