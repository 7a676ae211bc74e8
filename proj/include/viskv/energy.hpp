#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "viskv/errors.hpp"
#include "viskv/grid.hpp"
#include "viskv/model.hpp"
#include "viskv/stability.hpp"

namespace viskv {

/// Energy (and optionally Lyapunov) values along a trajectory.
struct EnergyTrace {
    std::vector<double> t_nodes;
    std::vector<double> energy;
    std::vector<double> lyapunov; // empty unless weights were supplied

    bool has_lyapunov() const { return !lyapunov.empty(); }
};

/// Weights of the Lyapunov functional
///   F = N/2 ||y_t||^2 + c1 N/2 ||y_x||^2 + M <y, y_t>
///     + tau xi1/2 int_0^1 ||grad z||^2 ds + tau xi2/2 int_0^1 ||grad z_t||^2 ds
/// together with the equivalence constants k1 E <= F <= k2 E.
struct LyapunovWeights {
    double N{0.0}, M{1.0};
    double xi1{0.0}, xi2{0.0};
    double eps1{0.0}, eps2{0.0}, eps3{0.0}, eps4{0.0}, eps5{0.0};
    double k1{0.0}, k2{0.0};
    double ratio_lo{0.0}, ratio_hi{0.0}; // admissible window for N/M
};

/// Builds admissible weights from the coefficient set. M = 1 and N is the
/// geometric mean of its admissible window
///   max{ 9 d2^2 d1 / (c1 (d1^2 - 9 d2^2)), (2 cp c1 + 3 d1^2)/(c1 d1) }
///     < N/M < d1 (c1^2 - 9 c2^2) / (9 c1 c2^2),
/// which is nonempty whenever the closed-form sufficient conditions hold.
inline LyapunovWeights lyapunov_weights(const StabilityInput& s) {
    const StabilityVerdict v = check_assumption(s);
    if (!v.assumption_ok) {
        for (const auto& c : v.conditions)
            if (!c.satisfied)
                throw DomainError("lyapunov weights infeasible: condition '" + c.id + "' fails");
    }
    const double c1 = s.coeffs.c1, c2 = s.coeffs.c2, d1 = s.coeffs.d1, d2 = s.coeffs.d2;
    const double cp = s.cp;

    LyapunovWeights w;
    w.ratio_hi = d1 * (c1 * c1 - 9.0 * c2 * c2) / (9.0 * c1 * c2 * c2);
    const double lo1 = 9.0 * d2 * d2 * d1 / (c1 * (d1 * d1 - 9.0 * d2 * d2));
    const double lo2 = (2.0 * cp * c1 + 3.0 * d1 * d1) / (c1 * d1);
    w.ratio_lo = std::max(lo1, lo2);
    if (!(w.ratio_lo < w.ratio_hi))
        throw DomainError("lyapunov weights infeasible: ratio window is empty");

    w.M = 1.0;
    w.N = std::sqrt(w.ratio_lo * w.ratio_hi);
    w.xi1 = w.M * c1 / 3.0;
    w.xi2 = w.N * d1 / 3.0;
    w.eps1 = d1 / (3.0 * c2);
    w.eps2 = d1 / (3.0 * d2);
    w.eps3 = c1 / (3.0 * c2);
    w.eps4 = c1 / (3.0 * d1);
    w.eps5 = c1 / (3.0 * d2);

    const double eps_hat = std::sqrt(cp / c1);
    const double lo_num = std::min(std::min(w.N - w.M * eps_hat, c1 * w.N - w.M * cp / eps_hat),
                                   std::min(w.xi1, w.xi2));
    const double hi_num = std::max(std::max(w.N + w.M * eps_hat, c1 * w.N + w.M * cp / eps_hat),
                                   std::max(w.xi1, w.xi2));
    const double den_max = std::max(std::max(1.0, c1), std::max(d1, d2));
    const double den_min = std::min(std::min(1.0, c1), std::min(d1, d2));
    w.k1 = lo_num / den_max;
    w.k2 = hi_num / den_min;
    return w;
}

namespace detail {

struct EnergyPieces {
    std::size_t first;           // first reportable row (full delay window behind it)
    std::size_t n;               // steps per delay
    std::vector<double> vel_sq;  // ||y_t||^2 per row
    std::vector<double> grad_sq_u; // ||y_x||^2 per row
    std::vector<double> grad_sq_v; // ||y_tx||^2 per row
    std::vector<double> cross;   // <y, y_t> per row
    std::vector<double> pre_u, pre_v; // prefix sums of the gradient norms
};

inline EnergyPieces energy_pieces(const FieldGrid& field, const Coefficients& coeffs) {
    if (!field.has_velocities())
        throw DomainError("energy computation requires a field with velocities");
    if (coeffs.d2 < 0.0)
        throw DomainError("energy diagnostics require d2 >= 0");
    if (field.t_count() < 2) throw DomainError("energy computation requires at least 2 time rows");
    const double dt = field.dt();
    const double n_real = coeffs.tau / dt;
    const long long n = std::llround(n_real);
    if (n < 2 || std::fabs(static_cast<double>(n) * dt - coeffs.tau) > 1e-9 * coeffs.tau)
        throw ConfigError("field grid is not delay-aligned");
    if (field.t_count() <= static_cast<std::size_t>(n))
        throw DomainError("insufficient history coverage for the energy window");

    EnergyPieces p;
    p.n = static_cast<std::size_t>(n);
    p.first = p.n;
    const double dx = field.dx();
    const std::size_t rows = field.t_count();
    p.vel_sq.resize(rows);
    p.grad_sq_u.resize(rows);
    p.grad_sq_v.resize(rows);
    p.cross.resize(rows);
    p.pre_u.resize(rows + 1, 0.0);
    p.pre_v.resize(rows + 1, 0.0);
    for (std::size_t j = 0; j < rows; ++j) {
        const auto u = field.value_row(j);
        const auto v = field.velocity_row(j);
        p.vel_sq[j] = trapezoid_sq(v, dx);
        p.grad_sq_u[j] = grad_sq(u, dx);
        p.grad_sq_v[j] = grad_sq(v, dx);
        p.cross[j] = trapezoid_inner(u, v, dx);
        p.pre_u[j + 1] = p.pre_u[j] + p.grad_sq_u[j];
        p.pre_v[j + 1] = p.pre_v[j] + p.grad_sq_v[j];
    }
    return p;
}

// Trapezoid over s in [0,1] of the gradient norms along the delay window
// ending at row j, using the trajectory's own delay-aligned samples.
inline double window_integral(const std::vector<double>& pre, const std::vector<double>& point,
                              std::size_t j, std::size_t n) {
    const double sum = pre[j + 1] - pre[j - n];
    return (sum - 0.5 * (point[j] + point[j - n])) / static_cast<double>(n);
}

} // namespace detail

/// Natural energy along a solved trajectory:
///   E(t) = 1/2 ||y_t||^2 + c1/2 ||y_x||^2
///        + tau d1/2 int_0^1 ||y_x(t - tau s)||^2 ds
///        + tau d2/2 int_0^1 ||y_tx(t - tau s)||^2 ds,
/// with the s-integrals taken by the trapezoid rule over the trajectory's own
/// delay-aligned samples and spatial norms by trapezoid quadrature.
inline EnergyTrace compute_energy(const FieldGrid& field, const Coefficients& coeffs,
                                  std::size_t stride = 1) {
    const auto p = detail::energy_pieces(field, coeffs);
    EnergyTrace out;
    for (std::size_t j = p.first; j < field.t_count(); j += stride) {
        const double s1 = detail::window_integral(p.pre_u, p.grad_sq_u, j, p.n);
        const double s2 = detail::window_integral(p.pre_v, p.grad_sq_v, j, p.n);
        const double e = 0.5 * p.vel_sq[j] + 0.5 * coeffs.c1 * p.grad_sq_u[j] +
                         0.5 * coeffs.tau * coeffs.d1 * s1 + 0.5 * coeffs.tau * coeffs.d2 * s2;
        out.t_nodes.push_back(field.t_nodes[j]);
        out.energy.push_back(e);
    }
    return out;
}

/// Energy and Lyapunov functional together (they share all quadratures).
inline EnergyTrace compute_lyapunov(const FieldGrid& field, const Coefficients& coeffs,
                                    const LyapunovWeights& w, std::size_t stride = 1) {
    const auto p = detail::energy_pieces(field, coeffs);
    EnergyTrace out;
    for (std::size_t j = p.first; j < field.t_count(); j += stride) {
        const double s1 = detail::window_integral(p.pre_u, p.grad_sq_u, j, p.n);
        const double s2 = detail::window_integral(p.pre_v, p.grad_sq_v, j, p.n);
        const double e = 0.5 * p.vel_sq[j] + 0.5 * coeffs.c1 * p.grad_sq_u[j] +
                         0.5 * coeffs.tau * coeffs.d1 * s1 + 0.5 * coeffs.tau * coeffs.d2 * s2;
        const double f = 0.5 * w.N * p.vel_sq[j] + 0.5 * coeffs.c1 * w.N * p.grad_sq_u[j] +
                         w.M * p.cross[j] + 0.5 * coeffs.tau * w.xi1 * s1 +
                         0.5 * coeffs.tau * w.xi2 * s2;
        out.t_nodes.push_back(field.t_nodes[j]);
        out.energy.push_back(e);
        out.lyapunov.push_back(f);
    }
    return out;
}

struct DecayFit {
    double alpha_hat{0.0}; ///< E ~ c_hat exp(-2 alpha_hat t)
    double c_hat{0.0};
    double r_squared{0.0};
};

/// Least-squares line through (t, log E) on the window; the slope estimates
/// -2 alpha. Nodes with E below 1e-300 are dropped.
inline DecayFit fit_decay_rate(const EnergyTrace& trace, double t_lo, double t_hi) {
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < trace.t_nodes.size(); ++i) {
        const double t = trace.t_nodes[i];
        const double e = trace.energy[i];
        if (t < t_lo || t > t_hi || !(e > 1e-300)) continue;
        ts.push_back(t);
        ys.push_back(std::log(e));
    }
    if (ts.size() < 8) throw DomainError("decay fit needs at least 8 usable nodes in the window");
    const double n = static_cast<double>(ts.size());
    double st = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sy += ys[i];
    }
    const double tbar = st / n, ybar = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxx += (ts[i] - tbar) * (ts[i] - tbar);
        sxy += (ts[i] - tbar) * (ys[i] - ybar);
    }
    if (!(sxx > 0.0)) throw DomainError("decay fit window has no time spread");
    const double slope = sxy / sxx;
    const double intercept = ybar - slope * tbar;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ys[i] - (intercept + slope * ts[i]);
        ss_res += r * r;
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    DecayFit fit;
    fit.alpha_hat = -0.5 * slope;
    fit.c_hat = std::exp(intercept);
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace viskv
