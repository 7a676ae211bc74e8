#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "viskv/errors.hpp"
#include "viskv/grid.hpp"
#include "viskv/history_buffer.hpp"
#include "viskv/model.hpp"
#include "viskv/neutral_flux.hpp"

namespace viskv {

// sin(pi*u) and cos(pi*u) with exact zeros at integer / half-integer u, so the
// eigenfunctions satisfy their boundary conditions exactly at the endpoints.

inline double sin_pi(double u) {
    double r = std::remainder(u, 2.0); // r in [-1, 1], sin(pi*r) == sin(pi*u)
    if (r > 0.5)
        r = 1.0 - r;
    else if (r < -0.5)
        r = -1.0 - r;
    return std::sin(std::numbers::pi * r);
}

inline double cos_pi(double u) { return sin_pi(u + 0.5); }

struct Vec2 {
    double w{0.0};
    double w_dot{0.0};

    Vec2 operator+(const Vec2& o) const { return {w + o.w, w_dot + o.w_dot}; }
    Vec2 operator*(double s) const { return {w * s, w_dot * s}; }
};

struct Mat2 {
    double a00{0.0}, a01{0.0}, a10{0.0}, a11{0.0};

    Vec2 mul(const Vec2& v) const {
        return {a00 * v.w + a01 * v.w_dot, a10 * v.w + a11 * v.w_dot};
    }

    Vec2 solve(const Vec2& r) const {
        const double det = a00 * a11 - a01 * a10;
        if (!(std::fabs(det) > 0.0)) throw NumericError("singular 2x2 implicit matrix");
        return {(r.w * a11 - r.w_dot * a01) / det, (a00 * r.w_dot - a10 * r.w) / det};
    }
};

/// Eigenpair of -u'' on (0, L) with u(0) = 0, u'(L) = 0:
///   lambda_k = pi^2 (2k+1)^2 / (4 L^2),
///   phi_k(x) = sqrt(2/L) sin(pi (k+1/2) x / L).
struct ModeSpec {
    int k{0};
    double lambda{0.0};
    double L{0.0};

    double phi(double x) const {
        return std::sqrt(2.0 / L) * sin_pi((static_cast<double>(k) + 0.5) * x / L);
    }
    double phi_prime(double x) const {
        const double scale = (static_cast<double>(k) + 0.5) * std::numbers::pi / L;
        return std::sqrt(2.0 / L) * scale * cos_pi((static_cast<double>(k) + 0.5) * x / L);
    }
};

inline ModeSpec eigenpair(int k, double L) {
    if (k < 0) throw DomainError("mode index must be >= 0");
    if (!(L > 0.0)) throw DomainError("eigenpair requires L > 0");
    const double num = std::numbers::pi * static_cast<double>(2 * k + 1);
    return ModeSpec{k, num * num / (4.0 * L * L), L};
}

/// Projection coefficient of the lifting profile x onto phi_k:
///   gamma_k = <x, phi_k> = sqrt(2/L) (4L^2/pi^2) (-1)^k / (2k+1)^2.
inline double forcing_coefficient(int k, double L) {
    if (k < 0) throw DomainError("mode index must be >= 0");
    if (!(L > 0.0)) throw DomainError("forcing_coefficient requires L > 0");
    const double pi = std::numbers::pi;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double odd = static_cast<double>(2 * k + 1);
    return std::sqrt(2.0 / L) * (4.0 * L * L / (pi * pi)) * sign / (odd * odd);
}

/// Per-mode forcing: gamma_k times the flux source trace.
struct ModeForcingTrace {
    int k{0};
    double gamma{0.0};
    int n_per_delay{0};
    double dt{0.0};
    std::vector<double> t_nodes;
    std::vector<double> values;
};

inline ModeForcingTrace make_mode_forcing(int k, double L, const FluxSourceTrace& src) {
    ModeForcingTrace out;
    out.k = k;
    out.gamma = forcing_coefficient(k, L);
    out.n_per_delay = src.n_per_delay;
    out.dt = src.dt;
    out.t_nodes = src.t_nodes;
    out.values.resize(src.values.size());
    for (std::size_t j = 0; j < src.values.size(); ++j) out.values[j] = out.gamma * src.values[j];
    return out;
}

/// Which row of the first-order system the scalar source is applied to.
/// The source models a second time derivative, so it belongs on the velocity
/// row; the position row is kept as a compatibility option.
enum class ForcingRow { Velocity, Position };

/// One Crank-Nicolson step of the delayed 2x2 mode system
///   x' = A x + B x(t - tau) + rhs * e_row:
///   (I - dt/2 A) x_j = (I + dt/2 A) x_{j-1} + dt/2 B (x_{j-N} + x_{j-N+1}) + dt/2 rhs e_row.
/// `state` must be the newest history entry x_{j-1}; the delayed pair is read
/// from the buffer at exactly N and N-1 steps behind it.
inline Vec2 step_mode_cn(const Vec2& state, const HistoryBuffer<Vec2>& history, double dt,
                         const Mat2& A, const Mat2& B, double rhs,
                         ForcingRow row = ForcingRow::Velocity) {
    const int n = history.n_per_delay();
    const Vec2 delayed = history.lag(n - 1) + history.lag(n - 2);
    const Mat2 implicit{1.0 - 0.5 * dt * A.a00, -0.5 * dt * A.a01, -0.5 * dt * A.a10,
                        1.0 - 0.5 * dt * A.a11};
    const Mat2 expl{1.0 + 0.5 * dt * A.a00, 0.5 * dt * A.a01, 0.5 * dt * A.a10,
                    1.0 + 0.5 * dt * A.a11};
    Vec2 r = expl.mul(state) + B.mul(delayed) * (0.5 * dt);
    if (row == ForcingRow::Velocity)
        r.w_dot += 0.5 * dt * rhs;
    else
        r.w += 0.5 * dt * rhs;
    return implicit.solve(r);
}

/// Trajectory of one mode, zero on t <= 0.
struct ModeTrajectory {
    int k{0};
    std::vector<double> t_nodes;
    std::vector<double> w;
    std::vector<double> w_dot;
};

/// Integrates the delayed mode equation
///   w'' + c1 lambda w + d1 lambda w' + c2 lambda w(t-tau) + d2 lambda w'(t-tau) = forcing
/// from zero history with the delayed Crank-Nicolson stepper.
inline ModeTrajectory solve_mode(const ModeSpec& spec, const Coefficients& coeffs,
                                 const ModeForcingTrace& forcing, int n_per_delay,
                                 int horizon_delays, ForcingRow row = ForcingRow::Velocity) {
    if (forcing.n_per_delay != n_per_delay)
        throw ConfigError("mode forcing grid does not match the solver grid (n_per_delay)");
    const std::size_t total = static_cast<std::size_t>(n_per_delay) *
                                  (static_cast<std::size_t>(horizon_delays) + 1) +
                              1;
    if (forcing.t_nodes.size() != total)
        throw ConfigError("mode forcing grid does not match the solver grid (length)");
    const double dt = coeffs.tau / static_cast<double>(n_per_delay);
    if (forcing.dt != dt)
        throw ConfigError("mode forcing grid does not match the solver grid (dt)");

    const double lam = spec.lambda;
    const Mat2 A{0.0, 1.0, -coeffs.c1 * lam, -coeffs.d1 * lam};
    const Mat2 B{0.0, 0.0, -coeffs.c2 * lam, -coeffs.d2 * lam};

    const std::size_t n = static_cast<std::size_t>(n_per_delay);
    HistoryBuffer<Vec2> history(coeffs.tau, n_per_delay,
                                std::vector<Vec2>(n + 1, Vec2{0.0, 0.0}));
    ModeTrajectory out;
    out.k = spec.k;
    out.t_nodes = forcing.t_nodes;
    out.w.assign(total, 0.0);
    out.w_dot.assign(total, 0.0);
    for (std::size_t j = n + 1; j < total; ++j) {
        const Vec2 next =
            step_mode_cn(history.newest(), history, dt, A, B, forcing.values[j], row);
        if (!std::isfinite(next.w) || !std::isfinite(next.w_dot))
            throw NumericError("mode integration produced non-finite values");
        history.push(next);
        out.w[j] = next.w;
        out.w_dot[j] = next.w_dot;
    }
    return out;
}

/// How the boundary flux is folded back into the displacement.
enum class Lifting {
    Plain,     ///< y = sum_k w_k phi_k + psi(t) x, impulse kept in the source
    KinkSplit, ///< y = sum_k w_k phi_k + (psi(t) - psi_dot0 |t|/2) x, impulse-free source
};

/// Rebuilds y(t, x) from mode trajectories and the boundary flux. Velocities
/// are included, with the lifting slope obtained by differencing psi.
/// `t_indices` selects rows of the shared time grid; empty means all.
inline FieldGrid reconstruct_field(const std::vector<ModeTrajectory>& modes,
                                   const BoundaryFluxTrace& flux, std::vector<double> x_nodes,
                                   std::vector<std::size_t> t_indices = {},
                                   Lifting lifting = Lifting::Plain) {
    if (modes.empty()) throw ConfigError("reconstruct_field requires at least one mode");
    const std::size_t total = modes.front().t_nodes.size();
    for (const auto& m : modes)
        if (m.t_nodes.size() != total)
            throw ConfigError("mode trajectories do not share a time grid");
    if (flux.t_nodes.size() != total)
        throw ConfigError("flux trace does not share the mode time grid");
    if (t_indices.empty()) {
        t_indices.resize(total);
        for (std::size_t j = 0; j < total; ++j) t_indices[j] = j;
    }

    const double dt = flux.dt;
    const double half_slope = (lifting == Lifting::KinkSplit) ? 0.5 * flux.psi_dot0() : 0.0;

    FieldGrid out;
    out.t_nodes.reserve(t_indices.size());
    for (auto j : t_indices) out.t_nodes.push_back(flux.t_nodes[j]);
    out.x_nodes = std::move(x_nodes);
    const std::size_t nx = out.x_nodes.size();
    out.values.assign(t_indices.size() * nx, 0.0);
    out.velocities.assign(t_indices.size() * nx, 0.0);

    // Mode shapes evaluated once per x node.
    std::vector<double> shapes(modes.size() * nx);
    const double Lr = out.x_nodes.back();
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const ModeSpec spec = eigenpair(modes[m].k, Lr);
        for (std::size_t i = 0; i < nx; ++i) shapes[m * nx + i] = spec.phi(out.x_nodes[i]);
    }

    for (std::size_t r = 0; r < t_indices.size(); ++r) {
        const std::size_t j = t_indices[r];
        const double t = flux.t_nodes[j];
        double lift = flux.psi[j];
        double lift_dot;
        if (j == 0)
            lift_dot = (flux.psi[1] - flux.psi[0]) / dt;
        else if (j + 1 == total)
            lift_dot = (flux.psi[j] - flux.psi[j - 1]) / dt;
        else
            lift_dot = (flux.psi[j + 1] - flux.psi[j - 1]) / (2.0 * dt);
        if (lifting == Lifting::KinkSplit) {
            lift -= half_slope * std::fabs(t);
            lift_dot -= half_slope * (t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0));
        }
        for (std::size_t i = 0; i < nx; ++i) {
            double val = lift * out.x_nodes[i];
            double vel = lift_dot * out.x_nodes[i];
            for (std::size_t m = 0; m < modes.size(); ++m) {
                val += modes[m].w[j] * shapes[m * nx + i];
                vel += modes[m].w_dot[j] * shapes[m * nx + i];
            }
            out.values[r * nx + i] = val;
            out.velocities[r * nx + i] = vel;
        }
    }
    return out;
}

} // namespace viskv
