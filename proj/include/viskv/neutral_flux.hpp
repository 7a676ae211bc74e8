#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "viskv/errors.hpp"
#include "viskv/grid.hpp"
#include "viskv/model.hpp"

namespace viskv {

/// Boundary flux psi(t) = dy/dx(t, L) on the delay-aligned grid [-tau, K*tau].
/// psi vanishes on t <= 0 (the rod starts undeformed and stress-free).
struct BoundaryFluxTrace {
    int n_per_delay{0};
    double dt{0.0};
    std::vector<double> t_nodes;
    std::vector<double> psi;

    /// Index of the t = 0 node, where the loading switches on.
    std::size_t kink_index() const { return static_cast<std::size_t>(n_per_delay); }

    /// Discrete slope of psi just after the load is applied.
    double psi_dot0() const {
        return (psi[kink_index() + 1] - psi[kink_index()]) / dt;
    }
};

/// Discrete second time derivative of the boundary flux,
/// (psi_j - 2 psi_{j-1} + psi_{j-2}) / dt^2 on the same grid. The node just
/// after t = 0 carries a spike of height ~ psi_dot0/dt: the one-step
/// representation of the impulse created by the slope jump of psi at 0.
struct FluxSourceTrace {
    int n_per_delay{0};
    double dt{0.0};
    std::vector<double> t_nodes;
    std::vector<double> values;
};

enum class FluxMethod {
    Auto,          ///< closed form when epsilon == 0, Crank-Nicolson otherwise
    ClosedForm,    ///< (f/E)(1 - exp(-E t / eta)); valid only for epsilon == 0
    CrankNicolson, ///< generic delay stepper, any epsilon
};

/// Integrates the scalar neutral delay equation for the boundary flux,
///
///   eta psi'(t) + E psi(t) + eps*E psi(t - tau) + eps*eta psi'(t - tau) = f,
///   psi = 0 on [-tau, 0],
///
/// by the trapezoidal rule on the delay-aligned grid. The delayed terms are
/// read from already-computed nodes; the delayed derivative enters as the
/// stored one-step difference 0.5*c*(psi_{j-N+2} - psi_{j-N}) with c = -eps.
/// For epsilon = 0 the equation is an ODE with the closed-form solution
/// psi(t) = (f/E)(1 - exp(-E t / eta)), used unless the stepper is forced.
inline BoundaryFluxTrace solve_neutral_flux(const MusclePhysical& p, int n_per_delay,
                                            int horizon_delays,
                                            FluxMethod method = FluxMethod::Auto) {
    const auto v = validate_physical(p);
    if (!v.ok) {
        if (!(p.eta > 0.0))
            throw DomainError("singular leading coefficient: eta must be positive to solve for psi'");
        throw DomainError("invalid physical parameters: " + v.joined());
    }
    if (n_per_delay < 10) throw ConfigError("solve_neutral_flux requires n_per_delay >= 10");
    if (horizon_delays < 1) throw ConfigError("solve_neutral_flux requires horizon_delays >= 1");

    BoundaryFluxTrace out;
    out.n_per_delay = n_per_delay;
    out.t_nodes = delay_aligned_grid(p.tau, n_per_delay, horizon_delays);
    out.dt = p.tau / static_cast<double>(n_per_delay);
    out.psi.assign(out.t_nodes.size(), 0.0);

    const std::size_t n = static_cast<std::size_t>(n_per_delay);
    const bool closed = (method == FluxMethod::ClosedForm) ||
                        (method == FluxMethod::Auto && p.epsilon == 0.0);
    if (closed) {
        if (p.epsilon != 0.0)
            throw ConfigError("closed-form flux is only valid for epsilon == 0");
        for (std::size_t j = n + 1; j < out.psi.size(); ++j)
            out.psi[j] = p.f / p.E * (1.0 - std::exp(-p.E * out.t_nodes[j] / p.eta));
        return out;
    }

    const double dt = out.dt;
    const double a = -p.E / p.eta;
    const double b = -p.epsilon * p.E / p.eta;
    const double c = -p.epsilon;
    const double lhs = 1.0 - 0.5 * dt * a;
    auto& psi = out.psi;
    for (std::size_t j = n + 1; j < psi.size(); ++j) {
        const double rhs = dt * p.f / p.eta + (1.0 + 0.5 * a * dt) * psi[j - 1] +
                           0.5 * b * dt * (psi[j - n] + psi[j - n + 1]) +
                           0.5 * c * (psi[j - n + 2] - psi[j - n]);
        psi[j] = rhs / lhs;
        if (!std::isfinite(psi[j])) throw NumericError("flux integration produced non-finite values");
    }
    return out;
}

namespace detail {

inline FluxSourceTrace second_difference(const BoundaryFluxTrace& trace,
                                         const std::vector<double>& series) {
    if (trace.t_nodes.size() < trace.kink_index() + 3)
        throw ConfigError("flux_source requires at least 3 positive-time nodes");
    FluxSourceTrace out;
    out.n_per_delay = trace.n_per_delay;
    out.dt = trace.dt;
    out.t_nodes = trace.t_nodes;
    out.values.assign(series.size(), 0.0);
    const double inv_dt2 = 1.0 / (trace.dt * trace.dt);
    for (std::size_t j = 2; j < series.size(); ++j)
        out.values[j] = (series[j] - 2.0 * series[j - 1] + series[j - 2]) * inv_dt2;
    return out;
}

} // namespace detail

/// Second differences of psi with the t = 0 impulse kept in place.
inline FluxSourceTrace flux_source(const BoundaryFluxTrace& trace) {
    return detail::second_difference(trace, trace.psi);
}

/// Second differences of the kink-compensated series psi(t) - psi_dot0*|t|/2.
/// The compensation is linear away from t = 0, so its second difference
/// vanishes at every node except the one straddling the kink, where it
/// removes the impulse exactly and leaves only the smooth part of psi''.
inline FluxSourceTrace flux_source_split(const BoundaryFluxTrace& trace) {
    FluxSourceTrace out = flux_source(trace);
    out.values[trace.kink_index() + 1] -= trace.psi_dot0() / trace.dt;
    return out;
}

} // namespace viskv
