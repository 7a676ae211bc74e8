#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "viskv/errors.hpp"
#include "viskv/grid.hpp"
#include "viskv/model.hpp"

namespace viskv {

/// Thomas algorithm with the forward sweep frozen at construction; the
/// implicit matrix is constant throughout a run, so each step is one O(n)
/// back-substitution pass.
class TridiagonalSolver {
  public:
    TridiagonalSolver(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup)
        : sub_(std::move(sub)), sup_(std::move(sup)), inv_m_(diag.size()), cstar_(diag.size()) {
        const std::size_t n = diag.size();
        if (sub_.size() != n || sup_.size() != n) throw ConfigError("tridiagonal bands must have equal length");
        double m = diag[0];
        if (!(std::fabs(m) > 0.0)) throw NumericError("singular tridiagonal matrix");
        inv_m_[0] = 1.0 / m;
        cstar_[0] = sup_[0] * inv_m_[0];
        for (std::size_t i = 1; i < n; ++i) {
            m = diag[i] - sub_[i] * cstar_[i - 1];
            if (!(std::fabs(m) > 0.0)) throw NumericError("singular tridiagonal matrix");
            inv_m_[i] = 1.0 / m;
            cstar_[i] = sup_[i] * inv_m_[i];
        }
    }

    std::size_t size() const { return inv_m_.size(); }

    void solve(std::span<const double> rhs, std::span<double> x) const {
        const std::size_t n = inv_m_.size();
        x[0] = rhs[0] * inv_m_[0];
        for (std::size_t i = 1; i < n; ++i) x[i] = (rhs[i] - sub_[i] * x[i - 1]) * inv_m_[i];
        for (std::size_t i = n - 1; i-- > 0;) x[i] -= cstar_[i] * x[i + 1];
    }

  private:
    std::vector<double> sub_, sup_, inv_m_, cstar_;
};

/// Second-order Laplacian on the unknown nodes x_1..x_nx of a uniform grid
/// over (0, L), with u(x_0) = 0 (Dirichlet) and a ghost-node homogeneous
/// Neumann closure at x_nx.
inline void apply_mixed_laplacian(std::span<const double> u, std::span<double> out, double dx) {
    const std::size_t n = u.size();
    const double inv = 1.0 / (dx * dx);
    out[0] = (-2.0 * u[0] + u[1]) * inv;
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv;
    out[n - 1] = (2.0 * u[n - 2] - 2.0 * u[n - 1]) * inv;
}

struct FdConfig {
    double L{1.0};        ///< domain length
    int nx{200};          ///< interior spatial unknowns (nodes 1..nx; node 0 is pinned)
    int n_per_delay{1000};///< time steps per delay interval
    double horizon{0.0};  ///< final time T; must be a whole number of steps
};

/// Initial state and prescribed history.  phi covers [-tau, 0] and must match
/// y0 / y1 at t = 0; a constant-in-time history phi = y0 with y1 = 0 is the
/// usual choice.
struct InitialData {
    std::function<double(double)> y0;
    std::function<double(double)> y1;
    std::function<double(double, double)> phi;   // (t, x)
    std::function<double(double, double)> phi_t; // (t, x)

    static InitialData zero() {
        InitialData d;
        d.y0 = [](double) { return 0.0; };
        d.y1 = [](double) { return 0.0; };
        d.phi = [](double, double) { return 0.0; };
        d.phi_t = [](double, double) { return 0.0; };
        return d;
    }

    /// History frozen at the initial displacement: phi(t, x) = y0(x), y1 = 0.
    static InitialData standing(std::function<double(double)> shape) {
        InitialData d;
        auto s = std::move(shape);
        d.y0 = s;
        d.y1 = [](double) { return 0.0; };
        d.phi = [s](double, double x) { return s(x); };
        d.phi_t = [](double, double) { return 0.0; };
        return d;
    }
};

/// Optional space-time source, evaluated one time slice at a time on the
/// unknown nodes.
using SliceSource = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

namespace detail {

struct FdDelayTerms {
    double c2{0.0};
    double d2{0.0};
    int n_per_delay{0};
};

inline FieldGrid fd_march(double c1, double d1, const FdDelayTerms* delay, const InitialData& ic,
                          const FdConfig& cfg, double dt, const SliceSource& source) {
    if (cfg.nx < 8) throw ConfigError("fd solver requires nx >= 8");
    if (!(cfg.L > 0.0)) throw DomainError("fd solver requires L > 0");
    if (!(dt > 0.0)) throw ConfigError("fd solver requires dt > 0");
    if (!(cfg.horizon > 0.0)) throw ConfigError("fd solver requires horizon > 0");
    const long long steps = std::llround(cfg.horizon / dt);
    if (steps < 1 || std::fabs(static_cast<double>(steps) * dt - cfg.horizon) >
                         1e-9 * std::max(1.0, cfg.horizon))
        throw ConfigError("fd horizon is not a whole number of time steps");

    const std::size_t nx = static_cast<std::size_t>(cfg.nx);
    const double dx = cfg.L / static_cast<double>(cfg.nx);
    const std::size_t n_hist = delay ? static_cast<std::size_t>(delay->n_per_delay) : 0;
    const std::size_t rows = n_hist + static_cast<std::size_t>(steps) + 1;

    FieldGrid grid;
    grid.x_nodes.resize(nx + 1);
    for (std::size_t i = 0; i <= nx; ++i) grid.x_nodes[i] = dx * static_cast<double>(i);
    grid.x_nodes.back() = cfg.L;
    grid.t_nodes.resize(rows);
    for (std::size_t j = 0; j < rows; ++j)
        grid.t_nodes[j] = dt * (static_cast<double>(j) - static_cast<double>(n_hist));
    grid.values.assign(rows * (nx + 1), 0.0);
    grid.velocities.assign(rows * (nx + 1), 0.0);

    auto u_row = [&](std::size_t j) { return grid.values.data() + j * (nx + 1); };
    auto v_row = [&](std::size_t j) { return grid.velocities.data() + j * (nx + 1); };

    // History rows sampled from phi; the t = 0 row uses y0/y1 directly after
    // checking the compatibility phi(0,.) = y0, phi_t(0,.) = y1.
    double scale0 = 0.0;
    for (std::size_t i = 0; i <= nx; ++i) scale0 = std::max(scale0, std::fabs(ic.y0(grid.x_nodes[i])));
    for (std::size_t j = 0; j + 1 <= n_hist; ++j) {
        const double t = grid.t_nodes[j];
        if (std::fabs(ic.phi(t, 0.0)) > 1e-12 * std::max(1.0, scale0))
            throw DomainError("history phi violates the Dirichlet condition at x = 0");
        for (std::size_t i = 0; i <= nx; ++i) {
            u_row(j)[i] = ic.phi(t, grid.x_nodes[i]);
            v_row(j)[i] = ic.phi_t(t, grid.x_nodes[i]);
        }
    }
    if (n_hist > 0) {
        for (std::size_t i = 0; i <= nx; ++i) {
            const double x = grid.x_nodes[i];
            if (std::fabs(ic.phi(0.0, x) - ic.y0(x)) > 1e-12 * std::max(1.0, scale0) ||
                std::fabs(ic.phi_t(0.0, x) - ic.y1(x)) > 1e-12 * std::max(1.0, scale0))
                throw DomainError("history phi is incompatible with the initial data at t = 0");
        }
    }
    {
        const std::size_t j0 = n_hist;
        if (std::fabs(ic.y0(0.0)) > 1e-12 * std::max(1.0, scale0))
            throw DomainError("initial displacement violates the Dirichlet condition at x = 0");
        for (std::size_t i = 0; i <= nx; ++i) {
            u_row(j0)[i] = ic.y0(grid.x_nodes[i]);
            v_row(j0)[i] = ic.y1(grid.x_nodes[i]);
        }
        u_row(j0)[0] = 0.0;
    }

    // Constant implicit operator I - (dt/2 d1 + dt^2/4 c1) L, factorized once.
    const double alpha = 0.5 * dt * d1 + 0.25 * dt * dt * c1;
    const double inv_dx2 = 1.0 / (dx * dx);
    std::vector<double> sub(nx, -alpha * inv_dx2), diag(nx, 1.0 + 2.0 * alpha * inv_dx2),
        sup(nx, -alpha * inv_dx2);
    sub[0] = 0.0;
    sub[nx - 1] = -2.0 * alpha * inv_dx2;
    sup[nx - 1] = 0.0;
    TridiagonalSolver solver(std::move(sub), std::move(diag), std::move(sup));

    std::span<const double> x_unknown(grid.x_nodes.data() + 1, nx);
    std::vector<double> lap_u(nx), lap_v(nx), rhs(nx), vnew(nx), scratch(nx), src_now(nx),
        src_prev(nx);

    auto add_delayed = [&](std::size_t j_from, double weight) {
        // weight * (c2 L u_hist + d2 L v_hist) accumulated into rhs
        apply_mixed_laplacian(std::span<const double>(u_row(j_from) + 1, nx), scratch, dx);
        for (std::size_t i = 0; i < nx; ++i) rhs[i] += weight * delay->c2 * scratch[i];
        apply_mixed_laplacian(std::span<const double>(v_row(j_from) + 1, nx), scratch, dx);
        for (std::size_t i = 0; i < nx; ++i) rhs[i] += weight * delay->d2 * scratch[i];
    };

    for (std::size_t j = n_hist + 1; j < rows; ++j) {
        const std::size_t jp = j - 1;
        apply_mixed_laplacian(std::span<const double>(u_row(jp) + 1, nx), lap_u, dx);
        apply_mixed_laplacian(std::span<const double>(v_row(jp) + 1, nx), lap_v, dx);
        for (std::size_t i = 0; i < nx; ++i)
            rhs[i] = v_row(jp)[i + 1] + dt * c1 * lap_u[i] + alpha * lap_v[i];
        if (delay) {
            add_delayed(j - n_hist, 0.5 * dt);
            add_delayed(jp - n_hist, 0.5 * dt);
        }
        if (source) {
            source(grid.t_nodes[j], x_unknown, src_now);
            source(grid.t_nodes[jp], x_unknown, src_prev);
            for (std::size_t i = 0; i < nx; ++i) rhs[i] += 0.5 * dt * (src_now[i] + src_prev[i]);
        }
        solver.solve(rhs, vnew);
        for (std::size_t i = 0; i < nx; ++i) {
            const double vn = vnew[i];
            if (!std::isfinite(vn)) throw NumericError("fd integration produced non-finite values");
            v_row(j)[i + 1] = vn;
            u_row(j)[i + 1] = u_row(jp)[i + 1] + 0.5 * dt * (vn + v_row(jp)[i + 1]);
        }
        u_row(j)[0] = 0.0;
        v_row(j)[0] = 0.0;
    }
    return grid;
}

} // namespace detail

/// Method-of-lines Crank-Nicolson solve of the delayed equation. The
/// instantaneous terms are trapezoidal-implicit; delayed terms reference only
/// already-computed rows, so every step is a single constant-matrix solve.
inline FieldGrid solve_fd_delayed(const Coefficients& coeffs, const InitialData& ic,
                                  const FdConfig& cfg, const SliceSource& source = nullptr) {
    const auto v = validate_coefficients(coeffs, /*allow_zero_delay_terms=*/true);
    if (!v.ok) throw DomainError("invalid coefficients: " + v.joined());
    if (cfg.n_per_delay < 2) throw ConfigError("fd solver requires n_per_delay >= 2");
    const double dt = coeffs.tau / static_cast<double>(cfg.n_per_delay);
    detail::FdDelayTerms delay{coeffs.c2, coeffs.d2, cfg.n_per_delay};
    return detail::fd_march(coeffs.c1, coeffs.d1, &delay, ic, cfg, dt, source);
}

/// Same scheme without delay terms: y_tt = a y_xx + b y_txx + source.
inline FieldGrid solve_fd_instantaneous(double a, double b, const InitialData& ic,
                                        const FdConfig& cfg, double dt,
                                        const SliceSource& source = nullptr) {
    if (!(a > 0.0) || !(b >= 0.0)) throw DomainError("instantaneous solver requires a > 0 and b >= 0");
    return detail::fd_march(a, b, nullptr, ic, cfg, dt, source);
}

/// Per-slice and sup-in-time discrepancy between two fields on nested grids.
struct ErrorReport {
    std::vector<double> t_nodes;  ///< common comparison times
    std::vector<double> combined; ///< ||a-b||_{H1}^2 + ||a_t-b_t||_{L2}^2 per slice
    std::vector<double> l2_diff;  ///< ||a-b||_{L2} per slice
    double sup_combined{0.0};
    double t_at_sup{0.0};
    double sup_l2_diff{0.0};
    double sup_l2_a{0.0}; ///< sup-in-time L2 norm of the first field, for relative errors
};

namespace detail {

// Maps each node of `coarse` (within the overlap) to the matching node of
// `fine`; throws if the grids are not nested.
inline std::vector<std::pair<std::size_t, std::size_t>>
match_time_nodes(const std::vector<double>& coarse, const std::vector<double>& fine, double dt_f) {
    std::vector<std::pair<std::size_t, std::size_t>> map;
    const double tol = 1e-9 * std::max(dt_f, 1e-300);
    for (std::size_t jc = 0; jc < coarse.size(); ++jc) {
        const double t = coarse[jc];
        if (t < fine.front() - tol || t > fine.back() + tol) continue;
        const long long jf = std::llround((t - fine.front()) / dt_f);
        if (jf < 0 || jf >= static_cast<long long>(fine.size())) continue;
        if (std::fabs(fine[static_cast<std::size_t>(jf)] - t) > tol)
            throw ConfigError("time grids are not nested");
        map.emplace_back(jc, static_cast<std::size_t>(jf));
    }
    if (map.empty()) throw ConfigError("fields share no comparison times");
    return map;
}

} // namespace detail

inline ErrorReport compare_fields(const FieldGrid& a, const FieldGrid& b) {
    if (a.x_count() < 2 || b.x_count() < 2 || a.t_count() < 1 || b.t_count() < 1)
        throw ConfigError("compare_fields requires populated grids");

    // Spatial grids must coincide or one must be a stride-restriction of the other.
    std::size_t stride_a = 1, stride_b = 1;
    if (a.x_count() != b.x_count()) {
        const bool a_fine = a.x_count() > b.x_count();
        const FieldGrid& fine = a_fine ? a : b;
        const FieldGrid& coarse = a_fine ? b : a;
        if ((fine.x_count() - 1) % (coarse.x_count() - 1) != 0)
            throw ConfigError("spatial grids are not nested");
        const std::size_t r = (fine.x_count() - 1) / (coarse.x_count() - 1);
        for (std::size_t i = 0; i < coarse.x_count(); ++i)
            if (std::fabs(fine.x_nodes[i * r] - coarse.x_nodes[i]) > 1e-9 * std::max(1.0, coarse.dx()))
                throw ConfigError("spatial grids are not nested");
        (a_fine ? stride_a : stride_b) = r;
    } else {
        for (std::size_t i = 0; i < a.x_count(); ++i)
            if (std::fabs(a.x_nodes[i] - b.x_nodes[i]) > 1e-9 * std::max(1.0, a.dx()))
                throw ConfigError("spatial grids differ");
    }

    // Time: compare on the coarser grid, restricted from the finer one.
    const bool a_coarse_t = a.dt() >= b.dt();
    const FieldGrid& ct = a_coarse_t ? a : b;
    const FieldGrid& ft = a_coarse_t ? b : a;
    const auto tmap = detail::match_time_nodes(ct.t_nodes, ft.t_nodes, ft.dt());

    const std::size_t nxc = std::min(a.x_count(), b.x_count());
    const double dx = a.x_count() <= b.x_count() ? a.dx() : b.dx();
    const bool both_vel = a.has_velocities() && b.has_velocities();

    std::vector<double> ra(nxc), rb(nxc), va(nxc), vb(nxc);
    ErrorReport rep;
    rep.t_nodes.reserve(tmap.size());
    rep.combined.reserve(tmap.size());
    rep.l2_diff.reserve(tmap.size());

    auto gather = [&](const FieldGrid& g, std::size_t ti, std::size_t stride, bool vel,
                      std::vector<double>& out) {
        const auto row = vel ? g.velocity_row(ti) : g.value_row(ti);
        for (std::size_t i = 0; i < nxc; ++i) out[i] = row[i * stride];
    };

    for (const auto& [jc, jf] : tmap) {
        const std::size_t ja = a_coarse_t ? jc : jf;
        const std::size_t jb = a_coarse_t ? jf : jc;
        gather(a, ja, stride_a, false, ra);
        gather(b, jb, stride_b, false, rb);
        const double l2s = trapezoid_diff_sq(ra, rb, dx);
        const double h1s = grad_diff_sq(ra, rb, dx);
        double vels = 0.0;
        if (both_vel) {
            gather(a, ja, stride_a, true, va);
            gather(b, jb, stride_b, true, vb);
            vels = trapezoid_diff_sq(va, vb, dx);
        }
        const double comb = l2s + h1s + vels;
        const double t = ct.t_nodes[jc];
        rep.t_nodes.push_back(t);
        rep.combined.push_back(comb);
        rep.l2_diff.push_back(std::sqrt(l2s));
        if (comb > rep.sup_combined) {
            rep.sup_combined = comb;
            rep.t_at_sup = t;
        }
        rep.sup_l2_diff = std::max(rep.sup_l2_diff, std::sqrt(l2s));
        rep.sup_l2_a = std::max(rep.sup_l2_a, std::sqrt(trapezoid_sq(ra, dx)));
    }
    return rep;
}

} // namespace viskv
