#pragma once

#include <cmath>
#include <cstddef>
#include <future>
#include <vector>

#include "viskv/errors.hpp"
#include "viskv/fd.hpp"
#include "viskv/grid.hpp"
#include "viskv/model.hpp"

namespace viskv {

/// Result of a delay-to-zero sweep: the delayed solutions are compared in
///   e(tau) = max_t ( ||y_tau - y||_{H1}^2 + ||dt y_tau - dt y||_{L2}^2 )
/// against the single instantaneous solve with summed coefficients
/// (c1 + c2, d1 + d2).
struct ConvergenceReport {
    std::vector<double> taus;
    std::vector<double> errors; ///< e(tau), same order as taus
    double slope{0.0};          ///< log-log fit slope of e against tau
    double intercept{0.0};      ///< log-log fit intercept
    bool fit_valid{false};
    double disc_error{0.0};     ///< largest-tau rerun at the smallest dt, same metric
    std::vector<std::vector<double>> error_traces; ///< per-tau e(t) slices
    std::vector<std::vector<double>> trace_times;
};

/// Runs the sweep. All runs share dx; each delayed run uses dt = tau/N with N
/// fixed, and the instantaneous reference is solved once at the finest dt so
/// every coarser time grid restricts onto it. The largest-tau case is re-run
/// at the finest dt as well; the gap between the two runs bounds the scheme
/// error separately from the physical delay effect.
inline ConvergenceReport run_singular_limit(const Coefficients& base, const InitialData& ic,
                                            std::vector<double> taus, const FdConfig& cfg,
                                            double horizon, bool parallel = true) {
    if (taus.size() < 2) throw ConfigError("singular limit sweep needs at least 2 delays");
    for (std::size_t i = 0; i + 1 < taus.size(); ++i)
        if (!(taus[i] > taus[i + 1]))
            throw ConfigError("singular limit delays must be strictly decreasing");
    if (!(taus.back() > 0.0)) throw ConfigError("singular limit delays must be positive");
    if (!(horizon > 0.0)) throw ConfigError("singular limit requires a positive horizon");

    FdConfig run_cfg = cfg;
    run_cfg.horizon = horizon;
    const double dt_min = taus.back() / static_cast<double>(cfg.n_per_delay);

    const FieldGrid limit =
        solve_fd_instantaneous(base.c1 + base.c2, base.d1 + base.d2, ic, run_cfg, dt_min);

    auto solve_one = [&](double tau) {
        Coefficients c = base;
        c.tau = tau;
        try {
            return solve_fd_delayed(c, ic, run_cfg);
        } catch (const std::exception& e) {
            throw NumericError("delayed solve failed at tau = " + std::to_string(tau) + ": " +
                               e.what());
        }
    };

    std::vector<FieldGrid> delayed(taus.size());
    if (parallel) {
        std::vector<std::future<FieldGrid>> futures;
        futures.reserve(taus.size());
        for (double tau : taus)
            futures.push_back(std::async(std::launch::async, solve_one, tau));
        for (std::size_t i = 0; i < futures.size(); ++i) delayed[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < taus.size(); ++i) delayed[i] = solve_one(taus[i]);
    }

    ConvergenceReport rep;
    rep.taus = std::move(taus);
    for (std::size_t i = 0; i < delayed.size(); ++i) {
        const ErrorReport er = compare_fields(delayed[i], limit);
        rep.errors.push_back(er.sup_combined);
        rep.error_traces.push_back(er.combined);
        rep.trace_times.push_back(er.t_nodes);
    }

    // Scheme-error bound: largest tau integrated at the finest dt.
    {
        Coefficients c = base;
        c.tau = rep.taus.front();
        FdConfig fine_cfg = run_cfg;
        const long long n_fine = std::llround(rep.taus.front() / dt_min);
        if (n_fine >= 2 &&
            std::fabs(static_cast<double>(n_fine) * dt_min - rep.taus.front()) <
                1e-9 * rep.taus.front()) {
            fine_cfg.n_per_delay = static_cast<int>(n_fine);
            const FieldGrid fine = solve_fd_delayed(c, ic, fine_cfg);
            rep.disc_error = compare_fields(delayed.front(), fine).sup_combined;
        } else {
            throw ConfigError("singular limit delays are not nested dyadically");
        }
    }

    // Log-log fit over strictly positive errors.
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < rep.errors.size(); ++i)
        if (rep.errors[i] > 0.0) {
            lx.push_back(std::log(rep.taus[i]));
            ly.push_back(std::log(rep.errors[i]));
        }
    if (lx.size() >= 2) {
        const double n = static_cast<double>(lx.size());
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
        }
        const double xbar = sx / n, ybar = sy / n;
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - xbar) * (lx[i] - xbar);
            sxy += (lx[i] - xbar) * (ly[i] - ybar);
        }
        if (sxx > 0.0) {
            rep.slope = sxy / sxx;
            rep.intercept = ybar - rep.slope * xbar;
            rep.fit_valid = true;
        }
    }
    return rep;
}

} // namespace viskv
