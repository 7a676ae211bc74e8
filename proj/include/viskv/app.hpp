#pragma once

#include <cmath>
#include <cstddef>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "viskv/config.hpp"
#include "viskv/csv.hpp"
#include "viskv/energy.hpp"
#include "viskv/errors.hpp"
#include "viskv/fd.hpp"
#include "viskv/grid.hpp"
#include "viskv/modal.hpp"
#include "viskv/model.hpp"
#include "viskv/neutral_flux.hpp"
#include "viskv/singular_limit.hpp"
#include "viskv/stability.hpp"

namespace viskv {

/// Runs f(0..n-1), optionally on worker threads. Each call owns slot i of its
/// output, so parallel and serial execution produce identical results.
template <class F>
inline void for_each_index(std::size_t n, bool parallel, F&& f) {
    if (!parallel || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::future<void>> futures;
    futures.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        futures.push_back(std::async(std::launch::async, [&f, i]() { f(i); }));
    for (auto& fut : futures) fut.get();
}

// ---------------------------------------------------------------------------
// Rod-loading pipeline shared by the modes/simulate/oracle scenarios
// ---------------------------------------------------------------------------

struct ModalPipeline {
    BoundaryFluxTrace flux;
    FluxSourceTrace source;
    std::vector<ModeTrajectory> modes;
};

inline FluxSourceTrace make_flux_source(const BoundaryFluxTrace& flux, Lifting lifting) {
    return lifting == Lifting::Plain ? flux_source(flux) : flux_source_split(flux);
}

/// Flux solve + per-mode delayed integration for modes k in `ks`.
inline ModalPipeline run_modal_pipeline(const MusclePhysical& p, const std::vector<int>& ks,
                                        int n_per_delay, int horizon_delays, Lifting lifting,
                                        ForcingRow row, bool parallel) {
    ModalPipeline out;
    out.flux = solve_neutral_flux(p, n_per_delay, horizon_delays);
    out.source = make_flux_source(out.flux, lifting);
    const Coefficients coeffs = derive_coefficients(p);
    out.modes.resize(ks.size());
    for_each_index(ks.size(), parallel, [&](std::size_t i) {
        const ModeSpec spec = eigenpair(ks[i], p.L);
        const ModeForcingTrace forcing = make_mode_forcing(ks[i], p.L, out.source);
        out.modes[i] = solve_mode(spec, coeffs, forcing, n_per_delay, horizon_delays, row);
    });
    return out;
}

/// Adds the flux lifting to a solved homogeneous-boundary field, turning the
/// shifted unknown back into the physical displacement.
inline void add_flux_lifting(FieldGrid& field, const BoundaryFluxTrace& flux, Lifting lifting) {
    const double dt = flux.dt;
    const double half_slope = (lifting == Lifting::KinkSplit) ? 0.5 * flux.psi_dot0() : 0.0;
    const std::size_t total = flux.t_nodes.size();
    for (std::size_t r = 0; r < field.t_count(); ++r) {
        const double t = field.t_nodes[r];
        const long long j = std::llround((t - flux.t_nodes.front()) / dt);
        if (j < 0 || j >= static_cast<long long>(total) ||
            std::fabs(flux.t_nodes[static_cast<std::size_t>(j)] - t) > 1e-9 * dt)
            throw ConfigError("field grid does not align with the flux trace");
        const std::size_t js = static_cast<std::size_t>(j);
        double lift = flux.psi[js];
        double lift_dot;
        if (js == 0)
            lift_dot = (flux.psi[1] - flux.psi[0]) / dt;
        else if (js + 1 == total)
            lift_dot = (flux.psi[js] - flux.psi[js - 1]) / dt;
        else
            lift_dot = (flux.psi[js + 1] - flux.psi[js - 1]) / (2.0 * dt);
        if (lifting == Lifting::KinkSplit) {
            lift -= half_slope * std::fabs(t);
            lift_dot -= half_slope * (t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0));
        }
        for (std::size_t i = 0; i < field.x_count(); ++i) {
            field.values[r * field.x_count() + i] += lift * field.x_nodes[i];
            if (field.has_velocities())
                field.velocities[r * field.x_count() + i] += lift_dot * field.x_nodes[i];
        }
    }
}

/// Finite-difference route to the same displacement: solve the shifted system
/// with homogeneous boundaries and the flux-curvature source, then lift.
inline FieldGrid oracle_field(const MusclePhysical& p, int nx, int n_per_delay,
                              int horizon_delays, Lifting lifting) {
    const Coefficients coeffs = derive_coefficients(p);
    const BoundaryFluxTrace flux = solve_neutral_flux(p, n_per_delay, horizon_delays);
    const FluxSourceTrace src = make_flux_source(flux, lifting);
    const double dt = flux.dt;
    const double t0 = flux.t_nodes.front();
    SliceSource source = [&src, dt, t0](double t, std::span<const double> x,
                                        std::span<double> out) {
        const long long j = std::llround((t - t0) / dt);
        const double s = src.values[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = s * x[i];
    };
    FdConfig cfg;
    cfg.L = p.L;
    cfg.nx = nx;
    cfg.n_per_delay = n_per_delay;
    cfg.horizon = static_cast<double>(horizon_delays) * p.tau;
    FieldGrid field = solve_fd_delayed(coeffs, InitialData::zero(), cfg, source);
    add_flux_lifting(field, flux, lifting);
    return field;
}

/// Output row selection: all of [0, T] at a stride that keeps roughly 100
/// rows, always including the final node.
inline std::vector<std::size_t> output_time_indices(std::size_t first, std::size_t last,
                                                    int stride_cfg) {
    std::size_t stride = stride_cfg > 0 ? static_cast<std::size_t>(stride_cfg)
                                        : std::max<std::size_t>(1, (last - first) / 100);
    std::vector<std::size_t> idx;
    for (std::size_t j = first; j <= last; j += stride) idx.push_back(j);
    if (idx.back() != last) idx.push_back(last);
    return idx;
}

// ---------------------------------------------------------------------------
// Scenario renderers (CSV bodies; deterministic)
// ---------------------------------------------------------------------------

inline std::string render_flux(const RunConfig& cfg) {
    CsvBuilder csv("flux", effective_parameters(cfg));
    std::vector<BoundaryFluxTrace> traces(cfg.epsilons.size());
    for_each_index(cfg.epsilons.size(), cfg.parallel, [&](std::size_t i) {
        MusclePhysical p = cfg.physical;
        p.epsilon = cfg.epsilons[i];
        traces[i] = solve_neutral_flux(p, cfg.n_per_delay, cfg.horizon_delays);
    });
    std::vector<std::string> cols{"t"};
    if (cfg.epsilons.size() == 1)
        cols.push_back("psi");
    else
        for (double e : cfg.epsilons) cols.push_back("psi_" + format_double(e));
    csv.columns(cols);
    std::vector<double> row(cols.size());
    for (std::size_t j = 0; j < traces.front().t_nodes.size(); ++j) {
        row[0] = traces.front().t_nodes[j];
        for (std::size_t i = 0; i < traces.size(); ++i) row[i + 1] = traces[i].psi[j];
        csv.row(row);
    }
    return csv.str();
}

inline std::string render_modes(const RunConfig& cfg) {
    CsvBuilder csv("modes", effective_parameters(cfg));
    const ModalPipeline pipe =
        run_modal_pipeline(cfg.physical, cfg.ks, cfg.n_per_delay, cfg.horizon_delays, cfg.lifting,
                           cfg.forcing_row, cfg.parallel);
    std::vector<std::string> cols{"t"};
    for (int k : cfg.ks) {
        cols.push_back("w_" + std::to_string(k));
        cols.push_back("wdot_" + std::to_string(k));
    }
    csv.columns(cols);
    std::vector<double> row(cols.size());
    for (std::size_t j = 0; j < pipe.flux.t_nodes.size(); ++j) {
        row[0] = pipe.flux.t_nodes[j];
        for (std::size_t i = 0; i < pipe.modes.size(); ++i) {
            row[1 + 2 * i] = pipe.modes[i].w[j];
            row[2 + 2 * i] = pipe.modes[i].w_dot[j];
        }
        csv.row(row);
    }
    return csv.str();
}

/// Spectral displacement field for the configured rod scenario.
inline FieldGrid simulate_field(const RunConfig& cfg) {
    std::vector<int> ks(static_cast<std::size_t>(cfg.modes));
    for (int k = 0; k < cfg.modes; ++k) ks[static_cast<std::size_t>(k)] = k;
    const ModalPipeline pipe =
        run_modal_pipeline(cfg.physical, ks, cfg.n_per_delay, cfg.horizon_delays, cfg.lifting,
                           cfg.forcing_row, cfg.parallel);
    const std::size_t first = pipe.flux.kink_index();
    const std::size_t last = pipe.flux.t_nodes.size() - 1;
    const auto t_idx = output_time_indices(first, last, cfg.t_stride);
    return reconstruct_field(pipe.modes, pipe.flux, linspace(0.0, cfg.physical.L, cfg.x_points),
                             t_idx, cfg.lifting);
}

inline std::string render_field_csv(const char* name, const RunConfig& cfg,
                                    const FieldGrid& field) {
    CsvBuilder csv(name, effective_parameters(cfg));
    csv.columns({"t", "x", "y"});
    for (std::size_t r = 0; r < field.t_count(); ++r)
        for (std::size_t i = 0; i < field.x_count(); ++i)
            csv.row({field.t_nodes[r], field.x_nodes[i], field.value(r, i)});
    return csv.str();
}

inline std::string render_simulate(const RunConfig& cfg) {
    return render_field_csv("simulate", cfg, simulate_field(cfg));
}

inline std::string render_oracle(const RunConfig& cfg) {
    FieldGrid field =
        oracle_field(cfg.physical, cfg.nx, cfg.n_per_delay, cfg.horizon_delays, cfg.lifting);
    // Restrict rows like simulate; keep every FD x node.
    const std::size_t n = static_cast<std::size_t>(cfg.n_per_delay);
    const auto t_idx = output_time_indices(n, field.t_count() - 1, cfg.t_stride);
    FieldGrid out;
    out.x_nodes = field.x_nodes;
    out.t_nodes.reserve(t_idx.size());
    out.values.reserve(t_idx.size() * field.x_count());
    for (auto j : t_idx) {
        out.t_nodes.push_back(field.t_nodes[j]);
        const auto row = field.value_row(j);
        out.values.insert(out.values.end(), row.begin(), row.end());
    }
    return render_field_csv("oracle", cfg, out);
}

/// Coefficients for the diagnostics scenarios: derived from the physical rod
/// unless overridden key-by-key.
inline Coefficients resolve_coefficients(const RunConfig& cfg) {
    Coefficients c = derive_coefficients(cfg.physical);
    if (cfg.c1) c.c1 = *cfg.c1;
    if (cfg.c2) c.c2 = *cfg.c2;
    if (cfg.d1) c.d1 = *cfg.d1;
    if (cfg.d2) c.d2 = *cfg.d2;
    c.tau = cfg.physical.tau;
    return c;
}

inline StabilityInput resolve_stability_input(const RunConfig& cfg) {
    StabilityInput s;
    s.coeffs = resolve_coefficients(cfg);
    s.cp = cfg.cp ? *cfg.cp : poincare_constant_interval(cfg.physical.L);
    return s;
}

inline std::string render_energy(const RunConfig& cfg, std::string* fit_summary = nullptr) {
    const StabilityInput s = resolve_stability_input(cfg);
    const LyapunovWeights w = lyapunov_weights(s);
    const double L = cfg.physical.L;
    const ModeSpec ground = eigenpair(0, L);
    FdConfig fcfg;
    fcfg.L = L;
    fcfg.nx = cfg.nx;
    fcfg.n_per_delay = cfg.n_per_delay;
    fcfg.horizon = static_cast<double>(cfg.horizon_delays) * s.coeffs.tau;
    const FieldGrid field = solve_fd_delayed(
        s.coeffs, InitialData::standing([ground](double x) { return ground.phi(x); }), fcfg);
    const EnergyTrace trace =
        compute_lyapunov(field, s.coeffs, w, static_cast<std::size_t>(std::max(1, cfg.energy_stride)));

    CsvBuilder csv("energy", effective_parameters(cfg));
    csv.comment("weights N=" + format_double(w.N) + " M=" + format_double(w.M) +
                " xi1=" + format_double(w.xi1) + " xi2=" + format_double(w.xi2) +
                " k1=" + format_double(w.k1) + " k2=" + format_double(w.k2));
    csv.columns({"t", "E", "F", "k1E", "k2E"});
    for (std::size_t i = 0; i < trace.t_nodes.size(); ++i)
        csv.row({trace.t_nodes[i], trace.energy[i], trace.lyapunov[i], w.k1 * trace.energy[i],
                 w.k2 * trace.energy[i]});
    if (cfg.fit) {
        const DecayFit fit = fit_decay_rate(trace, 2.0 * s.coeffs.tau, fcfg.horizon);
        const std::string line = "fit alpha_hat=" + format_double(fit.alpha_hat) +
                                 " c_hat=" + format_double(fit.c_hat) +
                                 " r_squared=" + format_double(fit.r_squared);
        csv.comment(line);
        if (fit_summary) *fit_summary = line;
    }
    return csv.str();
}

inline std::string render_stability_check(const RunConfig& cfg, std::string* table = nullptr) {
    const StabilityInput s = resolve_stability_input(cfg);
    const StabilityVerdict v = check_stability(s);
    CsvBuilder csv("stability-check", effective_parameters(cfg));
    csv.comment(std::string("assumption_ok=") + (v.assumption_ok ? "1" : "0"));
    csv.comment(std::string("theorem_ok=") + (v.theorem_ok ? "1" : "0"));
    csv.columns({"condition", "lhs", "rhs", "satisfied"});
    std::string pretty = "condition                      lhs            rhs            ok\n";
    for (const auto& c : v.conditions) {
        csv.raw(c.id + "," + format_double(c.lhs) + "," + format_double(c.rhs) + "," +
                (c.satisfied ? "1" : "0") + "\n");
        std::string line = c.id;
        line.resize(30, ' ');
        std::string lhs = format_double(c.lhs);
        lhs.resize(14, ' ');
        std::string rhs = format_double(c.rhs);
        rhs.resize(14, ' ');
        pretty += line + " " + lhs + " " + rhs + " " + (c.satisfied ? "yes" : "no") + "\n";
    }
    pretty += std::string("assumption: ") + (v.assumption_ok ? "pass" : "fail") +
              ", closed-form region: " + (v.theorem_ok ? "pass" : "fail") + "\n";
    if (table) *table = pretty;
    return csv.str();
}

inline std::string render_stability_region(const RunConfig& cfg) {
    const double c1 = cfg.c1 ? *cfg.c1 : 1.0;
    const double cp = cfg.cp ? *cfg.cp : 1.0;
    const RegionSample sample =
        sample_region(c1, cp, {cfg.region_c2_lo, cfg.region_c2_hi},
                      {cfg.region_d1_lo, cfg.region_d1_hi}, {cfg.region_d2_lo, cfg.region_d2_hi},
                      cfg.region_res);
    CsvBuilder csv("stability-region", effective_parameters(cfg));
    csv.columns({"c2", "d1", "d2", "assumption_ok", "theorem_ok"});
    for (std::size_t i = 0; i < sample.c2_axis.size(); ++i)
        for (std::size_t j = 0; j < sample.d1_axis.size(); ++j)
            for (std::size_t k = 0; k < sample.d2_axis.size(); ++k) {
                const std::size_t idx = sample.index(i, j, k);
                csv.row({sample.c2_axis[i], sample.d1_axis[j], sample.d2_axis[k],
                         static_cast<double>(sample.assumption_ok[idx]),
                         static_cast<double>(sample.theorem_ok[idx])});
            }
    return csv.str();
}

/// Base coefficients for the delay-to-zero sweep; defaults to the canonical
/// unit-domain setup unless coefficients are given explicitly.
inline Coefficients resolve_sweep_coefficients(const RunConfig& cfg) {
    Coefficients c{1.0, 0.2, 1.0, 0.2, cfg.tau0};
    if (cfg.c1) c.c1 = *cfg.c1;
    if (cfg.c2) c.c2 = *cfg.c2;
    if (cfg.d1) c.d1 = *cfg.d1;
    if (cfg.d2) c.d2 = *cfg.d2;
    return c;
}

inline std::string render_singular_limit(const RunConfig& cfg, std::string* summary = nullptr) {
    const Coefficients base = resolve_sweep_coefficients(cfg);
    const double L = 1.0;
    if (cfg.tau_points < 2) throw ConfigError("singular limit requires tau_points >= 2");
    std::vector<double> taus;
    double t = cfg.tau0;
    for (int i = 0; i < cfg.tau_points; ++i, t *= 0.5) taus.push_back(t);
    const ModeSpec ground = eigenpair(0, L);
    FdConfig fcfg;
    fcfg.L = L;
    fcfg.nx = cfg.nx;
    fcfg.n_per_delay = cfg.n_per_delay;
    const ConvergenceReport rep = run_singular_limit(
        base, InitialData::standing([ground](double x) { return ground.phi(x); }), taus, fcfg,
        cfg.horizon, cfg.parallel);

    CsvBuilder csv("singular-limit", effective_parameters(cfg));
    csv.columns({"tau", "error_sq"});
    for (std::size_t i = 0; i < rep.taus.size(); ++i) csv.row({rep.taus[i], rep.errors[i]});
    const std::string line = "fit slope=" + format_double(rep.slope) +
                             " intercept=" + format_double(rep.intercept) +
                             " discretization_check=" + format_double(rep.disc_error);
    csv.comment(line);
    if (summary) *summary = line;
    return csv.str();
}

/// Executes a scenario and writes its artifact. Returns the output path.
inline std::string run(const RunConfig& cfg, std::ostream& log = std::cout) {
    const std::string path = cfg.out_path.empty()
                                 ? std::string("viskv_") + scenario_name(cfg.scenario) + ".csv"
                                 : cfg.out_path;
    std::string body;
    std::string extra;
    switch (cfg.scenario) {
        case Scenario::Flux: body = render_flux(cfg); break;
        case Scenario::Modes: body = render_modes(cfg); break;
        case Scenario::Simulate: body = render_simulate(cfg); break;
        case Scenario::Oracle: body = render_oracle(cfg); break;
        case Scenario::Energy: body = render_energy(cfg, &extra); break;
        case Scenario::StabilityCheck: body = render_stability_check(cfg, &extra); break;
        case Scenario::StabilityRegion: body = render_stability_region(cfg); break;
        case Scenario::SingularLimit: body = render_singular_limit(cfg, &extra); break;
    }
    write_text_file(path, body);
    if (!extra.empty()) log << extra << "\n";
    log << "wrote " << path << "\n";
    return path;
}

} // namespace viskv
