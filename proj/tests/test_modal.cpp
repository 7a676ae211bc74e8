#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "viskv/app.hpp"
#include "viskv/modal.hpp"

using namespace viskv;

namespace {

MusclePhysical rod(double epsilon) {
    MusclePhysical p{5.33e-3, 1.06e3, 2.00e4, 2.00e7, epsilon, 1.0052e4, 0.0};
    p.tau = p.retardation_time();
    return p;
}

double trapz(const std::vector<double>& f, double dx) {
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * dx;
}

} // namespace

TEST_CASE("eigenpairs of the mixed-boundary Laplacian", "[modal]") {
    const double L = 5.33e-3;
    SECTION("ground eigenvalue") {
        CHECK(eigenpair(0, L).lambda == Catch::Approx(8.6853e4).epsilon(1e-4));
    }
    SECTION("eigenvalues strictly increasing") {
        for (int k = 0; k < 20; ++k)
            CHECK(eigenpair(k + 1, L).lambda > eigenpair(k, L).lambda);
    }
    SECTION("orthonormality by quadrature") {
        const int n = 10000;
        const double dx = L / n;
        for (int j = 0; j <= 5; ++j)
            for (int k = 0; k <= 5; ++k) {
                const ModeSpec a = eigenpair(j, L), b = eigenpair(k, L);
                std::vector<double> f(n + 1);
                for (int i = 0; i <= n; ++i) {
                    const double x = dx * i;
                    f[static_cast<std::size_t>(i)] = a.phi(x) * b.phi(x);
                }
                const double ip = trapz(f, dx);
                CHECK(std::fabs(ip - (j == k ? 1.0 : 0.0)) < 1e-10);
            }
    }
    SECTION("boundary conditions hold exactly") {
        for (int k = 0; k <= 20; ++k) {
            const ModeSpec m = eigenpair(k, L);
            CHECK(m.phi(0.0) == 0.0);
            CHECK(m.phi_prime(L) == 0.0);
        }
    }
}

TEST_CASE("forcing coefficients", "[modal]") {
    const double L = 5.33e-3;
    SECTION("ground coefficient equals the projection integral") {
        CHECK(forcing_coefficient(0, L) == Catch::Approx(2.2303e-4).epsilon(1e-4));
        const int n = 10000;
        const double dx = L / n;
        const ModeSpec m = eigenpair(0, L);
        std::vector<double> f(n + 1);
        for (int i = 0; i <= n; ++i) {
            const double x = dx * i;
            f[static_cast<std::size_t>(i)] = x * m.phi(x);
        }
        CHECK(std::fabs(trapz(f, dx) - forcing_coefficient(0, L)) < 1e-10);
    }
    SECTION("sign alternation and magnitude decay") {
        for (int k = 0; k < 10; ++k) {
            const double g = forcing_coefficient(k, L);
            CHECK((k % 2 == 0 ? g > 0.0 : g < 0.0));
            if (k > 0)
                CHECK(std::fabs(g) < std::fabs(forcing_coefficient(k - 1, L)));
        }
    }
    SECTION("ratio of the first two coefficients") {
        CHECK(forcing_coefficient(0, L) / forcing_coefficient(1, L) == Catch::Approx(-9.0).epsilon(1e-14));
    }
}

TEST_CASE("crank-nicolson mode step", "[modal]") {
    SECTION("zero state, zero history, zero source stays zero") {
        HistoryBuffer<Vec2> h(1.0, 4, std::vector<Vec2>(5, Vec2{0.0, 0.0}));
        const Mat2 A{0.0, 1.0, -1.0, -1.0};
        const Mat2 B{0.0, 0.0, -0.1, -0.1};
        const Vec2 x = step_mode_cn(h.newest(), h, 0.25, A, B, 0.0);
        CHECK(x.w == 0.0);
        CHECK(x.w_dot == 0.0);
    }
    SECTION("one explicit step against a hand 2x2 solve") {
        // A = [0 1; -1 -1], x0 = (1, 0), dt = 0.1, B = 0:
        // (I - dt/2 A) x1 = (I + dt/2 A) x0 = (1, -0.05)
        HistoryBuffer<Vec2> h(1.0, 4, std::vector<Vec2>(5, Vec2{1.0, 0.0}));
        const Mat2 A{0.0, 1.0, -1.0, -1.0};
        const Mat2 B{};
        const Vec2 x = step_mode_cn(h.newest(), h, 0.1, A, B, 0.0);
        const double det = 1.0 * 1.05 - (-0.05) * 0.05;
        CHECK(x.w == Catch::Approx((1.0 * 1.05 - (-0.05) * (-0.05)) / det).epsilon(1e-14));
        CHECK(x.w_dot == Catch::Approx((1.0 * (-0.05) - 0.05 * 1.0) / det).epsilon(1e-14));
    }
    SECTION("undelayed amplification matrix is non-expansive and energy falls") {
        const double c1l = 3.7, d1l = 2.1, dt = 0.05;
        const Mat2 A{0.0, 1.0, -c1l, -d1l};
        // eigenvalues of (I - dt/2 A)^{-1} (I + dt/2 A) have modulus <= 1
        const std::complex<double> disc = std::sqrt(std::complex<double>(d1l * d1l - 4.0 * c1l, 0.0));
        for (int s : {-1, 1}) {
            const std::complex<double> mu = (-d1l + static_cast<double>(s) * disc) / 2.0;
            const std::complex<double> g = (1.0 + 0.5 * dt * mu) / (1.0 - 0.5 * dt * mu);
            CHECK(std::abs(g) <= 1.0 + 1e-14);
        }
        // stepped energy 1/2 wdot^2 + 1/2 c1l w^2 is non-increasing
        HistoryBuffer<Vec2> h(1.0, 4, std::vector<Vec2>(5, Vec2{1.0, 0.0}));
        Vec2 x{1.0, 0.0};
        double e_prev = 0.5 * x.w_dot * x.w_dot + 0.5 * c1l * x.w * x.w;
        for (int j = 0; j < 200; ++j) {
            x = step_mode_cn(x, h, dt, A, Mat2{}, 0.0);
            h.push(x);
            const double e = 0.5 * x.w_dot * x.w_dot + 0.5 * c1l * x.w * x.w;
            CHECK(e <= e_prev * (1.0 + 1e-13));
            e_prev = e;
        }
    }
}

namespace {

// Independent classical (no-delay) Crank-Nicolson oracle for
// x' = A x + f(t) e_row, written against plain doubles.
struct PlainTraj {
    std::vector<double> w, w_dot;
};

PlainTraj integrate_plain(double c1l, double d1l, const std::vector<double>& forcing,
                          std::size_t first_step, double dt, bool velocity_row) {
    PlainTraj out;
    out.w.assign(forcing.size(), 0.0);
    out.w_dot.assign(forcing.size(), 0.0);
    double w = 0.0, wd = 0.0;
    for (std::size_t j = first_step; j < forcing.size(); ++j) {
        // (I - dt/2 A) x = (I + dt/2 A) x_prev + dt/2 f e_row
        const double m00 = 1.0, m01 = -0.5 * dt;
        const double m10 = 0.5 * dt * c1l, m11 = 1.0 + 0.5 * dt * d1l;
        double r0 = w + 0.5 * dt * wd;
        double r1 = -0.5 * dt * c1l * w + (1.0 - 0.5 * dt * d1l) * wd;
        (velocity_row ? r1 : r0) += 0.5 * dt * forcing[j];
        const double det = m00 * m11 - m01 * m10;
        const double nw = (r0 * m11 - r1 * m01) / det;
        const double nwd = (m00 * r1 - m10 * r0) / det;
        w = nw;
        wd = nwd;
        out.w[j] = w;
        out.w_dot[j] = wd;
    }
    return out;
}

} // namespace

TEST_CASE("mode trajectories", "[modal]") {
    SECTION("zero forcing gives the zero trajectory") {
        const auto p = rod(0.3);
        const Coefficients coeffs = derive_coefficients(p);
        const auto flux = solve_neutral_flux(p, 50, 3);
        auto src = flux_source(flux);
        for (auto& v : src.values) v = 0.0;
        const auto traj = solve_mode(eigenpair(0, p.L), coeffs, make_mode_forcing(0, p.L, src), 50, 3);
        for (double v : traj.w) CHECK(v == 0.0);
        for (double v : traj.w_dot) CHECK(v == 0.0);
    }
    SECTION("undelayed trajectory matches an independent classical integrator") {
        const auto p = rod(0.0);
        const Coefficients coeffs = derive_coefficients(p);
        const int n = 400, K = 5;
        const auto flux = solve_neutral_flux(p, n, K);
        const auto src = flux_source(flux);
        const auto forcing = make_mode_forcing(0, p.L, src);
        const auto traj = solve_mode(eigenpair(0, p.L), coeffs, forcing, n, K);
        const double lam = eigenpair(0, p.L).lambda;
        const auto oracle = integrate_plain(coeffs.c1 * lam, coeffs.d1 * lam, forcing.values,
                                            static_cast<std::size_t>(n) + 1, forcing.dt, true);
        double scale = 0.0, worst = 0.0;
        for (std::size_t j = 0; j < traj.w.size(); ++j) {
            scale = std::max(scale, std::fabs(oracle.w[j]));
            worst = std::max(worst, std::fabs(traj.w[j] - oracle.w[j]));
        }
        CHECK(worst <= 1e-12 * std::max(scale, 1e-300));
    }
    SECTION("first delay window agrees exactly with the undelayed path") {
        // Zero history: the delayed terms vanish node-for-node until t > tau.
        const auto p = rod(0.3);
        const Coefficients delayed = derive_coefficients(p);
        Coefficients instant = delayed;
        instant.c2 = 0.0;
        instant.d2 = 0.0;
        const int n = 100, K = 3;
        const auto flux = solve_neutral_flux(p, n, K);
        const auto forcing = make_mode_forcing(1, p.L, flux_source(flux));
        const auto spec = eigenpair(1, p.L);
        const auto a = solve_mode(spec, delayed, forcing, n, K);
        const auto b = solve_mode(spec, instant, forcing, n, K);
        // nodes with t <= tau - 2 dt precede any delayed reference to nonzero data
        for (std::size_t j = 0; j < static_cast<std::size_t>(2 * n - 2); ++j) {
            CHECK(a.w[j] == b.w[j]);
            CHECK(a.w_dot[j] == b.w_dot[j]);
        }
    }
    SECTION("modes settle back to zero on long horizons") {
        const auto p = rod(0.2);
        const Coefficients coeffs = derive_coefficients(p);
        const int n = 200, K = 50;
        const auto flux = solve_neutral_flux(p, n, K);
        const auto src = flux_source(flux);
        for (int k : {0, 1, 2}) {
            const auto traj =
                solve_mode(eigenpair(k, p.L), coeffs, make_mode_forcing(k, p.L, src), n, K);
            double peak = 0.0;
            for (double v : traj.w) peak = std::max(peak, std::fabs(v));
            CHECK(std::fabs(traj.w.back()) <= 1e-6 * peak + 1e-300);
        }
    }
}

TEST_CASE("field reconstruction", "[modal]") {
    const auto p = rod(0.0);
    SECTION("all-zero inputs give the zero field") {
        const int n = 50, K = 2;
        auto flux = solve_neutral_flux(p, n, K);
        for (auto& v : flux.psi) v = 0.0;
        auto src = flux_source(flux);
        std::vector<ModeTrajectory> modes;
        modes.push_back(solve_mode(eigenpair(0, p.L), derive_coefficients(p),
                                   make_mode_forcing(0, p.L, src), n, K));
        const FieldGrid g = reconstruct_field(modes, flux, linspace(0.0, p.L, 11));
        for (double v : g.values) CHECK(v == 0.0);
    }
    SECTION("empty mode list rejected") {
        const auto flux = solve_neutral_flux(p, 50, 2);
        CHECK_THROWS_AS(reconstruct_field({}, flux, linspace(0.0, p.L, 11)), ConfigError);
    }
}

TEST_CASE("rod pipeline invariants", "[modal]") {
    SECTION("static tip displacement, undelayed and delayed") {
        for (double eps : {0.0, 0.5}) {
            const auto pe = rod(eps);
            std::vector<int> ks(21);
            for (int k = 0; k < 21; ++k) ks[static_cast<std::size_t>(k)] = k;
            const auto pipe = run_modal_pipeline(pe, ks, 1000, 10, Lifting::Plain,
                                                 ForcingRow::Velocity, false);
            const FieldGrid g = reconstruct_field(pipe.modes, pipe.flux, linspace(0.0, pe.L, 9),
                                                  {pipe.flux.t_nodes.size() - 1});
            const double tip = g.value(0, g.x_count() - 1);
            const double target = pe.f * pe.L / (pe.E * (1.0 + eps));
            const double tol = eps == 0.0 ? 0.01 : 0.02;
            CHECK(std::fabs(tip - target) / target < tol);
            if (eps == 0.0) CHECK(target == Catch::Approx(2.679e-3).epsilon(1e-3));
        }
    }
    SECTION("dirichlet end is exactly zero, linearity in the load is exact") {
        auto pe = rod(0.2);
        std::vector<int> ks{0, 1, 2, 3};
        const auto pipe =
            run_modal_pipeline(pe, ks, 200, 5, Lifting::Plain, ForcingRow::Velocity, false);
        const FieldGrid g = reconstruct_field(pipe.modes, pipe.flux, linspace(0.0, pe.L, 9));
        for (std::size_t r = 0; r < g.t_count(); ++r) CHECK(g.value(r, 0) == 0.0);

        MusclePhysical p2 = pe;
        p2.f *= 2.0;
        const auto pipe2 =
            run_modal_pipeline(p2, ks, 200, 5, Lifting::Plain, ForcingRow::Velocity, false);
        const FieldGrid g2 = reconstruct_field(pipe2.modes, pipe2.flux, linspace(0.0, pe.L, 9));
        for (std::size_t i = 0; i < g.values.size(); ++i)
            CHECK(g2.values[i] == 2.0 * g.values[i]);
    }
    SECTION("21-mode and 41-mode reconstructions differ by a spectral tail") {
        const auto pe = rod(0.1);
        std::vector<int> ks21(21), ks41(41);
        for (int k = 0; k < 41; ++k) {
            if (k < 21) ks21[static_cast<std::size_t>(k)] = k;
            ks41[static_cast<std::size_t>(k)] = k;
        }
        const auto pa =
            run_modal_pipeline(pe, ks21, 500, 10, Lifting::Plain, ForcingRow::Velocity, false);
        const auto pb =
            run_modal_pipeline(pe, ks41, 500, 10, Lifting::Plain, ForcingRow::Velocity, false);
        const auto xs = linspace(0.0, pe.L, 33);
        std::vector<std::size_t> sel;
        for (std::size_t j = 500; j < pa.flux.t_nodes.size(); j += 500) sel.push_back(j);
        const FieldGrid ga = reconstruct_field(pa.modes, pa.flux, xs, sel);
        const FieldGrid gb = reconstruct_field(pb.modes, pb.flux, xs, sel);
        double sup = 0.0, diff = 0.0;
        for (std::size_t i = 0; i < ga.values.size(); ++i) {
            sup = std::max(sup, std::fabs(gb.values[i]));
            diff = std::max(diff, std::fabs(ga.values[i] - gb.values[i]));
        }
        CHECK(diff < 1e-3 * sup);
    }
    SECTION("lifting variants agree once the kink ramp is restored") {
        const auto pe = rod(0.2);
        std::vector<int> ks{0, 1, 2, 3, 4};
        const int n = 500, K = 10;
        const auto plain =
            run_modal_pipeline(pe, ks, n, K, Lifting::Plain, ForcingRow::Velocity, false);
        const auto split =
            run_modal_pipeline(pe, ks, n, K, Lifting::KinkSplit, ForcingRow::Velocity, false);
        const auto xs = linspace(0.0, pe.L, 17);
        std::vector<std::size_t> sel;
        for (std::size_t j = 0; j < plain.flux.t_nodes.size(); j += 100) sel.push_back(j);
        const FieldGrid ga = reconstruct_field(plain.modes, plain.flux, xs, sel, Lifting::Plain);
        const FieldGrid gb = reconstruct_field(split.modes, split.flux, xs, sel, Lifting::KinkSplit);
        const double slope_half = 0.5 * split.flux.psi_dot0();
        double sup = 0.0, diff = 0.0;
        for (std::size_t r = 0; r < ga.t_count(); ++r) {
            const double t = ga.t_nodes[r];
            if (t < 0.1 * pe.tau) continue;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double restored = gb.value(r, i) + slope_half * std::fabs(t) * xs[i];
                sup = std::max(sup, std::fabs(ga.value(r, i)));
                diff = std::max(diff, std::fabs(ga.value(r, i) - restored));
            }
        }
        CHECK(diff < 1e-3 * sup);
    }
}
