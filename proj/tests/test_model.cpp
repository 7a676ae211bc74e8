#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "viskv/history_buffer.hpp"
#include "viskv/model.hpp"

using namespace viskv;

TEST_CASE("coefficient validation", "[model]") {
    SECTION("all constraints hold") {
        const auto r = validate_coefficients({1.0, 0.1, 1.0, 0.1, 1.0});
        CHECK(r.ok);
        CHECK(r.violations.empty());
    }
    SECTION("sign violation names the field") {
        const auto r = validate_coefficients({-1.0, 0.1, 1.0, 0.1, 1.0});
        CHECK_FALSE(r.ok);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0] == "c1 > 0");
    }
    SECTION("zero delay terms gated by the flag") {
        const Coefficients c{1.0, 0.0, 1.0, 0.0, 1.0};
        CHECK(validate_coefficients(c, true).ok);
        const auto strict = validate_coefficients(c, false);
        CHECK_FALSE(strict.ok);
        REQUIRE(strict.violations.size() == 2);
        CHECK(strict.violations[0] == "c2 != 0");
        CHECK(strict.violations[1] == "d2 != 0");
    }
    SECTION("non-finite input rejected") {
        const auto r = validate_coefficients({std::nan(""), 0.1, 1.0, 0.1, 1.0});
        CHECK_FALSE(r.ok);
    }
}

TEST_CASE("derived coefficients from rod physics", "[model]") {
    SECTION("reference rod values") {
        MusclePhysical p{5.33e-3, 1.06e3, 2.00e4, 2.00e7, 0.1, 1.0052e4, 0.0};
        p.tau = p.retardation_time();
        const Coefficients c = derive_coefficients(p);
        CHECK(c.c1 == Catch::Approx(18.867924528).epsilon(1e-9));
        CHECK(c.d1 == Catch::Approx(18867.924528).epsilon(1e-9));
        CHECK(c.c2 == Catch::Approx(0.1 * c.c1).margin(1e-12));
        CHECK(c.d2 == Catch::Approx(0.1 * c.d1).margin(1e-9));
        CHECK(c.tau == Catch::Approx(1.0e3));
    }
    SECTION("zero delayed fraction") {
        const Coefficients c = derive_coefficients({1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0});
        CHECK(c.c2 == 0.0);
        CHECK(c.d2 == 0.0);
    }
    SECTION("identity scaling") {
        const Coefficients c = derive_coefficients({1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0});
        CHECK(c.c1 == 1.0);
        CHECK(c.c2 == 1.0);
        CHECK(c.d1 == 1.0);
        CHECK(c.d2 == 1.0);
    }
    SECTION("invalid physics throws") {
        CHECK_THROWS_AS(derive_coefficients({-1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0}), DomainError);
    }
    SECTION("homogeneity: scaling E and eta scales all four coefficients") {
        MusclePhysical p{2.0, 3.0, 5.0, 7.0, 0.25, 1.0, 11.0};
        MusclePhysical q = p;
        const double s = 4.0;
        q.E *= s;
        q.eta *= s;
        const Coefficients a = derive_coefficients(p);
        const Coefficients b = derive_coefficients(q);
        CHECK(b.c1 / a.c1 == s);
        CHECK(b.c2 / a.c2 == s);
        CHECK(b.d1 / a.d1 == s);
        CHECK(b.d2 / a.d2 == s);
    }
}

namespace {

// Rayleigh-quotient oracle: smallest eigenvalue of -u'' with u(0)=0, u'(L)=0
// on a fine grid via inverse power iteration on the standard stencil.
double smallest_mixed_eigenvalue(double L, int n) {
    const double dx = L / n;
    // unknowns u_1..u_n, Dirichlet u_0 = 0, Neumann ghost at x_n
    std::vector<double> u(n, 1.0), v(n);
    // Thomas solve of A u = rhs with A = tridiag(-1, 2, -1)/dx^2, Neumann row (-2, 2)/dx^2
    auto solve = [&](const std::vector<double>& rhs, std::vector<double>& x) {
        std::vector<double> diag(n, 2.0), sub(n, -1.0), sup(n, -1.0);
        sub[n - 1] = -2.0;
        std::vector<double> cp(n), dp(n);
        cp[0] = sup[0] / diag[0];
        dp[0] = rhs[0] * dx * dx / diag[0];
        for (int i = 1; i < n; ++i) {
            const double m = diag[i] - sub[i] * cp[i - 1];
            cp[i] = sup[i] / m;
            dp[i] = (rhs[i] * dx * dx - sub[i] * dp[i - 1]) / m;
        }
        x[n - 1] = dp[n - 1];
        for (int i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
    };
    double lambda = 0.0;
    for (int it = 0; it < 60; ++it) {
        solve(u, v);
        double norm = 0.0;
        for (double x : v) norm = std::max(norm, std::fabs(x));
        for (auto& x : v) x /= norm;
        lambda = 1.0 / norm;
        u = v;
    }
    return lambda;
}

} // namespace

TEST_CASE("poincare constant on an interval", "[model]") {
    SECTION("L = pi/2 gives exactly 1") {
        CHECK(poincare_constant_interval(std::numbers::pi / 2.0) == Catch::Approx(1.0).epsilon(1e-15));
    }
    SECTION("reference rod length") {
        CHECK(poincare_constant_interval(5.33e-3) == Catch::Approx(1.1513e-5).epsilon(1e-4));
    }
    SECTION("agrees with the Rayleigh-quotient oracle") {
        for (double L : {0.7, 1.0, 5.33e-3}) {
            const double lam = smallest_mixed_eigenvalue(L, 2000);
            CHECK(poincare_constant_interval(L) == Catch::Approx(1.0 / lam).epsilon(1e-5));
        }
    }
    SECTION("quadratic scaling law") {
        CHECK(poincare_constant_interval(2.0 * 0.37) ==
              Catch::Approx(4.0 * poincare_constant_interval(0.37)).epsilon(1e-15));
    }
    SECTION("identity against the eigenvalue for random lengths") {
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> dist(1e-4, 1e3);
        const double pi = std::numbers::pi;
        for (int i = 0; i < 10; ++i) {
            const double L = dist(rng);
            const double prod = poincare_constant_interval(L) * (pi * pi / (4.0 * L * L));
            CHECK(prod == Catch::Approx(1.0).epsilon(1e-14));
        }
    }
    SECTION("invalid length") {
        CHECK_THROWS_AS(poincare_constant_interval(0.0), DomainError);
        CHECK_THROWS_AS(poincare_constant_interval(-1.0), DomainError);
    }
}

TEST_CASE("history buffer fill and delayed lookup", "[model]") {
    SECTION("zero history") {
        const auto buf = make_history_buffer(1.0, 4, [](double) { return 0.0; });
        REQUIRE(buf.size() == 5);
        for (int m = 0; m <= 4; ++m) CHECK(buf.lag(m) == 0.0);
    }
    SECTION("linear sampling") {
        const auto buf = make_history_buffer(1.0, 2, [](double t) { return t; });
        REQUIRE(buf.size() == 3);
        CHECK(buf.lag(2) == Catch::Approx(-1.0));
        CHECK(buf.lag(1) == Catch::Approx(-0.5));
        CHECK(buf.lag(0) == 0.0);
    }
    SECTION("delayed value right after the fill is phi(-tau)") {
        const auto buf = make_history_buffer(2.0, 8, [](double t) { return 3.0 * t + 1.0; });
        CHECK(buf.delayed_value() == Catch::Approx(3.0 * -2.0 + 1.0));
        CHECK(buf.head_time() == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("delay alignment after pushes") {
        auto buf = make_history_buffer(1.0, 4, [](double t) { return t; });
        buf.push(7.0);
        buf.push(9.0);
        // newest is step 2; one delay back is step 2-4, i.e. t = -0.5
        CHECK(buf.delayed_value() == Catch::Approx(-0.5));
        CHECK(buf.head_time() == Catch::Approx(0.5));
    }
    SECTION("dt * n_per_delay reproduces tau") {
        const auto buf = make_history_buffer(1.0e3, 1000, [](double) { return 0.0; });
        CHECK(buf.dt() * buf.n_per_delay() == Catch::Approx(1.0e3).epsilon(1e-15));
    }
    SECTION("non-finite history rejected") {
        CHECK_THROWS_AS(make_history_buffer(1.0, 4,
                                            [](double t) {
                                                return t < -0.5 ? std::nan("") : 0.0;
                                            }),
                        NumericError);
    }
    SECTION("too few steps rejected") {
        CHECK_THROWS_AS(make_history_buffer(1.0, 1, [](double) { return 0.0; }), DomainError);
    }
}
