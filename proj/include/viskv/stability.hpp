#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "viskv/errors.hpp"
#include "viskv/grid.hpp"
#include "viskv/model.hpp"

namespace viskv {

/// One evaluated inequality: lhs OP rhs with the direction baked into
/// `satisfied`. Inequalities are evaluated exactly as written, with strict
/// comparisons kept strict; boundary cases classify as failed.
struct StabilityCondition {
    std::string id;
    double lhs{0.0};
    double rhs{0.0};
    bool satisfied{false};
};

struct StabilityVerdict {
    bool assumption_ok{false};
    bool theorem_ok{false};
    std::vector<StabilityCondition> conditions;

    const StabilityCondition* find(const std::string& id) const {
        for (const auto& c : conditions)
            if (c.id == id) return &c;
        return nullptr;
    }
};

/// Sufficient conditions under which the Lyapunov construction with the fixed
/// epsilon recipe certifies exponential decay:
///   (i)  c1 > 6 c2 > 0,
///   (ii) d1^2 >= max{ 9 c1^2 d2^2 / (c1^2 - 9 c2^2),
///                     18 c1 c2^2 cp / (c1^2 - 36 c2^2) },
///   (iii) d2 > 0.
inline StabilityVerdict check_assumption(const StabilityInput& s) {
    const double c1 = s.coeffs.c1, c2 = s.coeffs.c2, d1 = s.coeffs.d1, d2 = s.coeffs.d2;
    StabilityVerdict v;
    v.conditions.push_back({"stiffness_dominance", c1, 6.0 * c2, c1 > 6.0 * c2});
    v.conditions.push_back({"delayed_stiffness_positive", c2, 0.0, c2 > 0.0});
    {
        const double den1 = c1 * c1 - 9.0 * c2 * c2;
        const double den2 = c1 * c1 - 36.0 * c2 * c2;
        double bound = std::numeric_limits<double>::infinity();
        if (den1 > 0.0 && den2 > 0.0)
            bound = std::max(9.0 * c1 * c1 * d2 * d2 / den1,
                             18.0 * c1 * c2 * c2 * s.cp / den2);
        v.conditions.push_back({"viscosity_floor", d1 * d1, bound, d1 * d1 >= bound});
    }
    v.conditions.push_back({"delayed_viscosity_positive", d2, 0.0, d2 > 0.0});
    v.assumption_ok = true;
    for (const auto& c : v.conditions) v.assumption_ok = v.assumption_ok && c.satisfied;
    return v;
}

/// Two-sided window for the weight ratio N/M at a given Young parameter eps:
///   lo = (-2 cp - d1/eps - d2/eps) / (c2 eps - 2 d1 + d2 eps + d2/eps),
///   hi = (2 c1 - c2 eps - d1 eps - d2 eps - c2/eps) * eps / c2.
/// Infeasible when the lo-denominator is >= 0 (eps outside its admissible
/// interval) or the window is empty.
struct RatioInterval {
    bool feasible{false};
    double lo{0.0};
    double hi{0.0};
};

inline RatioInterval admissible_ratio_interval(const StabilityInput& s, double eps) {
    if (!(eps > 0.0)) throw DomainError("admissible_ratio_interval requires eps > 0");
    const double c1 = s.coeffs.c1, c2 = s.coeffs.c2, d1 = s.coeffs.d1, d2 = s.coeffs.d2;
    if (!(c2 > 0.0)) return {};
    const double lo_den = c2 * eps - 2.0 * d1 + d2 * eps + d2 / eps;
    if (lo_den >= 0.0) return {};
    RatioInterval r;
    r.lo = (-2.0 * s.cp - d1 / eps - d2 / eps) / lo_den;
    r.hi = (2.0 * c1 - c2 * eps - d1 * eps - d2 * eps - c2 / eps) * eps / c2;
    r.feasible = r.lo < r.hi;
    return r;
}

/// Closed-form region membership with eps fixed at the center of its
/// admissible interval, eps = d1/(c2 + d2). The three condition groups are
/// the two discriminants, a nonempty ratio window, and the weight-equivalence
/// margin against sqrt(cp/c1).
inline StabilityVerdict check_theorem_region(const StabilityInput& s) {
    const double c1 = s.coeffs.c1, c2 = s.coeffs.c2, d1 = s.coeffs.d1, d2 = s.coeffs.d2;
    const double cp = s.cp;
    StabilityVerdict v;

    const double q = d2 * (c2 + d2);
    const double p = c2 * (c2 + d1 + d2);
    v.conditions.push_back({"damping_discriminant", d1 * d1, q, d1 * d1 >= q});
    v.conditions.push_back({"stiffness_discriminant", c1 * c1, p, c1 * c1 >= p});

    {
        const double den = d1 * d1 - q;
        const double cw = c2 * (c2 + d2);
        double lhs = std::numeric_limits<double>::infinity();
        double rhs = -std::numeric_limits<double>::infinity();
        bool ok = false;
        if (den > 0.0 && cw > 0.0) {
            lhs = (2.0 * d1 * cp + (d1 + d2) * (c2 + d2)) / den;
            rhs = 2.0 * c1 * d1 / cw - 1.0 - d1 * d1 * (c2 + d1 + d2) / (cw * (c2 + d2));
            ok = lhs < rhs;
        }
        v.conditions.push_back({"ratio_window", lhs, rhs, ok});
    }
    {
        const double cw = c2 * (c2 + d2);
        double lhs = std::numeric_limits<double>::infinity();
        double rhs = -std::numeric_limits<double>::infinity();
        bool ok = false;
        if (cw > 0.0 && d1 > 0.0 && c1 > 0.0 && cp >= 0.0) {
            lhs = std::sqrt(cp / c1);
            rhs = d1 / cw *
                  (2.0 * c1 - (c2 * d1 + d1 * d1 + d1 * d2) / (c2 + d2) - cw / d1);
            ok = lhs < rhs;
        }
        v.conditions.push_back({"equivalence_margin", lhs, rhs, ok});
    }

    v.theorem_ok = true;
    for (const auto& c : v.conditions) v.theorem_ok = v.theorem_ok && c.satisfied;
    return v;
}

/// Both verdicts merged into one condition table (CLI convenience).
inline StabilityVerdict check_stability(const StabilityInput& s) {
    StabilityVerdict a = check_assumption(s);
    const StabilityVerdict t = check_theorem_region(s);
    a.theorem_ok = t.theorem_ok;
    a.conditions.insert(a.conditions.end(), t.conditions.begin(), t.conditions.end());
    return a;
}

/// Dense sweep of (c2, d1, d2) at fixed c1 and cp; one verdict pair per point.
struct RegionSample {
    std::vector<double> c2_axis, d1_axis, d2_axis;
    std::vector<unsigned char> assumption_ok;
    std::vector<unsigned char> theorem_ok;

    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return (i * d1_axis.size() + j) * d2_axis.size() + k;
    }
};

inline RegionSample sample_region(double c1, double cp, std::array<double, 2> c2_range,
                                  std::array<double, 2> d1_range, std::array<double, 2> d2_range,
                                  int resolution) {
    if (resolution < 2) throw ConfigError("sample_region requires resolution >= 2");
    for (const auto& r : {c2_range, d1_range, d2_range})
        if (!(r[0] < r[1])) throw ConfigError("sample_region requires nonempty axis ranges");
    RegionSample out;
    out.c2_axis = linspace(c2_range[0], c2_range[1], resolution);
    out.d1_axis = linspace(d1_range[0], d1_range[1], resolution);
    out.d2_axis = linspace(d2_range[0], d2_range[1], resolution);
    const std::size_t n = out.c2_axis.size() * out.d1_axis.size() * out.d2_axis.size();
    out.assumption_ok.resize(n);
    out.theorem_ok.resize(n);
    for (std::size_t i = 0; i < out.c2_axis.size(); ++i)
        for (std::size_t j = 0; j < out.d1_axis.size(); ++j)
            for (std::size_t k = 0; k < out.d2_axis.size(); ++k) {
                const StabilityInput s{{c1, out.c2_axis[i], out.d1_axis[j], out.d2_axis[k], 1.0},
                                       cp};
                const std::size_t idx = out.index(i, j, k);
                out.assumption_ok[idx] = check_assumption(s).assumption_ok ? 1 : 0;
                out.theorem_ok[idx] = check_theorem_region(s).theorem_ok ? 1 : 0;
            }
    return out;
}

} // namespace viskv
