#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "viskv/errors.hpp"

namespace viskv {

/// PDE coefficients of the delayed Kelvin-Voigt wave equation
///
///   y_tt - c1*y_xx - c2*y_xx(t-tau) - d1*y_txx - d2*y_txx(t-tau) = 0.
///
/// c1/d1 act instantaneously, c2/d2 on the state one delay interval back.
struct Coefficients {
    double c1{0.0};  ///< instantaneous stiffness
    double c2{0.0};  ///< delayed stiffness
    double d1{0.0};  ///< instantaneous viscosity
    double d2{0.0};  ///< delayed viscosity
    double tau{0.0}; ///< delay time (s)
};

/// Physical description of a uniform viscoelastic rod loaded at its free end.
struct MusclePhysical {
    double L{0.0};       ///< rod length (m)
    double rho{0.0};     ///< mass density (kg/m^3)
    double E{0.0};       ///< Young's modulus (Pa)
    double eta{0.0};     ///< viscosity (Pa*s)
    double epsilon{0.0}; ///< dimensionless delayed fraction, >= 0
    double f{0.0};       ///< outward surface traction at x = L (Pa)
    double tau{0.0};     ///< delay time (s); conventionally the retardation time eta/E

    /// Retardation time eta/E, the default choice for tau.
    double retardation_time() const { return eta / E; }
};

/// Verdict object for parameter validation. Callers decide whether to abort.
struct ValidationResult {
    bool ok{true};
    std::vector<std::string> violations;

    void require(bool condition, const char* constraint) {
        if (!condition) {
            ok = false;
            violations.emplace_back(constraint);
        }
    }

    std::string joined() const {
        std::string out;
        for (const auto& v : violations) {
            if (!out.empty()) out += ", ";
            out += v;
        }
        return out;
    }
};

/// Coefficient set paired with the Poincare constant of the domain, the
/// inputs every stability inequality depends on.
struct StabilityInput {
    Coefficients coeffs;
    double cp{0.0}; ///< Poincare constant: ||u||^2 <= cp ||u'||^2 for u(0) = 0
};

inline ValidationResult validate_coefficients(const Coefficients& c,
                                              bool allow_zero_delay_terms = false) {
    ValidationResult r;
    const bool finite = std::isfinite(c.c1) && std::isfinite(c.c2) && std::isfinite(c.d1) &&
                        std::isfinite(c.d2) && std::isfinite(c.tau);
    r.require(finite, "all coefficients finite");
    r.require(c.c1 > 0.0, "c1 > 0");
    r.require(c.d1 > 0.0, "d1 > 0");
    if (!allow_zero_delay_terms) {
        r.require(c.c2 != 0.0, "c2 != 0");
        r.require(c.d2 != 0.0, "d2 != 0");
    }
    r.require(c.tau > 0.0, "tau > 0");
    return r;
}

inline ValidationResult validate_physical(const MusclePhysical& p) {
    ValidationResult r;
    const bool finite = std::isfinite(p.L) && std::isfinite(p.rho) && std::isfinite(p.E) &&
                        std::isfinite(p.eta) && std::isfinite(p.epsilon) && std::isfinite(p.f) &&
                        std::isfinite(p.tau);
    r.require(finite, "all parameters finite");
    r.require(p.L > 0.0, "L > 0");
    r.require(p.rho > 0.0, "rho > 0");
    r.require(p.E > 0.0, "E > 0");
    r.require(p.eta > 0.0, "eta > 0");
    r.require(p.epsilon >= 0.0, "epsilon >= 0");
    r.require(p.tau > 0.0, "tau > 0");
    return r;
}

/// Maps rod physics to PDE coefficients:
///   c1 = E/rho, d1 = eta/rho, c2 = epsilon*E/rho, d2 = epsilon*eta/rho.
inline Coefficients derive_coefficients(const MusclePhysical& p) {
    const auto v = validate_physical(p);
    if (!v.ok) throw DomainError("invalid physical parameters: " + v.joined());
    Coefficients c;
    c.c1 = p.E / p.rho;
    c.c2 = p.epsilon * p.E / p.rho;
    c.d1 = p.eta / p.rho;
    c.d2 = p.epsilon * p.eta / p.rho;
    c.tau = p.tau;
    return c;
}

/// Sharp Poincare constant on (0, L) for functions vanishing at 0 with a free
/// endpoint at L: the first eigenvalue of -u'' with these conditions is
/// pi^2/(4L^2), so ||u||^2 <= (4L^2/pi^2) ||u'||^2 and the bound is attained.
inline double poincare_constant_interval(double L) {
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("poincare constant requires L > 0");
    const double pi = std::numbers::pi;
    return 4.0 * L * L / (pi * pi);
}

} // namespace viskv
