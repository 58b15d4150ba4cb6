#pragma once

#include <cmath>
#include <limits>

#include "cpwall/constants.hpp"
#include "cpwall/errors.hpp"

namespace cpwall {

/// Two-level atom parameters.
///
/// `alpha0` is the static polarizability in Gaussian units (volume, m^3);
/// the SI quantity alpha_SI = 4*pi*eps0*alpha0.  All potentials returned in
/// joules use this convention, so V = hbar*c*alpha0*k0^4 * v(zeta, tau) has
/// the dimension of energy without extra 4*pi*eps0 factors.
struct AtomSpec {
    double omega0;  ///< transition angular frequency [rad/s]
    double alpha0;  ///< static polarizability [m^3]

    AtomSpec(double omega0_, double alpha0_) : omega0(omega0_), alpha0(alpha0_) {
        if (!(std::isfinite(omega0) && omega0 > 0.0))
            throw DomainError("AtomSpec: omega0 must be finite and > 0");
        if (!(std::isfinite(alpha0) && alpha0 > 0.0))
            throw DomainError("AtomSpec: alpha0 must be finite and > 0");
    }

    /// Transition wavenumber k0 = omega0/c [1/m].
    double k0() const { return omega0 / constants::c; }
};

/// Environment temperature.  T = 0 is allowed and means a pure vacuum state.
struct ThermalSpec {
    double temperature;  ///< [K]

    explicit ThermalSpec(double temperature_) : temperature(temperature_) {
        if (!(std::isfinite(temperature) && temperature >= 0.0))
            throw DomainError("ThermalSpec: temperature must be finite and >= 0");
    }

    /// Thermal wavelength lambda_T = hbar*c/(k_B*T) [m]; +inf at T = 0.
    double lambda_T() const {
        if (temperature == 0.0) return std::numeric_limits<double>::infinity();
        return constants::hbar * constants::c / (constants::k_B * temperature);
    }
};

/// Dimensionless coordinates of an (atom, distance, temperature) setup.
///
/// zeta  = k0*z          distance in units of the transition wavelength
/// tau   = k0*lambda_T   inverse temperature in the same units (+inf at T = 0)
/// theta = 2/tau         temperature parameter; theta*tau == 2 exactly
struct ReducedPoint {
    double zeta;
    double tau;
    double theta;

    static ReducedPoint from_reduced(double zeta, double tau) {
        if (!(std::isfinite(zeta) && zeta > 0.0))
            throw DomainError("ReducedPoint: zeta must be finite and > 0");
        const bool cold = std::isinf(tau) && tau > 0.0;
        if (!(cold || (std::isfinite(tau) && tau > 0.0)))
            throw DomainError("ReducedPoint: tau must be > 0 (possibly +inf)");
        return ReducedPoint{zeta, tau, cold ? 0.0 : 2.0 / tau};
    }
};

/// Map a physical setup to reduced coordinates.
inline ReducedPoint reduce(const AtomSpec& atom, double z, const ThermalSpec& thermal) {
    if (!(std::isfinite(z) && z > 0.0))
        throw DomainError("reduce: wall distance z must be finite and > 0");
    double tau = std::numeric_limits<double>::infinity();
    if (thermal.temperature > 0.0)
        tau = constants::hbar * atom.omega0 / (constants::k_B * thermal.temperature);
    return ReducedPoint::from_reduced(atom.k0() * z, tau);
}

/// Convert a reduced potential value v to joules: V = hbar*c*alpha0*k0^4 * v.
inline double potential_si(const AtomSpec& atom, double v_reduced) {
    const double k0 = atom.k0();
    const double k02 = k0 * k0;
    return constants::hbar * constants::c * atom.alpha0 * (k02 * k02) * v_reduced;
}

}  // namespace cpwall
