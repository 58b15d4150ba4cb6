#pragma once

#include <cmath>
#include <string>

#include "cpwall/constants.hpp"
#include "cpwall/errors.hpp"

namespace cpwall {

/// Near-zone (van der Waals) ground-state law v = -1/(8 zeta^3).
inline double v_london(double zeta) {
    if (!(std::isfinite(zeta) && zeta > 0.0))
        throw DomainError("v_london: zeta must be finite and > 0");
    return -1.0 / (8.0 * zeta * zeta * zeta);
}

/// Far-zone retarded (Casimir-Polder) law v = -3/(8 pi zeta^4).
inline double v_cp(double zeta) {
    if (!(std::isfinite(zeta) && zeta > 0.0))
        throw DomainError("v_cp: zeta must be finite and > 0");
    return -3.0 / (8.0 * constants::pi * zeta * zeta * zeta * zeta);
}

/// Saturation function f(theta) = theta * tanh(1/theta) with
/// theta = 2 k_B T / (hbar omega0).  Grows like theta at low temperature and
/// saturates at 1; the switch to the large-theta series avoids evaluating
/// tanh of a denormal-small argument.
inline double f_theta(double theta) {
    if (!(theta >= 0.0))
        throw DomainError("f_theta: theta must be >= 0 and not NaN");
    if (theta == 0.0) return 0.0;
    if (theta > 1e3) {
        const double it2 = 1.0 / (theta * theta);
        return 1.0 - it2 / 3.0 + 2.0 / 15.0 * it2 * it2;
    }
    return theta * std::tanh(1.0 / theta);
}

/// Far-zone thermal law at arbitrary temperature: v = -f(theta)/(8 zeta^3).
inline double v_high_t(double zeta, double theta) {
    if (!(std::isfinite(zeta) && zeta > 0.0))
        throw DomainError("v_high_t: zeta must be finite and > 0");
    return -f_theta(theta) / (8.0 * zeta * zeta * zeta);
}

/// Classical Lifshitz far-zone tail, linear in temperature:
/// v = -theta/(8 zeta^3).
inline double v_lifshitz(double zeta, double theta) {
    if (!(std::isfinite(zeta) && zeta > 0.0))
        throw DomainError("v_lifshitz: zeta must be finite and > 0");
    if (!(theta >= 0.0))
        throw DomainError("v_lifshitz: theta must be >= 0 and not NaN");
    return -theta / (8.0 * zeta * zeta * zeta);
}

/// Percentage by which the Lifshitz tail overshoots the exact far-zone
/// potential: 100*(coth(1/theta) - 1) = 200/(exp(2/theta) - 1).
inline double delta_v_percent(double theta) {
    if (!(theta >= 0.0))
        throw DomainError("delta_v_percent: theta must be >= 0 and not NaN");
    if (theta == 0.0) return 0.0;
    return 200.0 / std::expm1(2.0 / theta);
}

enum class Regime { london, casimir_polder, lifshitz_high_t, crossover };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::london: return "london";
        case Regime::casimir_polder: return "casimir_polder";
        case Regime::lifshitz_high_t: return "lifshitz_high_t";
        case Regime::crossover: return "crossover";
    }
    return "crossover";
}

struct RegimeReport {
    Regime regime;
    double asymptotic_value;  ///< matching closed-form law; 0 in the crossover
    std::string conditions;   ///< which inequalities placed the point here
};

/// Place a reduced point in one of the asymptotic regimes.
///
/// london:          zeta <= 0.1 and tau >= 10*max(1, zeta)
/// casimir_polder:  zeta >= 10  and tau >= 10*zeta
/// lifshitz_high_t: zeta >= tau and (tau >= 10 or tau <= 0.1)
/// crossover:       everything else (no closed form applies)
inline RegimeReport classify_regime(double zeta, double tau) {
    if (!(std::isfinite(zeta) && zeta > 0.0))
        throw DomainError("classify_regime: zeta must be finite and > 0");
    const bool cold = std::isinf(tau) && tau > 0.0;
    if (!(cold || (std::isfinite(tau) && tau > 0.0)))
        throw DomainError("classify_regime: tau must be > 0 (possibly +inf)");

    if (zeta <= 0.1 && tau >= 10.0 * std::max(1.0, zeta))
        return {Regime::london, v_london(zeta),
                "zeta <= 0.1 and tau >= 10"};
    if (zeta >= 10.0 && tau >= 10.0 * zeta)
        return {Regime::casimir_polder, v_cp(zeta),
                "zeta >= 10 and tau >= 10*zeta"};
    if (!cold && zeta >= tau && (tau >= 10.0 || tau <= 0.1))
        return {Regime::lifshitz_high_t, v_high_t(zeta, 2.0 / tau),
                "zeta >= tau and (tau >= 10 or tau <= 0.1)"};
    return {Regime::crossover, 0.0,
            "no asymptotic law applies within a factor-of-ten margin"};
}

/// Dielectric description of a dilute slab.
struct SlabSpec {
    double epsilon;

    static SlabSpec from_epsilon(double epsilon) {
        if (!(std::isfinite(epsilon) && epsilon >= 1.0))
            throw DomainError("SlabSpec: epsilon must be finite and >= 1");
        return {epsilon};
    }
    static SlabSpec from_density(double alpha0, double number_density) {
        return {clausius_mossotti(alpha0, number_density)};
    }

    /// Clausius-Mossotti closure epsilon = (1 + 2q)/(1 - q), q = 4 pi a0 N/3.
    static double clausius_mossotti(double alpha0, double number_density) {
        if (!(std::isfinite(alpha0) && alpha0 > 0.0))
            throw DomainError("clausius_mossotti: alpha0 must be finite and > 0");
        if (!(std::isfinite(number_density) && number_density > 0.0))
            throw DomainError("clausius_mossotti: number density must be finite and > 0");
        const double q = 4.0 * constants::pi * alpha0 * number_density / 3.0;
        if (q >= 1.0)
            throw DomainError(
                "clausius_mossotti: 4*pi*alpha0*N/3 >= 1, outside the dilute regime");
        return (1.0 + 2.0 * q) / (1.0 - q);
    }
};

/// Far-zone force per unit area between two half-spaces of the dilute
/// dielectric: F/A = -(3 hbar omega0 / (32 pi)) * f(theta) * (eps-1)/(eps+2)
/// / a^3, with theta = 2 k_B T/(hbar omega0).  [N/m^2]
inline double slab_force_per_area(double gap, double temperature,
                                  const SlabSpec& slab, double omega0) {
    if (!(std::isfinite(gap) && gap > 0.0))
        throw DomainError("slab_force_per_area: gap must be finite and > 0");
    if (!(std::isfinite(temperature) && temperature >= 0.0))
        throw DomainError("slab_force_per_area: temperature must be >= 0");
    if (!(std::isfinite(omega0) && omega0 > 0.0))
        throw DomainError("slab_force_per_area: omega0 must be finite and > 0");
    const double theta =
        2.0 * constants::k_B * temperature / (constants::hbar * omega0);
    const double shape = (slab.epsilon - 1.0) / (slab.epsilon + 2.0);
    return -3.0 * constants::hbar * omega0 * f_theta(theta) * shape /
           (32.0 * constants::pi * gap * gap * gap);
}

/// Classical Lifshitz far-zone slab force, linear in T:
/// F/A = -3 k_B T (eps-1) / (16 pi (eps+2) a^3).  [N/m^2]
inline double slab_force_lifshitz(double gap, double temperature,
                                  const SlabSpec& slab) {
    if (!(std::isfinite(gap) && gap > 0.0))
        throw DomainError("slab_force_lifshitz: gap must be finite and > 0");
    if (!(std::isfinite(temperature) && temperature >= 0.0))
        throw DomainError("slab_force_lifshitz: temperature must be >= 0");
    const double shape = (slab.epsilon - 1.0) / (slab.epsilon + 2.0);
    return -3.0 * constants::k_B * temperature * shape /
           (16.0 * constants::pi * gap * gap * gap);
}

}  // namespace cpwall
