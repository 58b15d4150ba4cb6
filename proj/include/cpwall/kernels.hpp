#pragma once

#include <cmath>
#include <string>

#include "cpwall/errors.hpp"

namespace cpwall {

enum class KernelBranch { series, direct };

struct KernelEval {
    double value;
    KernelBranch branch;
};

/// Branch switch for g_kernel.  Below the switch the direct trig form loses
/// ~eps*2/x^2 to cancellation between its three terms; above it the truncated
/// Maclaurin series is the larger error.  At 0.1 both stay below 1e-13 and the
/// branches agree to better than 1e-12 across [x_switch/2, 2*x_switch].
inline constexpr double g_kernel_switch = 0.1;

/// Wall response kernel g(x) = sin(x)/x + 2*cos(x)/x^2 - 2*sin(x)/x^3
/// with the branch tag reporting which evaluation path was taken.
///
/// g(0) = 1/3; g has a removable singularity at x = 0 and decays like
/// sin(x)/x for large x.
inline KernelEval g_kernel_eval(double x) {
    if (!(x >= 0.0))
        throw DomainError("g_kernel: x must be >= 0 and not NaN");
    if (x < g_kernel_switch) {
        const double x2 = x * x;
        const double value = 1.0 / 3.0
            + x2 * (-1.0 / 10.0
            + x2 * (1.0 / 168.0
            + x2 * (-1.0 / 6480.0
            + x2 * (1.0 / 443520.0))));
        return {value, KernelBranch::series};
    }
    const double s = std::sin(x);
    const double c = std::cos(x);
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return {s * inv + 2.0 * c * inv2 - 2.0 * s * inv * inv2, KernelBranch::direct};
}

inline double g_kernel(double x) { return g_kernel_eval(x).value; }

/// Smallest |kappa - 1| at which the resonance denominators are evaluated
/// directly; anything closer is treated as sitting on the pole.
inline constexpr double pole_guard = 1e-12;

namespace detail {

inline void check_kappa(double kappa, const char* who) {
    if (!(kappa >= 0.0))
        throw DomainError(std::string(who) + ": kappa must be >= 0 and not NaN");
    if (std::fabs(kappa - 1.0) <= pole_guard)
        throw PoleError(std::string(who) + ": kappa too close to the pole at 1");
}

}  // namespace detail

/// Reduced absorptive-plus-dispersive polarizability factor
/// alpha_plus(kappa) = 1/(1 - kappa^2), with a simple pole at kappa = 1.
inline double alpha_plus_hat(double kappa) {
    detail::check_kappa(kappa, "alpha_plus_hat");
    return 1.0 / ((1.0 - kappa) * (1.0 + kappa));
}

/// Reduced reservoir-reaction factor alpha_minus(kappa) = kappa/(kappa^2 - 1).
inline double alpha_minus_hat(double kappa) {
    detail::check_kappa(kappa, "alpha_minus_hat");
    return kappa / ((kappa - 1.0) * (kappa + 1.0));
}

/// Photon occupation factor 2*n(kappa) = 2/(exp(kappa*tau) - 1).
///
/// tau = +inf (zero temperature) gives 0.  Small arguments use the Laurent
/// series 2/y - 1 + y/6 to avoid 0/0 noise; arguments beyond the exp()
/// overflow range return exactly 0 (the true value is below 1e-307).
inline double bose_factor(double kappa, double tau) {
    if (!(kappa > 0.0 && std::isfinite(kappa)))
        throw DomainError("bose_factor: kappa must be finite and > 0");
    if (std::isinf(tau) && tau > 0.0) return 0.0;
    if (!(tau > 0.0 && std::isfinite(tau)))
        throw DomainError("bose_factor: tau must be > 0 (possibly +inf)");
    const double y = kappa * tau;
    if (y < 1e-4) return 2.0 / y - 1.0 + y / 6.0;
    if (y > 708.0) return 0.0;
    return 2.0 / std::expm1(y);
}

}  // namespace cpwall
