#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cpwall/constants.hpp"
#include "cpwall/errors.hpp"
#include "cpwall/kernels.hpp"
#include "cpwall/quadrature.hpp"

namespace cpwall {

/// Options steering the reduced-potential quadratures.
///
/// `tol` is interpreted relative to the natural scale of the ground-state
/// potential at the given zeta (min of the near-zone and far-zone laws), so
/// the same value gives comparable end-to-end accuracy across twelve decades
/// of potential magnitude.  `window_half_width` is the half width of the
/// principal-value window around the resonance at kappa = 1.
struct PotentialOptions {
    double tol = 1e-8;
    double window_half_width = 0.5;
};

namespace detail_pot {

inline void check_zeta(double zeta) {
    if (!(std::isfinite(zeta) && zeta >= 1e-6 && zeta <= 1e4))
        throw DomainError("potential: zeta must lie in [1e-6, 1e4]");
}

inline void check_tau(double tau) {
    if (std::isinf(tau) && tau > 0.0) return;
    if (!(std::isfinite(tau) && tau > 0.0))
        throw DomainError("potential: tau must be > 0 (possibly +inf)");
}

inline void check_options(const PotentialOptions& opt) {
    if (!(std::isfinite(opt.tol) && opt.tol > 0.0 && opt.tol <= 0.1))
        throw DomainError("potential: tol must lie in (0, 0.1]");
    if (!(std::isfinite(opt.window_half_width) && opt.window_half_width > 0.0 &&
          opt.window_half_width <= 0.9))
        throw DomainError("potential: window_half_width must lie in (0, 0.9]");
}

/// |v_g_vacuum| tracks min(near-zone law, far-zone law) within a factor ~2
/// for all zeta; converts the relative tolerance into absolute piece budgets.
inline double ground_scale(double zeta) {
    const double z3 = zeta * zeta * zeta;
    return std::min(1.0 / (8.0 * z3),
                    3.0 / (8.0 * constants::pi * z3 * zeta));
}

/// Half-oscillation period of g(2*kappa*zeta) in kappa.
inline double lobe_period(double zeta) { return constants::pi / (2.0 * zeta); }

/// First lobe boundary n*period at or beyond kappa_min, so that the tail sum
/// starts on a zero-aligned boundary and every lobe is a clean half cycle.
inline double tail_start(double zeta, double kappa_min) {
    const double period = lobe_period(zeta);
    return std::ceil(kappa_min / period) * period;
}

struct PieceAccumulator {
    quad::detail::Accumulator value;
    double err = 0.0;
    long panels = 0;
    int accel = 0;
    std::vector<double> etas;

    void add(const quad::QuadratureResult& r) {
        value.add(r.value);
        err += r.abs_error_estimate;
        panels += r.panels_used;
        accel = std::max(accel, r.acceleration_terms);
        etas.insert(etas.end(), r.regularization_etas.begin(),
                    r.regularization_etas.end());
    }
    quad::QuadratureResult result() {
        return {value.get(), err, panels, accel, etas};
    }
};

}  // namespace detail_pot

/// Reservoir-reaction part of the reduced potential:
/// (1/pi) * PV integral over kappa in [0, inf) of
/// kappa^3 * alpha_minus(kappa) * g(2*kappa*zeta).
inline quad::QuadratureResult v_rr(double zeta, const PotentialOptions& opt = {}) {
    detail_pot::check_zeta(zeta);
    detail_pot::check_options(opt);
    const double d = opt.window_half_width;
    const double goal = opt.tol * detail_pot::ground_scale(zeta);
    const double kappa_tail = detail_pot::tail_start(zeta, 1.0 + d + 0.25);

    auto f = [zeta](double k) {
        return k * k * k * alpha_minus_hat(k) * g_kernel(2.0 * k * zeta) /
               constants::pi;
    };
    auto h = [zeta](double k) {
        return k * k * k * k * g_kernel(2.0 * k * zeta) /
               (constants::pi * (k + 1.0));
    };

    detail_pot::PieceAccumulator acc;
    acc.add(quad::integrate_adaptive(f, 0.0, 1.0 - d, 0.0, 0.20 * goal));
    acc.add(quad::pv_integrate(h, {1.0, d}, 0.0, 0.20 * goal));
    acc.add(quad::integrate_adaptive(f, 1.0 + d, kappa_tail, 0.0, 0.15 * goal));
    acc.add(quad::oscillatory_tail(f, detail_pot::lobe_period(zeta), kappa_tail,
                                   0.0, 0.35 * goal));
    return acc.result();
}

/// Vacuum fluctuation part of the reduced potential:
/// (1/pi) * PV integral of kappa^3 * alpha_plus(kappa) * g(2*kappa*zeta).
inline quad::QuadratureResult v_fr_vacuum(double zeta,
                                          const PotentialOptions& opt = {}) {
    detail_pot::check_zeta(zeta);
    detail_pot::check_options(opt);
    const double d = opt.window_half_width;
    const double goal = opt.tol * detail_pot::ground_scale(zeta);
    const double kappa_tail = detail_pot::tail_start(zeta, 1.0 + d + 0.25);

    auto f = [zeta](double k) {
        return k * k * k * alpha_plus_hat(k) * g_kernel(2.0 * k * zeta) /
               constants::pi;
    };
    auto h = [zeta](double k) {
        return -k * k * k * g_kernel(2.0 * k * zeta) /
               (constants::pi * (k + 1.0));
    };

    detail_pot::PieceAccumulator acc;
    acc.add(quad::integrate_adaptive(f, 0.0, 1.0 - d, 0.0, 0.20 * goal));
    acc.add(quad::pv_integrate(h, {1.0, d}, 0.0, 0.20 * goal));
    acc.add(quad::integrate_adaptive(f, 1.0 + d, kappa_tail, 0.0, 0.15 * goal));
    acc.add(quad::oscillatory_tail(f, detail_pot::lobe_period(zeta), kappa_tail,
                                   0.0, 0.35 * goal));
    return acc.result();
}

/// Ground-state vacuum potential via the pole-free combination
/// (1/pi) * integral of kappa^3 * g(2*kappa*zeta) / (1 + kappa).
/// Equals v_fr_vacuum + v_rr analytically (the poles cancel); computing it
/// without any principal value makes it an independent cross-check route.
inline quad::QuadratureResult v_g_vacuum(double zeta,
                                         const PotentialOptions& opt = {}) {
    detail_pot::check_zeta(zeta);
    detail_pot::check_options(opt);
    const double goal = opt.tol * detail_pot::ground_scale(zeta);
    const double kappa_tail =
        detail_pot::tail_start(zeta, 1.0 + opt.window_half_width + 0.25);

    auto f = [zeta](double k) {
        return k * k * k * g_kernel(2.0 * k * zeta) /
               (constants::pi * (1.0 + k));
    };

    detail_pot::PieceAccumulator acc;
    acc.add(quad::integrate_adaptive(f, 0.0, kappa_tail, 0.0, 0.55 * goal));
    acc.add(quad::oscillatory_tail(f, detail_pot::lobe_period(zeta), kappa_tail,
                                   0.0, 0.45 * goal));
    return acc.result();
}

/// Thermal fluctuation part:
/// (1/pi) * PV integral of kappa^3 * alpha_plus(kappa) * g(2*kappa*zeta) *
/// 2/(exp(kappa*tau) - 1).  Zero at tau = +inf.
inline quad::QuadratureResult v_fr_thermal(double zeta, double tau,
                                           const PotentialOptions& opt = {}) {
    detail_pot::check_zeta(zeta);
    detail_pot::check_tau(tau);
    detail_pot::check_options(opt);
    if (std::isinf(tau)) return quad::QuadratureResult{0.0, 0.0, 0, 0, {}};

    const double d = opt.window_half_width;
    const double goal = opt.tol * detail_pot::ground_scale(zeta);
    const double kappa_tail = detail_pot::tail_start(zeta, 1.0 + d + 0.25);

    auto f = [zeta, tau](double k) {
        return k * k * k * alpha_plus_hat(k) * g_kernel(2.0 * k * zeta) *
               bose_factor(k, tau) / constants::pi;
    };
    auto h = [zeta, tau](double k) {
        return -k * k * k * g_kernel(2.0 * k * zeta) * bose_factor(k, tau) /
               (constants::pi * (k + 1.0));
    };

    // The occupation factor localizes near kappa ~ 1/tau at low temperature;
    // seeding segment boundaries there keeps the first panels from missing a
    // support much narrower than [0, 1 - d].
    std::vector<double> breaks{0.0};
    for (double b : {1.0 / tau, 10.0 / tau, 100.0 / tau})
        if (b < 1.0 - d) breaks.push_back(b);
    breaks.push_back(1.0 - d);

    detail_pot::PieceAccumulator acc;
    const double head_share = 0.45 / static_cast<double>(breaks.size() - 1);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        acc.add(quad::integrate_adaptive(f, breaks[i], breaks[i + 1], 0.0,
                                         head_share * goal));
    acc.add(quad::pv_integrate(h, {1.0, d}, 0.0, 0.20 * goal));
    acc.add(quad::integrate_adaptive(f, 1.0 + d, kappa_tail, 0.0, 0.10 * goal));
    acc.add(quad::oscillatory_tail(f, detail_pot::lobe_period(zeta), kappa_tail,
                                   0.0, 0.25 * goal));
    return acc.result();
}

/// Thermal level populations of the two-level atom.
struct PopulationWeights {
    double p_excited;    ///< excited-state occupation 1/(exp(tau) + 1)
    double tanh_weight;  ///< p_ground - p_excited = tanh(tau/2)
};

inline PopulationWeights weights(double tau) {
    detail_pot::check_tau(tau);
    if (std::isinf(tau)) return {0.0, 1.0};
    const double e = std::exp(-tau);
    return {e / (1.0 + e), std::tanh(0.5 * tau)};
}

/// Thermal-equilibrium potential and its pieces, all in reduced units
/// v = V / (hbar * c * alpha0 * k0^4).
struct ReducedPotential {
    double total;       ///< population-weighted equilibrium potential
    double fr_vacuum;   ///< vacuum fluctuation piece
    double fr_thermal;  ///< thermal fluctuation piece
    double rr;          ///< reservoir-reaction piece (population independent)
    double abs_error_estimate;
    long panels_used;
};

/// Population-weighted potential
/// v = tanh(tau/2) * (v_fr_vacuum + v_fr_thermal) + v_rr,
/// equal to p_g*v_ground + p_e*v_excited.
inline ReducedPotential v_total(double zeta, double tau,
                                const PotentialOptions& opt = {}) {
    const PopulationWeights w = weights(tau);
    const quad::QuadratureResult fr_v = v_fr_vacuum(zeta, opt);
    const quad::QuadratureResult fr_t = v_fr_thermal(zeta, tau, opt);
    const quad::QuadratureResult rr = v_rr(zeta, opt);
    const double total = w.tanh_weight * (fr_v.value + fr_t.value) + rr.value;
    const double err = w.tanh_weight * (fr_v.abs_error_estimate +
                                        fr_t.abs_error_estimate) +
                       rr.abs_error_estimate;
    return ReducedPotential{total, fr_v.value, fr_t.value, rr.value, err,
                            fr_v.panels_used + fr_t.panels_used + rr.panels_used};
}

/// Excited-state potential v_e = v_rr - (v_fr_vacuum + v_fr_thermal); the
/// fluctuation pieces enter with the opposite sign relative to the ground
/// state while the reservoir-reaction piece keeps its sign.
inline ReducedPotential v_excited(double zeta, double tau,
                                  const PotentialOptions& opt = {}) {
    const quad::QuadratureResult fr_v = v_fr_vacuum(zeta, opt);
    const quad::QuadratureResult fr_t = v_fr_thermal(zeta, tau, opt);
    const quad::QuadratureResult rr = v_rr(zeta, opt);
    const double total = rr.value - (fr_v.value + fr_t.value);
    const double err = rr.abs_error_estimate + fr_v.abs_error_estimate +
                       fr_t.abs_error_estimate;
    return ReducedPotential{total, fr_v.value, fr_t.value, rr.value, err,
                            fr_v.panels_used + fr_t.panels_used + rr.panels_used};
}

/// Ground-state potential assembled from the pieces of a ReducedPotential.
inline double v_ground(const ReducedPotential& p) {
    return p.fr_vacuum + p.fr_thermal + p.rr;
}

}  // namespace cpwall
