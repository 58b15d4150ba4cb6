#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cpwall/errors.hpp"

namespace cpwall::quad {

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    long panels_used = 0;
    int acceleration_terms = 0;
    std::vector<double> regularization_etas{};
};

/// Requested tolerance could not be reached; `best` holds the most accurate
/// estimate obtained (maps to CLI exit code 3).
struct ConvergenceError : std::runtime_error {
    QuadratureResult best;
    ConvergenceError(const std::string& msg, QuadratureResult best_)
        : std::runtime_error(msg), best(std::move(best_)) {}
};

namespace detail {

/// Neumaier compensated summation; keeps panel sums exact to ~1 ulp even
/// when thousands of near-cancelling contributions are combined.
struct Accumulator {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double get() const { return sum + comp; }
};

// 7-point Gauss / 15-point Kronrod pair on [-1, 1], non-negative nodes.
// Even indices are Kronrod-only nodes, odd indices (and the centre) carry
// the embedded Gauss rule.
inline constexpr double gk_nodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
};
inline constexpr double k15_weights[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278,
};
inline constexpr double g7_weights[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694,
};

struct Panel {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double err = 0.0;
    double floor = 0.0;  // 50*eps*resabs: error irreducible by bisection

    bool splittable() const {
        if (err <= floor * 1.000001) return false;
        const double width_limit =
            8.0 * std::numeric_limits<double>::epsilon() *
            std::max({std::fabs(a), std::fabs(b), 1.0});
        return (b - a) > width_limit;
    }
    bool operator<(const Panel& other) const { return err < other.err; }
};

template <typename F>
Panel evaluate_panel(F&& f, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);

    double fval[15];
    double wsum_k = 0.0, wsum_g = 0.0, wsum_abs = 0.0;
    int nv = 0;

    const double fc = f(mid);
    fval[nv++] = fc;
    wsum_k += k15_weights[7] * fc;
    wsum_g += g7_weights[3] * fc;
    wsum_abs += k15_weights[7] * std::fabs(fc);

    for (int i = 0; i < 7; ++i) {
        const double dx = half * gk_nodes[i];
        const double f1 = f(mid - dx);
        const double f2 = f(mid + dx);
        fval[nv++] = f1;
        fval[nv++] = f2;
        wsum_k += k15_weights[i] * (f1 + f2);
        wsum_abs += k15_weights[i] * (std::fabs(f1) + std::fabs(f2));
        if (i % 2 == 1) wsum_g += g7_weights[i / 2] * (f1 + f2);
    }

    const double mean = wsum_k * 0.5;
    double wsum_asc = k15_weights[7] * std::fabs(fc - mean);
    nv = 1;
    for (int i = 0; i < 7; ++i) {
        wsum_asc += k15_weights[i] *
                    (std::fabs(fval[nv] - mean) + std::fabs(fval[nv + 1] - mean));
        nv += 2;
    }

    Panel p;
    p.a = a;
    p.b = b;
    p.value = wsum_k * half;
    const double resabs = wsum_abs * half;
    const double resasc = wsum_asc * half;
    double err = std::fabs((wsum_k - wsum_g) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    p.floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    p.err = std::max(err, p.floor);
    if (!std::isfinite(p.value) || !std::isfinite(p.err))
        throw DomainError("integrate_adaptive: integrand produced a non-finite value");
    return p;
}

inline double tolerance_target(double rel_tol, double abs_tol, double value) {
    return std::max(abs_tol, rel_tol * std::fabs(value));
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 integration of f over [a, b].
///
/// Bisects the panel with the largest error estimate until the summed
/// estimates satisfy max(abs_tol, rel_tol*|I|), every remaining panel is
/// pinned at its roundoff floor (the reported abs_error_estimate is then the
/// honest floor), or max_panels is exceeded (ConvergenceError carrying the
/// best estimate).
template <typename F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol,
                                    double abs_tol = 0.0, int max_panels = 200000) {
    if (!(std::isfinite(a) && std::isfinite(b) && a <= b))
        throw DomainError("integrate_adaptive: need finite a <= b");
    if (!(rel_tol >= 0.0 && abs_tol >= 0.0))
        throw DomainError("integrate_adaptive: tolerances must be >= 0");
    if (a == b) return QuadratureResult{0.0, 0.0, 0, 0, {}};

    std::vector<detail::Panel> active;   // max-heap by err
    std::vector<detail::Panel> settled;  // panels at their roundoff floor
    active.push_back(detail::evaluate_panel(f, a, b));

    double val_sum = active[0].value;
    double err_sum = active[0].err;
    long rebuild_tick = 0;

    auto rebuild_sums = [&] {
        detail::Accumulator v, e;
        for (const auto& p : active) { v.add(p.value); e.add(p.err); }
        for (const auto& p : settled) { v.add(p.value); e.add(p.err); }
        val_sum = v.get();
        err_sum = e.get();
    };

    while (true) {
        if (err_sum <= detail::tolerance_target(rel_tol, abs_tol, val_sum)) break;

        while (!active.empty() && !active.front().splittable()) {
            std::pop_heap(active.begin(), active.end());
            settled.push_back(active.back());
            active.pop_back();
        }
        if (active.empty()) break;  // roundoff-limited: report the floor

        const long n_panels = static_cast<long>(active.size() + settled.size());
        if (n_panels >= max_panels) {
            rebuild_sums();
            QuadratureResult best{val_sum, err_sum, n_panels, 0, {}};
            throw ConvergenceError(
                "integrate_adaptive: panel limit reached before tolerance", best);
        }

        std::pop_heap(active.begin(), active.end());
        const detail::Panel worst = active.back();
        active.pop_back();

        const double mid = 0.5 * (worst.a + worst.b);
        const detail::Panel left = detail::evaluate_panel(f, worst.a, mid);
        const detail::Panel right = detail::evaluate_panel(f, mid, worst.b);
        val_sum += (left.value + right.value) - worst.value;
        err_sum += (left.err + right.err) - worst.err;
        active.push_back(left);
        std::push_heap(active.begin(), active.end());
        active.push_back(right);
        std::push_heap(active.begin(), active.end());

        if (++rebuild_tick % 2048 == 0) rebuild_sums();
    }

    rebuild_sums();
    return QuadratureResult{val_sum, err_sum,
                            static_cast<long>(active.size() + settled.size()), 0, {}};
}

/// Principal-value window around an interior simple pole.
struct PvSpec {
    double pole_location = 1.0;
    double window_half_width = 0.5;
};

/// Cauchy principal value of integral h(x) dx over the symmetric window
/// [pole - delta, pole + delta], computed as the integral over s in (0, delta]
/// of (h(pole + s) - h(pole - s))/s after writing h(x) = r(x)/(x - pole) with
/// r regular.  The subtracted integrand extends smoothly to s = 0 (limit
/// 2*r'(pole)-like), so ordinary adaptive panels apply; Gauss-type nodes
/// never sample s = 0.
template <typename H>
QuadratureResult pv_integrate(H&& h, const PvSpec& spec, double rel_tol,
                              double abs_tol = 0.0, int max_panels = 200000) {
    const double p = spec.pole_location;
    const double d = spec.window_half_width;
    if (!(std::isfinite(p) && std::isfinite(d) && d > 0.0 && d <= p))
        throw DomainError("pv_integrate: need 0 < window_half_width <= pole_location");
    auto subtracted = [&](double s) { return (h(p + s) - h(p - s)) / s; };
    return integrate_adaptive(subtracted, 0.0, d, rel_tol, abs_tol, max_panels);
}

/// Exponentially regularized tail sum: integral of f over [start, inf) where
/// f oscillates with the given period.  Computes I(eta) = integral of
/// f(x)*exp(-eta*(x - start)) lobe by lobe for each damping eta, then
/// Richardson-extrapolates eta -> 0 with a Neville table.  The extrapolation
/// spread must satisfy the tolerance or a ConvergenceError is thrown.
///
/// An empty `etas` selects the default {1e-2, 1e-3, 1e-4} / period.
template <typename F>
QuadratureResult abel_regularized(F&& f, double period, std::vector<double> etas,
                                  double start, double rel_tol, double abs_tol = 0.0) {
    if (!(std::isfinite(period) && period > 0.0))
        throw DomainError("abel_regularized: period must be finite and > 0");
    if (!(std::isfinite(start) && start >= 0.0))
        throw DomainError("abel_regularized: start must be finite and >= 0");
    if (etas.empty()) etas = {1e-2 / period, 1e-3 / period, 1e-4 / period};
    for (std::size_t i = 0; i < etas.size(); ++i) {
        if (!(std::isfinite(etas[i]) && etas[i] > 0.0))
            throw DomainError("abel_regularized: etas must be finite and > 0");
        if (i > 0 && !(etas[i] < etas[i - 1]))
            throw DomainError("abel_regularized: etas must be strictly decreasing");
    }

    long panels = 0;
    double lobe_err_total = 0.0;
    std::vector<double> damped_values;
    damped_values.reserve(etas.size());

    for (const double eta : etas) {
        detail::Accumulator sum;
        double lobe_errs = 0.0;
        double prev_lobe = 0.0;
        double remainder = std::numeric_limits<double>::infinity();
        int quiet_lobes = 0;
        int alternating_streak = 0;
        const long lobe_cap = 5000000;
        for (long n = 0; n < lobe_cap; ++n) {
            const double lo = start + static_cast<double>(n) * period;
            const double hi = lo + period;
            auto damped = [&](double x) {
                return f(x) * std::exp(-eta * (x - start));
            };
            const double running = std::fabs(sum.get());
            const double stop_budget = std::max(
                {0.03 * abs_tol, 0.03 * rel_tol * running, 1e-280});
            QuadratureResult lobe = integrate_adaptive(
                damped, lo, hi, 1e-12, 0.1 * stop_budget, 256);
            sum.add(lobe.value);
            lobe_errs += lobe.abs_error_estimate;
            panels += lobe.panels_used;

            // Truncation remainder bound: for lobes of alternating sign the
            // remainder is at most one lobe; a monotone tail is bounded by
            // the geometric extrapolation of the measured decay ratio.
            if (lobe.value * prev_lobe < 0.0)
                ++alternating_streak;
            else
                alternating_streak = 0;
            const double mag = std::fabs(lobe.value);
            const double prev_mag = std::fabs(prev_lobe);
            if (alternating_streak >= 3) {
                remainder = mag;
            } else if (prev_mag > 0.0 && mag < prev_mag) {
                const double rho =
                    std::min(mag / prev_mag, 1.0 - 1e-12);
                remainder = mag * rho / (1.0 - rho);
            } else {
                remainder = std::numeric_limits<double>::infinity();
            }
            prev_lobe = lobe.value;

            if (n >= 3 && remainder <= stop_budget)
                ++quiet_lobes;
            else
                quiet_lobes = 0;
            if (quiet_lobes >= 3) break;
            if (n == lobe_cap - 1)
                throw ConvergenceError(
                    "abel_regularized: damped lobe sum did not settle",
                    QuadratureResult{sum.get(), lobe_errs + remainder, panels,
                                     0, etas});
        }
        damped_values.push_back(sum.get());
        lobe_err_total += lobe_errs + remainder;
    }

    // Neville extrapolation of (eta_i, I_i) to eta = 0.
    const std::size_t m = etas.size();
    std::vector<double> t = damped_values;
    double prev_top = t[0];
    double last_correction = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
        for (std::size_t i = 0; i + k < m; ++i) {
            const double num = etas[i + k] / (etas[i] - etas[i + k]);
            t[i] = t[i + 1] + (t[i + 1] - t[i]) * num;
        }
        last_correction = std::fabs(t[0] - prev_top);
        prev_top = t[0];
    }
    const double est = t[0];
    const double spread = (m > 1) ? last_correction
                                  : std::fabs(est) * 1e-2 + lobe_err_total;

    QuadratureResult out{est, spread + lobe_err_total, panels,
                         static_cast<int>(m - 1), etas};
    if (out.abs_error_estimate >
        detail::tolerance_target(rel_tol, abs_tol, est) + 1e-300)
        throw ConvergenceError(
            "abel_regularized: extrapolation spread exceeds tolerance", out);
    return out;
}

/// Tail integral of an oscillatory integrand over [start, inf).
///
/// Integrates lobe by lobe (one period each) with compensated partial sums
/// and accelerates the alternating partial-sum sequence by iterated
/// averaging over a sliding window.  Exponentially damped tails short-cut to
/// the plain sum once consecutive lobes drop below the tolerance; lobe
/// sequences that stop alternating fall back to abel_regularized with the
/// default eta ladder.
template <typename F>
QuadratureResult oscillatory_tail(F&& f, double period, double start,
                                  double rel_tol, double abs_tol = 0.0,
                                  long max_lobes = 200000) {
    if (!(std::isfinite(period) && period > 0.0))
        throw DomainError("oscillatory_tail: period must be finite and > 0");
    if (!(std::isfinite(start) && start >= 0.0))
        throw DomainError("oscillatory_tail: start must be finite and >= 0");

    constexpr std::size_t window_cap = 128;
    std::deque<double> window;  // most recent partial sums
    detail::Accumulator plain_sum;
    double lobe_err_total = 0.0;
    long panels = 0;

    double prev_est = std::numeric_limits<double>::quiet_NaN();
    double last_lobes[3] = {0.0, 0.0, 0.0};
    std::vector<double> recent_signs;
    double best_core = std::numeric_limits<double>::infinity();
    double best_est = 0.0;
    long lobes_since_best = 0;

    auto averaged = [&](double* spread_out, int* levels_out) {
        std::vector<double> t(window.begin(), window.end());
        double top = t[0];
        double prev_top = top;
        const std::size_t m = t.size();
        for (std::size_t level = 1; level < m; ++level) {
            for (std::size_t i = 0; i + level < m; ++i)
                t[i] = 0.5 * (t[i] + t[i + 1]);
            prev_top = top;
            top = t[0];
        }
        *spread_out = std::fabs(top - prev_top);
        *levels_out = static_cast<int>(m - 1);
        return top;
    };

    for (long n = 0; n < max_lobes; ++n) {
        const double lo = start + static_cast<double>(n) * period;
        const double hi = lo + period;
        const double scale = std::max(std::fabs(plain_sum.get()),
                                      std::fabs(window.empty() ? 0.0 : window.back()));
        // Harmonic budget: keeps the running sum of per-lobe errors within a
        // slowly growing fraction of the total budget however many lobes the
        // acceleration ends up needing.  Absolute-only, so a budget below the
        // panel roundoff floor drives the lobe to its floor and no further.
        const double lobe_abs = 0.05 / static_cast<double>(n + 4) *
                                std::max(abs_tol, rel_tol * scale);
        QuadratureResult lobe =
            integrate_adaptive(f, lo, hi, 0.0, lobe_abs, 512);
        panels += lobe.panels_used;
        lobe_err_total += lobe.abs_error_estimate;
        plain_sum.add(lobe.value);
        window.push_back(plain_sum.get());
        if (window.size() > window_cap) window.pop_front();

        last_lobes[2] = last_lobes[1];
        last_lobes[1] = last_lobes[0];
        last_lobes[0] = lobe.value;
        recent_signs.push_back(lobe.value);
        if (recent_signs.size() > 16) recent_signs.erase(recent_signs.begin());

        // Damped tail: once three consecutive lobes are negligible the
        // remainder is bounded by a short geometric extrapolation.
        const double target =
            detail::tolerance_target(rel_tol, abs_tol, plain_sum.get());
        if (n >= 2 && target > 0.0) {
            const double biggest = std::max(
                {std::fabs(last_lobes[0]), std::fabs(last_lobes[1]),
                 std::fabs(last_lobes[2])});
            if (biggest <= 0.05 * target) {
                double ratio = 0.0;
                if (std::fabs(last_lobes[1]) > 0.0)
                    ratio = std::fabs(last_lobes[0]) / std::fabs(last_lobes[1]);
                ratio = std::min(ratio, 0.9);
                const double tail_bound =
                    std::fabs(last_lobes[0]) * ratio / (1.0 - ratio);
                return QuadratureResult{plain_sum.get(),
                                        lobe_err_total + biggest + tail_bound,
                                        panels, 0, {}};
            }
        }

        if (n >= 8) {
            double spread = 0.0;
            int levels = 0;
            const double est = averaged(&spread, &levels);
            double drift = std::isnan(prev_est) ? spread : std::fabs(est - prev_est);
            prev_est = est;
            const double core = spread + drift;
            const double err = core + lobe_err_total;
            if (err <= detail::tolerance_target(rel_tol, abs_tol, est))
                return QuadratureResult{est, err, panels, levels, {}};
            // Track the most stable estimate; once the spread stops improving
            // for many lobes the acceleration has hit its own roundoff floor
            // and the honest (larger) error is reported instead of looping.
            if (core < 0.97 * best_core) {
                best_core = core;
                best_est = est;
                lobes_since_best = 0;
            } else if (++lobes_since_best >= 48) {
                return QuadratureResult{best_est, best_core + lobe_err_total,
                                        panels, levels, {}};
            }
        }

        // Lobes that stop alternating defeat the averaging; hand the whole
        // tail to the damped-regularization route instead.
        if (recent_signs.size() == 16) {
            int alternations = 0;
            int counted = 0;
            const double floor_mag = 1e-3 * std::fabs(recent_signs.back());
            for (std::size_t i = 1; i < recent_signs.size(); ++i) {
                if (std::fabs(recent_signs[i]) < floor_mag ||
                    std::fabs(recent_signs[i - 1]) < floor_mag)
                    continue;
                ++counted;
                if (recent_signs[i] * recent_signs[i - 1] < 0.0) ++alternations;
            }
            if (counted >= 8 && alternations * 4 < counted * 3) {
                QuadratureResult out =
                    abel_regularized(f, period, {}, start, rel_tol, abs_tol);
                out.panels_used += panels;
                return out;
            }
        }
    }

    double spread = 0.0;
    int levels = 0;
    const double est = window.size() > 1 ? averaged(&spread, &levels) : plain_sum.get();
    QuadratureResult best{est, spread + lobe_err_total, panels, levels, {}};
    throw ConvergenceError("oscillatory_tail: lobe limit reached before tolerance",
                           best);
}

}  // namespace cpwall::quad
