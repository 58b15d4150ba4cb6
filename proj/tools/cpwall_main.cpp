#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cpwall/cpwall.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_selfcheck = 1;
constexpr int exit_domain = 2;
constexpr int exit_convergence = 3;
constexpr int exit_io = 4;

constexpr double inf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

std::string fmt_short(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// "a,b,c" -> listed values; "lo:hi:N" -> N log-spaced points including both
/// endpoints.  "inf" is accepted as a listed value.
std::vector<double> parse_grid(const std::string& spec, const char* what) {
    std::vector<double> out;
    const auto parse_one = [&](const std::string& tok) {
        if (tok == "inf" || tok == "+inf") return inf;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw cpwall::DomainError(std::string(what) + ": cannot parse '" +
                                      tok + "'");
        }
        if (pos != tok.size())
            throw cpwall::DomainError(std::string(what) + ": cannot parse '" +
                                      tok + "'");
        return v;
    };

    if (spec.find(':') != std::string::npos) {
        std::istringstream is(spec);
        std::string lo_s, hi_s, n_s;
        if (!std::getline(is, lo_s, ':') || !std::getline(is, hi_s, ':') ||
            !std::getline(is, n_s))
            throw cpwall::DomainError(std::string(what) +
                                      ": range spec must be lo:hi:N");
        const double lo = parse_one(lo_s);
        const double hi = parse_one(hi_s);
        long n = 0;
        try {
            n = std::stol(n_s);
        } catch (const std::exception&) {
            n = 0;
        }
        if (!(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && hi >= lo) ||
            n < 1)
            throw cpwall::DomainError(std::string(what) +
                                      ": need 0 < lo <= hi and N >= 1");
        if (n == 1) {
            out.push_back(lo);
        } else {
            const double ratio = std::log(hi / lo) / static_cast<double>(n - 1);
            for (long i = 0; i < n; ++i)
                out.push_back(lo * std::exp(ratio * static_cast<double>(i)));
        }
        return out;
    }

    std::istringstream is(spec);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (!tok.empty()) out.push_back(parse_one(tok));
    }
    if (out.empty())
        throw cpwall::DomainError(std::string(what) + ": empty grid spec");
    return out;
}

struct Options {
    std::string command;
    std::optional<double> zeta, tau, theta;
    std::optional<double> z, omega0, alpha0;
    std::optional<std::string> temperature;
    std::optional<std::string> grid_zeta, grid_tau;
    double tol = 1e-8;
    std::string out_path;
    std::optional<double> epsilon, density;
    std::optional<std::string> gap;
    bool inject_fault = false;
};

/// --T takes a grid spec so slab can range over temperature; contexts that
/// need one temperature insist on a single-point grid.
double single_temperature(const Options& o) {
    const auto temps = parse_grid(*o.temperature, "--T");
    if (temps.size() != 1)
        throw cpwall::DomainError("--T: expected a single temperature here");
    return temps[0];
}

/// Canonical serialization of the effective configuration; hashed into the
/// output header so a result file identifies the run that produced it.
std::string canonical_config(const Options& o) {
    std::ostringstream s;
    s << "command=" << o.command;
    const auto put = [&](const char* k, const std::optional<double>& v) {
        if (v) s << ';' << k << '=' << fmt_short(*v);
    };
    const auto puts = [&](const char* k, const std::optional<std::string>& v) {
        if (v) s << ';' << k << '=' << *v;
    };
    put("zeta", o.zeta);
    put("tau", o.tau);
    put("theta", o.theta);
    put("z", o.z);
    puts("T", o.temperature);
    put("omega0", o.omega0);
    put("alpha0", o.alpha0);
    puts("grid-zeta", o.grid_zeta);
    puts("grid-tau", o.grid_tau);
    s << ";tol=" << fmt_short(o.tol);
    put("epsilon", o.epsilon);
    put("density", o.density);
    puts("gap", o.gap);
    if (o.inject_fault) s << ";inject-fault=1";
    return s.str();
}

std::string csv_header(const Options& o) {
    std::ostringstream s;
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical_config(o))));
    s << "# cpwall " << cpwall::version_string << "\n";
    s << "# command: " << o.command << "\n";
    s << "# config-hash: " << hash << "\n";
    s << "# tol: " << fmt(o.tol) << "\n";
    return s.str();
}

int write_output(const Options& o, const std::string& content) {
    if (o.out_path.empty()) {
        std::cout << content;
        return std::cout.good() ? exit_ok : exit_io;
    }
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open output file '" << o.out_path << "'\n";
        return exit_io;
    }
    f << content;
    f.flush();
    if (!f.good()) {
        std::cerr << "error: write to '" << o.out_path << "' failed\n";
        return exit_io;
    }
    return exit_ok;
}

/// Annotates quadrature convergence failures with the potential component
/// that raised them, as required for the exit-code-3 diagnostics.
template <typename F>
auto named_component(const char* name, F&& f) {
    try {
        return f();
    } catch (const cpwall::quad::ConvergenceError& e) {
        throw cpwall::quad::ConvergenceError(
            std::string(name) + ": " + e.what(), e.best);
    }
}

struct EvalRow {
    double zeta, tau, theta;
    cpwall::ReducedPotential pot;
    double v_g, v_excited;
    std::string regime;
};

EvalRow evaluate_point(double zeta, double tau, double tol) {
    const cpwall::PotentialOptions opt{tol, 0.5};
    const cpwall::PopulationWeights w = cpwall::weights(tau);
    const auto fr_v = named_component(
        "v_fr_vacuum", [&] { return cpwall::v_fr_vacuum(zeta, opt); });
    const auto fr_t = named_component(
        "v_fr_thermal", [&] { return cpwall::v_fr_thermal(zeta, tau, opt); });
    const auto rr =
        named_component("v_rr", [&] { return cpwall::v_rr(zeta, opt); });

    EvalRow row;
    row.zeta = zeta;
    row.tau = tau;
    row.theta = std::isinf(tau) ? 0.0 : 2.0 / tau;
    row.pot.fr_vacuum = fr_v.value;
    row.pot.fr_thermal = fr_t.value;
    row.pot.rr = rr.value;
    row.pot.total = w.tanh_weight * (fr_v.value + fr_t.value) + rr.value;
    row.pot.abs_error_estimate =
        w.tanh_weight * (fr_v.abs_error_estimate + fr_t.abs_error_estimate) +
        rr.abs_error_estimate;
    row.pot.panels_used =
        fr_v.panels_used + fr_t.panels_used + rr.panels_used;
    row.v_g = fr_v.value + fr_t.value + rr.value;
    row.v_excited = rr.value - (fr_v.value + fr_t.value);
    row.regime = cpwall::to_string(cpwall::classify_regime(zeta, tau).regime);
    return row;
}

const char* eval_columns =
    "zeta,tau,theta,v_total,v_g,v_rr,v_fr_vacuum,v_fr_thermal,v_excited,"
    "abs_error,regime";

std::string format_eval_row(const EvalRow& r) {
    std::ostringstream s;
    s << fmt(r.zeta) << ',' << fmt(r.tau) << ',' << fmt(r.theta) << ','
      << fmt(r.pot.total) << ',' << fmt(r.v_g) << ',' << fmt(r.pot.rr) << ','
      << fmt(r.pot.fr_vacuum) << ',' << fmt(r.pot.fr_thermal) << ','
      << fmt(r.v_excited) << ',' << fmt(r.pot.abs_error_estimate) << ','
      << r.regime;
    return s.str();
}

std::pair<double, double> resolve_reduced_point(const Options& o) {
    const bool reduced_mode = o.zeta.has_value();
    const bool si_mode = o.z.has_value();
    if (reduced_mode == si_mode)
        throw cpwall::DomainError(
            "eval: give either --zeta with --tau/--theta, or --z with --T and "
            "--omega0/--alpha0");
    if (si_mode) {
        if (!(o.temperature && o.omega0 && o.alpha0))
            throw cpwall::DomainError(
                "eval: SI mode needs --z, --T, --omega0 and --alpha0");
        const cpwall::AtomSpec atom(*o.omega0, *o.alpha0);
        const auto p = cpwall::reduce(atom, *o.z,
                                      cpwall::ThermalSpec(single_temperature(o)));
        return {p.zeta, p.tau};
    }
    if (o.tau && o.theta)
        throw cpwall::DomainError("eval: give --tau or --theta, not both");
    double tau = inf;
    if (o.tau) tau = *o.tau;
    else if (o.theta) tau = (*o.theta == 0.0) ? inf : 2.0 / *o.theta;
    else throw cpwall::DomainError("eval: reduced mode needs --tau or --theta");
    return {*o.zeta, tau};
}

int cmd_eval(const Options& o) {
    const auto [zeta, tau] = resolve_reduced_point(o);
    const EvalRow row = evaluate_point(zeta, tau, o.tol);

    std::ostringstream body;
    body << csv_header(o);
    if (o.z && o.omega0 && o.alpha0) {
        const cpwall::AtomSpec atom(*o.omega0, *o.alpha0);
        body << "# v_total_si_joules: "
             << fmt(cpwall::potential_si(atom, row.pot.total)) << "\n";
    }
    body << eval_columns << "\n" << format_eval_row(row) << "\n";
    return write_output(o, body.str());
}

int cmd_sweep(const Options& o) {
    if (!o.grid_zeta || !o.grid_tau)
        throw cpwall::DomainError("sweep: needs --grid-zeta and --grid-tau");
    const auto zetas = parse_grid(*o.grid_zeta, "--grid-zeta");
    const auto taus = parse_grid(*o.grid_tau, "--grid-tau");

    struct Slot {
        bool ok = false;
        std::string status;
        EvalRow row;
    };
    const std::size_t n = zetas.size() * taus.size();
    std::vector<Slot> slots(n);

    // Grid points are independent; workers pull indices and place results
    // into preassigned slots so the output order is row-major regardless of
    // scheduling.
    std::atomic<std::size_t> cursor{0};
    const unsigned n_threads = std::max(
        1u, std::min({std::thread::hardware_concurrency(),
                      static_cast<unsigned>(n), 8u}));
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n) return;
            const double zeta = zetas[i / taus.size()];
            const double tau = taus[i % taus.size()];
            try {
                slots[i].row = evaluate_point(zeta, tau, o.tol);
                slots[i].ok = true;
                slots[i].status = "ok";
            } catch (const cpwall::quad::ConvergenceError&) {
                slots[i].status = "convergence_error";
                slots[i].row.zeta = zeta;
                slots[i].row.tau = tau;
            } catch (const cpwall::DomainError&) {
                slots[i].status = "domain_error";
                slots[i].row.zeta = zeta;
                slots[i].row.tau = tau;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::size_t n_ok = 0;
    std::ostringstream body;
    body << csv_header(o) << eval_columns << ",status\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const Slot& s : slots) {
        if (s.ok) {
            ++n_ok;
            body << format_eval_row(s.row);
        } else {
            body << fmt(s.row.zeta) << ',' << fmt(s.row.tau);
            for (int k = 0; k < 8; ++k) body << ',' << fmt(nan);
            body << ",none";
        }
        body << ',' << s.status << "\n";
    }
    const int rc = write_output(o, body.str());
    if (rc != exit_ok) return rc;
    return (20 * (n - n_ok) <= n) ? exit_ok : exit_convergence;
}

std::vector<double> fig_thetas() {
    std::vector<double> t;
    const double lo = 0.01, hi = 3.0;
    const int n = 300;
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i)
        t.push_back(lo * std::exp(step * static_cast<double>(i)));
    return t;
}

int cmd_fig1(const Options& o) {
    std::ostringstream body;
    body << csv_header(o) << "theta,f_theta,lifshitz_ratio\n";
    for (double theta : fig_thetas())
        body << fmt(theta) << ',' << fmt(cpwall::f_theta(theta)) << ','
             << fmt(theta) << "\n";
    return write_output(o, body.str());
}

int cmd_fig2(const Options& o) {
    std::ostringstream body;
    body << csv_header(o) << "theta,delta_v_percent\n";
    for (double theta : fig_thetas())
        body << fmt(theta) << ',' << fmt(cpwall::delta_v_percent(theta)) << "\n";
    return write_output(o, body.str());
}

int cmd_regimes(const Options& o) {
    if (!o.grid_zeta || !o.grid_tau)
        throw cpwall::DomainError("regimes: needs --grid-zeta and --grid-tau");
    const auto zetas = parse_grid(*o.grid_zeta, "--grid-zeta");
    const auto taus = parse_grid(*o.grid_tau, "--grid-tau");
    std::ostringstream body;
    body << csv_header(o) << "zeta,tau,theta,regime,v_asymptotic,conditions\n";
    for (double zeta : zetas)
        for (double tau : taus) {
            const auto rep = cpwall::classify_regime(zeta, tau);
            const double theta = std::isinf(tau) ? 0.0 : 2.0 / tau;
            body << fmt(zeta) << ',' << fmt(tau) << ',' << fmt(theta) << ','
                 << cpwall::to_string(rep.regime) << ','
                 << fmt(rep.asymptotic_value) << ',' << rep.conditions << "\n";
        }
    return write_output(o, body.str());
}

int cmd_slab(const Options& o) {
    if (!o.omega0)
        throw cpwall::DomainError("slab: needs --omega0");
    cpwall::SlabSpec slab{0.0};
    if (o.epsilon && o.density)
        throw cpwall::DomainError("slab: give --epsilon or --density, not both");
    if (o.epsilon) {
        slab = cpwall::SlabSpec::from_epsilon(*o.epsilon);
    } else if (o.density) {
        if (!o.alpha0)
            throw cpwall::DomainError("slab: --density needs --alpha0");
        slab = cpwall::SlabSpec::from_density(*o.alpha0, *o.density);
    } else {
        throw cpwall::DomainError("slab: needs --epsilon or --density");
    }
    if (!o.gap) throw cpwall::DomainError("slab: needs --gap");
    if (!o.temperature) throw cpwall::DomainError("slab: needs --T");
    const auto gaps = parse_grid(*o.gap, "--gap");
    const auto temps = parse_grid(*o.temperature, "--T");

    std::ostringstream body;
    body << csv_header(o) << "a,T,F,F_Lif,delta_F_percent\n";
    for (double a : gaps)
        for (double temp : temps) {
            const double f = cpwall::slab_force_per_area(a, temp, slab, *o.omega0);
            const double f_lif = cpwall::slab_force_lifshitz(a, temp, slab);
            const double delta =
                (f == 0.0) ? 0.0 : 100.0 * (f_lif - f) / f;
            body << fmt(a) << ',' << fmt(temp) << ',' << fmt(f) << ','
                 << fmt(f_lif) << ',' << fmt(delta) << "\n";
        }
    return write_output(o, body.str());
}

int cmd_selfcheck(const Options& o) {
    struct Check {
        std::string name;
        bool ok;
        std::string detail;
    };
    std::vector<Check> checks;
    const auto run = [&](const std::string& name, auto&& fn) {
        try {
            auto [ok, detail] = fn();
            checks.push_back({name, ok, detail});
        } catch (const std::exception& e) {
            checks.push_back({name, false, std::string("exception: ") + e.what()});
        }
    };

    run("pole_cancellation", [] {
        double worst = 0.0;
        for (double k : {0.0, 0.3, 0.9, 0.999, 1.001, 1.5, 3.0, 10.0, 250.0})
            worst = std::max(worst,
                             std::fabs(cpwall::alpha_plus_hat(k) +
                                       cpwall::alpha_minus_hat(k) -
                                       1.0 / (1.0 + k)));
        return std::pair{worst <= 1e-13, "max deviation " + fmt_short(worst)};
    });

    run("weight_identity", [] {
        double worst = 0.0;
        for (double tau = 1e-3; tau <= 30.0; tau *= 1.7) {
            const auto w = cpwall::weights(tau);
            worst = std::max(worst, std::fabs(w.tanh_weight -
                                              (1.0 - 2.0 * w.p_excited)));
        }
        return std::pair{worst <= 1e-14, "max deviation " + fmt_short(worst)};
    });

    run("kernel_branch_overlap", [] {
        double worst = 0.0;
        for (double x = 0.05; x <= 0.2000001; x += 0.0025) {
            const double x2 = x * x;
            const double series =
                1.0 / 3.0 + x2 * (-1.0 / 10.0 + x2 * (1.0 / 168.0 +
                x2 * (-1.0 / 6480.0 + x2 * (1.0 / 443520.0))));
            const double direct = std::sin(x) / x +
                                  2.0 * std::cos(x) / (x * x) -
                                  2.0 * std::sin(x) / (x * x * x);
            worst = std::max(worst, std::fabs(series - direct));
        }
        return std::pair{worst <= 1e-12, "max deviation " + fmt_short(worst)};
    });

    const double route_cap = o.inject_fault ? 1e-30 : 1e-6;
    run("route_equivalence", [route_cap] {
        const cpwall::PotentialOptions opt{1e-7, 0.5};
        double worst_rel = 0.0;
        bool within_budget = true;
        for (double zeta : {0.1, 1.0, 10.0}) {
            const auto fr = cpwall::v_fr_vacuum(zeta, opt);
            const auto rr = cpwall::v_rr(zeta, opt);
            const auto g = cpwall::v_g_vacuum(zeta, opt);
            const double diff = std::fabs(fr.value + rr.value - g.value);
            within_budget =
                within_budget && diff <= fr.abs_error_estimate +
                                             rr.abs_error_estimate +
                                             g.abs_error_estimate;
            worst_rel = std::max(worst_rel, diff / std::fabs(g.value));
        }
        return std::pair{within_budget && worst_rel <= route_cap,
                         "max relative split " + fmt_short(worst_rel)};
    });

    run("window_independence", [] {
        const auto a = cpwall::v_rr(1.0, {1e-9, 0.25});
        const auto b = cpwall::v_rr(1.0, {1e-9, 0.5});
        const double diff = std::fabs(a.value - b.value);
        return std::pair{
            diff <= a.abs_error_estimate + b.abs_error_estimate,
            "window 0.25 vs 0.5 differ by " + fmt_short(diff)};
    });

    run("thermal_zero_at_zero_temperature", [] {
        const auto r = cpwall::v_fr_thermal(1.0, inf, {1e-8, 0.5});
        return std::pair{r.value == 0.0, "value " + fmt_short(r.value)};
    });

    run("population_average_identity", [] {
        const auto t = cpwall::v_total(1.0, 2.0, {1e-9, 0.5});
        const auto w = cpwall::weights(2.0);
        const double vg = cpwall::v_ground(t);
        const double ve = t.rr - (t.fr_vacuum + t.fr_thermal);
        const double recombined =
            (1.0 - w.p_excited) * vg + w.p_excited * ve;
        const double rel = std::fabs(recombined - t.total) / std::fabs(t.total);
        return std::pair{rel <= 1e-12, "relative deviation " + fmt_short(rel)};
    });

    bool all_ok = true;
    std::ostringstream body;
    body << csv_header(o) << "check,status,detail\n";
    for (const Check& c : checks) {
        all_ok = all_ok && c.ok;
        std::cout << (c.ok ? "ok   " : "FAIL ") << c.name << ": " << c.detail
                  << "\n";
        body << c.name << ',' << (c.ok ? "ok" : "fail") << ',' << c.detail
             << "\n";
    }
    std::cout << (all_ok ? "selfcheck passed" : "selfcheck FAILED") << "\n";
    if (!o.out_path.empty()) {
        const int rc = write_output(o, body.str());
        if (rc != exit_ok) return rc;
    }
    return all_ok ? exit_ok : exit_selfcheck;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Finite-temperature atom-wall dispersion potential toolkit"};
    app.set_config("--config");

    app.add_option("command", o.command, "one of: eval sweep fig1 fig2 regimes slab selfcheck")
        ->required();

    const auto opt = [&](const char* name, std::optional<double>& slot,
                         const char* help) {
        app.add_option(name, slot, help);
    };
    opt("--zeta", o.zeta, "reduced distance k0*z");
    opt("--tau", o.tau, "reduced inverse temperature k0*lambda_T (inf allowed)");
    opt("--theta", o.theta, "temperature parameter 2/tau (alternative to --tau)");
    opt("--z", o.z, "wall distance [m] (SI mode)");
    app.add_option("--T", o.temperature,
                   "temperature [K]; slab accepts a,b,c or lo:hi:N");
    opt("--omega0", o.omega0, "transition frequency [rad/s]");
    opt("--alpha0", o.alpha0, "static polarizability [m^3]");
    app.add_option("--grid-zeta", o.grid_zeta, "zeta grid: a,b,c or lo:hi:N");
    app.add_option("--grid-tau", o.grid_tau, "tau grid: a,b,c or lo:hi:N");
    app.add_option("--tol", o.tol, "relative tolerance for the quadratures");
    app.add_option("--out", o.out_path, "output CSV path (default: stdout)");
    opt("--epsilon", o.epsilon, "slab dielectric constant");
    opt("--density", o.density, "slab number density [1/m^3]");
    app.add_option("--gap", o.gap, "slab gap a [m]: a,b,c or lo:hi:N");
    app.add_flag("--inject-fault", o.inject_fault,
                 "selfcheck negative-test mode: make route check impossible")
        ->group("");

    // "inf" must parse for --tau; CLI11 handles it through std::stod already.
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_domain;
    }

    try {
        if (o.command == "eval") return cmd_eval(o);
        if (o.command == "sweep") return cmd_sweep(o);
        if (o.command == "fig1") return cmd_fig1(o);
        if (o.command == "fig2") return cmd_fig2(o);
        if (o.command == "regimes") return cmd_regimes(o);
        if (o.command == "slab") return cmd_slab(o);
        if (o.command == "selfcheck") return cmd_selfcheck(o);
        std::cerr << "error: unknown command '" << o.command << "'\n";
        return exit_domain;
    } catch (const cpwall::quad::ConvergenceError& e) {
        std::cerr << "error: convergence failure in " << e.what() << "\n";
        return exit_convergence;
    } catch (const cpwall::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_domain;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: I/O failure: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_domain;
    }
}
