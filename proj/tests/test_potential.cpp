#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "cpwall/potential.hpp"
#include "reference_values.hpp"

using namespace cpwall;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
const PotentialOptions tight{1e-10, 0.5};

void check_component(const quad::QuadratureResult& r, double want, double rtol) {
    CHECK_THAT(r.value, Catch::Matchers::WithinRel(want, rtol));
    CHECK(std::fabs(r.value - want) <=
          std::max(r.abs_error_estimate, 1e-13 * std::fabs(want)));
}

}  // namespace

TEST_CASE("vacuum components match the reference decomposition", "[potential]") {
    struct Row {
        double zeta;
        double rr, fr, g;
    };
    const Row rows[] = {
        {0.005, refvals::v_rr_0p005, refvals::v_fr_vac_0p005, refvals::v_g_vac_0p005},
        {0.01, refvals::v_rr_0p01, refvals::v_fr_vac_0p01, refvals::v_g_vac_0p01},
        {0.1, refvals::v_rr_0p1, refvals::v_fr_vac_0p1, refvals::v_g_vac_0p1},
        {0.5, refvals::v_rr_0p5, refvals::v_fr_vac_0p5, refvals::v_g_vac_0p5},
        {1.0, refvals::v_rr_1, refvals::v_fr_vac_1, refvals::v_g_vac_1},
        {10.0, refvals::v_rr_10, refvals::v_fr_vac_10, refvals::v_g_vac_10},
        {20.0, refvals::v_rr_20, refvals::v_fr_vac_20, refvals::v_g_vac_20},
        {40.0, refvals::v_rr_40, refvals::v_fr_vac_40, refvals::v_g_vac_40},
        {50.0, refvals::v_rr_50, refvals::v_fr_vac_50, refvals::v_g_vac_50},
        {80.0, refvals::v_rr_80, refvals::v_fr_vac_80, refvals::v_g_vac_80},
    };
    for (const Row& row : rows) {
        INFO("zeta = " << row.zeta);
        check_component(v_rr(row.zeta, tight), row.rr, 1e-8);
        check_component(v_fr_vacuum(row.zeta, tight), row.fr, 1e-8);
        check_component(v_g_vacuum(row.zeta, tight), row.g, 1e-8);
    }
}

TEST_CASE("route equivalence: PV pieces recombine into the pole-free route",
          "[potential]") {
    for (double zeta : {0.01, 0.1, 1.0, 10.0, 50.0}) {
        INFO("zeta = " << zeta);
        const PotentialOptions opt{1e-7, 0.5};
        const auto fr = v_fr_vacuum(zeta, opt);
        const auto rr = v_rr(zeta, opt);
        const auto g = v_g_vacuum(zeta, opt);
        const double diff = std::fabs(fr.value + rr.value - g.value);
        CHECK(diff <= fr.abs_error_estimate + rr.abs_error_estimate +
                          g.abs_error_estimate);
        CHECK(diff <= 1e-6 * std::fabs(g.value));
    }
}

TEST_CASE("principal-value window width does not change the components",
          "[potential]") {
    const PotentialOptions narrow{1e-9, 0.25};
    const PotentialOptions wide{1e-9, 0.5};
    for (double zeta : {0.1, 1.0, 10.0}) {
        INFO("zeta = " << zeta);
        const auto a = v_rr(zeta, narrow);
        const auto b = v_rr(zeta, wide);
        CHECK(std::fabs(a.value - b.value) <=
              a.abs_error_estimate + b.abs_error_estimate);
        const auto c = v_fr_vacuum(zeta, narrow);
        const auto d = v_fr_vacuum(zeta, wide);
        CHECK(std::fabs(c.value - d.value) <=
              c.abs_error_estimate + d.abs_error_estimate);
    }
}

TEST_CASE("thermal component matches the reference values", "[potential]") {
    struct Row {
        double zeta, tau, want;
    };
    const Row rows[] = {
        {1.0, 0.5, refvals::v_fr_th_1_0p5},
        {1.0, 2.0, refvals::v_fr_th_1_2},
        {1.0, 10.0, refvals::v_fr_th_1_10},
        {1.0, 12.0, refvals::v_fr_th_1_12},
        {1.0, 14.0, refvals::v_fr_th_1_14},
        {0.5, 0.01, refvals::v_fr_th_0p5_0p01},
        {0.1, 0.01, refvals::v_fr_th_0p1_0p01},
        {1.0, 0.01, refvals::v_fr_th_1_0p01},
        {10.0, 0.01, refvals::v_fr_th_10_0p01},
        {40.0, 20.0, refvals::v_fr_th_40_20},
        {80.0, 20.0, refvals::v_fr_th_80_20},
    };
    for (const Row& row : rows) {
        INFO("zeta = " << row.zeta << ", tau = " << row.tau);
        check_component(v_fr_thermal(row.zeta, row.tau, tight), row.want, 1e-7);
    }
    // Deep in the level-saturation tail the component is small but follows a
    // power law in 1/tau, not an exponential: the reference pins it tightly.
    check_component(v_fr_thermal(1.0, 20.0, PotentialOptions{1e-12, 0.5}),
                    refvals::v_fr_th_1_20, 1e-7);
}

TEST_CASE("thermal component vanishes identically at tau = +inf", "[potential]") {
    const auto r = v_fr_thermal(1.0, inf, tight);
    CHECK(r.value == 0.0);
    CHECK(r.abs_error_estimate == 0.0);
    CHECK(r.panels_used == 0);
}

TEST_CASE("population weights", "[potential]") {
    const auto w = weights(2.0);
    CHECK_THAT(w.p_excited,
               Catch::Matchers::WithinRel(refvals::p_excited_tau2, 1e-14));
    CHECK_THAT(w.tanh_weight, Catch::Matchers::WithinRel(refvals::tanh_1, 1e-14));

    const auto cold = weights(inf);
    CHECK(cold.p_excited == 0.0);
    CHECK(cold.tanh_weight == 1.0);

    // identity tanh(tau/2) = 1 - 2*p_e across the physical range
    for (double tau = 1e-3; tau <= 30.0; tau *= 2.3) {
        INFO("tau = " << tau);
        const auto ww = weights(tau);
        CHECK(std::fabs(ww.tanh_weight - (1.0 - 2.0 * ww.p_excited)) <= 1e-14);
    }
    CHECK_THROWS_AS(weights(0.0), DomainError);
    CHECK_THROWS_AS(weights(-1.0), DomainError);
}

TEST_CASE("equilibrium potential matches the reference values", "[potential]") {
    struct Row {
        double zeta, tau, want;
    };
    const Row rows[] = {
        {1.0, 2.0, refvals::v_total_1_2},
        {0.1, 0.01, refvals::v_total_0p1_0p01},
        {0.5, 0.01, refvals::v_total_0p5_0p01},
        {1.0, 0.01, refvals::v_total_1_0p01},
        {10.0, 0.01, refvals::v_total_10_0p01},
        {1.0, 10.0, refvals::v_total_1_10},
        {1.0, 12.0, refvals::v_total_1_12},
        {1.0, 14.0, refvals::v_total_1_14},
    };
    for (const Row& row : rows) {
        INFO("zeta = " << row.zeta << ", tau = " << row.tau);
        const auto r = v_total(row.zeta, row.tau, tight);
        CHECK_THAT(r.total, Catch::Matchers::WithinRel(row.want, 1e-8));
        CHECK(std::fabs(r.total - row.want) <=
              std::max(r.abs_error_estimate, 1e-12 * std::fabs(row.want)));
    }

    const PotentialOptions med{1e-9, 0.5};
    CHECK_THAT(v_total(40.0, 20.0, med).total,
               Catch::Matchers::WithinRel(refvals::v_total_40_20, 1e-8));
    CHECK_THAT(v_total(80.0, 20.0, med).total,
               Catch::Matchers::WithinRel(refvals::v_total_80_20, 1e-8));
}

TEST_CASE("zero-temperature total equals the pole-free vacuum route",
          "[potential]") {
    const auto total = v_total(1.0, inf, tight);
    const auto g = v_g_vacuum(1.0, tight);
    CHECK(total.fr_thermal == 0.0);
    CHECK_THAT(total.total, Catch::Matchers::WithinRel(g.value, 1e-10));
}

TEST_CASE("excited-state potential and the population-average identity",
          "[potential]") {
    const auto e = v_excited(1.0, 2.0, tight);
    CHECK_THAT(e.total, Catch::Matchers::WithinRel(refvals::v_excited_1_2, 1e-8));

    // (1-p_e)*v_g + p_e*v_e == v_total holds as component algebra
    const auto t = v_total(1.0, 2.0, tight);
    const auto w = weights(2.0);
    const double vg = v_ground(t);
    const double ve = t.rr - (t.fr_vacuum + t.fr_thermal);
    const double recombined = (1.0 - w.p_excited) * vg + w.p_excited * ve;
    CHECK(std::fabs(recombined - t.total) <= 1e-12 * std::fabs(t.total));
}

TEST_CASE("potential rejects out-of-domain arguments", "[potential]") {
    CHECK_THROWS_AS(v_rr(0.5e-6), DomainError);
    CHECK_THROWS_AS(v_rr(2e4), DomainError);
    CHECK_THROWS_AS(v_fr_thermal(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(v_fr_thermal(1.0, -3.0), DomainError);
    CHECK_THROWS_AS(v_total(1.0, 1.0, PotentialOptions{0.0, 0.5}), DomainError);
    CHECK_THROWS_AS(v_total(1.0, 1.0, PotentialOptions{0.5, 0.5}), DomainError);
    CHECK_THROWS_AS(v_total(1.0, 1.0, PotentialOptions{1e-8, 0.95}), DomainError);
    CHECK_THROWS_AS(v_total(1.0, 1.0, PotentialOptions{1e-8, 0.0}), DomainError);
}

TEST_CASE("error estimates stay proportional to the requested tolerance",
          "[potential]") {
    const auto loose = v_total(1.0, 2.0, PotentialOptions{1e-4, 0.5});
    const auto fine = v_total(1.0, 2.0, PotentialOptions{1e-9, 0.5});
    CHECK(loose.abs_error_estimate > fine.abs_error_estimate);
    CHECK(std::fabs(loose.total - fine.total) <=
          loose.abs_error_estimate + fine.abs_error_estimate);
}
