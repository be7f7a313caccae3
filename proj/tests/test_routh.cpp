#include "doctest.h"

#include <array>
#include <cmath>

#include "wcbound/error.hpp"
#include "wcbound/expr.hpp"
#include "wcbound/model.hpp"
#include "wcbound/rng.hpp"
#include "wcbound/routh.hpp"

using namespace wcb;

TEST_CASE("nominal plant quartic margins are exact") {
    StabilityReport r = routh_stable(Polynomial{{1.0, 20.0, 124.0, 1040.0, 1600.0}});
    CHECK(r.stable);
    CHECK_FALSE(r.marginal);
    REQUIRE(r.margins.size() == 4);
    CHECK(r.margins[0] == 20.0);
    CHECK(r.margins[1] == 1440.0);
    CHECK(r.margins[2] == 857600.0);
    CHECK(r.margins[3] == 1600.0);
    CHECK(plant_margin(std::array<double, 3>{0.0, 0.0, 0.0}) == 20.0);
}

TEST_CASE("classification of known polynomials") {
    // (s+1)(s+2) stable
    CHECK(routh_stable(Polynomial{{1.0, 3.0, 2.0}}).stable);
    // (s-1)(s+2) = s^2 + s - 2 unstable
    CHECK_FALSE(routh_stable(Polynomial{{1.0, 1.0, -2.0}}).stable);
    // s^2 + 1: purely imaginary roots -> marginal, not stable
    StabilityReport m = routh_stable(Polynomial{{1.0, 0.0, 1.0}});
    CHECK_FALSE(m.stable);
    CHECK(m.marginal);
    // sign-normalized input: -(s+1)(s+2)
    CHECK(routh_stable(Polynomial{{-1.0, -3.0, -2.0}}).stable);
    // degree 1
    CHECK(routh_stable(Polynomial{{2.0, 4.0}}).stable);
    CHECK_FALSE(routh_stable(Polynomial{{2.0, -4.0}}).stable);
    // cubic (s+1)(s+2)(s+3) = s^3 + 6 s^2 + 11 s + 6
    CHECK(routh_stable(Polynomial{{1.0, 6.0, 11.0, 6.0}}).stable);
}

TEST_CASE("leading-coefficient and degree guards") {
    CHECK_THROWS_AS(routh_stable(Polynomial{{0.0, 1.0, 1.0}}), Error);
    CHECK_THROWS_AS(routh_stable(Polynomial{{}}), Error);
    CHECK_THROWS_AS(routh_stable(Polynomial{{5.0}}), Error);
    const double nan = std::nan("");
    CHECK_THROWS_AS(routh_stable(Polynomial{{1.0, nan, 1.0}}), Error);
}

TEST_CASE("event expression reproduces plant_margin bit for bit") {
    MomentProblem p = build_stability_problem();
    REQUIRE(p.d() == 3);
    RngStream rng(123, 0);
    for (int i = 0; i < 10000; ++i) {
        std::vector<double> eta;
        for (int j = 0; j < 3; ++j)
            eta.push_back(rng.next_uniform(p.domain.lower[j], p.domain.upper[j]));
        const double via_expr = eval_point(p.event, eta);
        const double direct = plant_margin(eta);
        CHECK(via_expr == direct);
    }
}

TEST_CASE("stability problem geometry") {
    MomentProblem p = build_stability_problem();
    CHECK(p.indicator_objective);
    CHECK(p.k() == 3);
    for (int j = 0; j < 3; ++j) {
        CHECK(p.domain.lower[j] == -0.16);
        CHECK(p.domain.upper[j] == 0.16);
        CHECK(p.moment_set.lower[j] == -0.05);
        CHECK(p.moment_set.upper[j] == 0.05);
        CHECK(expr_equal(p.moment_map[j], var(j + 1)));
    }
}

TEST_CASE("plant margin sign matches root classification on perturbed plants") {
    RngStream rng(321, 0);
    for (int i = 0; i < 200; ++i) {
        std::array<double, 3> eta{rng.next_uniform(-0.16, 0.16), rng.next_uniform(-0.16, 0.16),
                                  rng.next_uniform(-0.16, 0.16)};
        const double a1 = 20.0 + 0.2 * eta[1] + 0.3 * eta[2];
        const double a2 =
            (4.0 + 0.2 * eta[1]) * (6.0 + 0.3 * eta[2]) + 10.0 * (10.0 + 0.2 * eta[1] + 0.3 * eta[2]);
        const double a3 = 10.0 * (4.0 + 0.2 * eta[1]) * (6.0 + 0.3 * eta[2]) + 800.0 * (1.0 + 0.1 * eta[0]);
        const double a4 = 1600.0 * (1.0 + 0.1 * eta[0]);
        StabilityReport r = routh_stable(Polynomial{{1.0, a1, a2, a3, a4}});
        const double h = plant_margin(eta);
        if (std::fabs(h) > 1e-9) CHECK(r.stable == (h > 0.0));
    }
}
