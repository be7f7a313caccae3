#include "doctest.h"

#include <cmath>

#include "wcbound/lp.hpp"
#include "wcbound/rng.hpp"

using namespace wcb;

namespace {

ThetaLP random_instance(std::uint64_t idx) {
    RngStream rng(99, idx);
    ThetaLP lp;
    const int L = 2 + static_cast<int>(idx % 3);
    const int k = 1 + static_cast<int>(idx % 2);
    lp.c.resize(L);
    for (double& v : lp.c) v = rng.next_uniform(-1.0, 1.0);
    lp.F.assign(k, std::vector<double>(L));
    for (auto& row : lp.F)
        for (double& v : row) v = rng.next_uniform(-1.0, 1.0);
    for (int j = 0; j < k; ++j) {
        const double center = rng.next_uniform(-1.0, 1.0);
        const double half = rng.next_uniform(0.0, 0.8);
        lp.moment_box.lower.push_back(center - half);
        lp.moment_box.upper.push_back(center + half);
    }
    return lp;
}

} // namespace

TEST_CASE("two-point exact instance") {
    // support values f = {0, 1}, target mean 0.3: theta = (0.7, 0.3)
    ThetaLP lp;
    lp.c = {0.0, 1.0};
    lp.F = {{0.0, 1.0}};
    lp.moment_box = {{0.3}, {0.3}};
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.value == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(s.theta[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(s.theta[1] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("infeasible instance is reported with positive infeasibility") {
    ThetaLP lp;
    lp.c = {1.0, 2.0};
    lp.F = {{0.0, 1.0}};
    lp.moment_box = {{2.0}, {3.0}};  // unreachable: F theta in [0, 1]
    LpSolution s = solve_lp(lp);
    CHECK(s.status == LpStatus::Infeasible);
    // the gap between the box and the reachable moment set is 1.0; the
    // reported measure may be scaled, but it must be clearly positive
    CHECK(s.infeasibility > 0.1);
}

TEST_CASE("optimal solutions are primal feasible") {
    for (std::uint64_t i = 0; i < 60; ++i) {
        ThetaLP lp = random_instance(i);
        LpSolution s = solve_lp(lp);
        if (s.status != LpStatus::Optimal) continue;
        double mass = 0.0;
        for (double t : s.theta) {
            CHECK(t >= -1e-9);
            mass += t;
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        for (std::size_t j = 0; j < lp.F.size(); ++j) {
            double v = 0.0;
            for (std::size_t l = 0; l < lp.c.size(); ++l) v += lp.F[j][l] * s.theta[l];
            CHECK(v >= lp.moment_box.lower[j] - 1e-8);
            CHECK(v <= lp.moment_box.upper[j] + 1e-8);
        }
        double obj = 0.0;
        for (std::size_t l = 0; l < lp.c.size(); ++l) obj += lp.c[l] * s.theta[l];
        CHECK(obj == doctest::Approx(s.value).epsilon(1e-9));
    }
}

TEST_CASE("duals price every column to nonpositive reduced cost at optimum") {
    int optimal_seen = 0;
    for (std::uint64_t i = 0; i < 60; ++i) {
        ThetaLP lp = random_instance(i);
        LpSolution s = solve_lp(lp);
        if (s.status != LpStatus::Optimal || s.dual_from_phase1) continue;
        ++optimal_seen;
        const std::size_t k = lp.F.size();
        REQUIRE(s.dual.size() == 1 + 2 * k);
        for (std::size_t l = 0; l < lp.c.size(); ++l) {
            double rc = lp.c[l] - s.dual[0];
            for (std::size_t j = 0; j < k; ++j)
                rc -= (s.dual[1 + j] + s.dual[1 + k + j]) * lp.F[j][l];
            CHECK(rc <= 1e-7);
        }
    }
    CHECK(optimal_seen > 10);
}

TEST_CASE("objective scaling invariance") {
    for (std::uint64_t i = 0; i < 30; ++i) {
        ThetaLP lp = random_instance(i);
        LpSolution s1 = solve_lp(lp);
        ThetaLP scaled = lp;
        for (double& v : scaled.c) v *= 2.0;
        LpSolution s2 = solve_lp(scaled);
        CHECK((s1.status == LpStatus::Optimal) == (s2.status == LpStatus::Optimal));
        if (s1.status == LpStatus::Optimal)
            CHECK(s2.value == doctest::Approx(2.0 * s1.value).epsilon(1e-8));
    }
}

TEST_CASE("degenerate single-column instances") {
    ThetaLP lp;
    lp.c = {0.75};
    lp.F = {{0.5}};
    lp.moment_box = {{0.4}, {0.6}};
    LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.value == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(s.theta[0] == doctest::Approx(1.0).epsilon(1e-12));

    lp.moment_box = {{0.6}, {0.9}};  // the only column misses the box
    s = solve_lp(lp);
    CHECK(s.status == LpStatus::Infeasible);
}
