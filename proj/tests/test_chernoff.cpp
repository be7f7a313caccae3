#include "doctest.h"

#include <cmath>

#include "wcbound/chernoff.hpp"
#include "wcbound/error.hpp"
#include "wcbound/expr.hpp"

using namespace wcb;

namespace {

// reference values pinned from high-precision evaluation of the closed forms
constexpr double kBern56Zeta = 0.40546510810816438;
constexpr double kBern56Rate = -0.020135513550688873;
constexpr double kBern56M10 = 0.81762201337984396;
constexpr double kBern56M100 = 0.13351367725131660;
constexpr double kBern59M1 = 0.69207274423084296;
constexpr double kBern59Zeta = 2.1972245773362194; // ln 9
constexpr double kBV115 = 0.87738267530166164;
constexpr double kBV115Zeta = 0.54930614433405485;
constexpr double kNormal011 = 0.60653065971263342;
constexpr double kPoisson12 = 0.67957045711476131;
constexpr double kPoisson21 = 0.73575888234288464;

CumulantSpec bernoulli_cumulant(double mu) {
    CumulantSpec c;
    c.phi = parse("ln(" + std::to_string(1.0 - mu) + " + " + std::to_string(mu) + "*exp(x1))", 1);
    c.a = -20.0;
    c.b = 20.0;
    return c;
}

} // namespace

TEST_CASE("closed forms reproduce pinned reference values") {
    InequalityResult r = uniform_bound_bernoulli(0.5, 0.6, 10);
    CHECK(r.bound == doctest::Approx(kBern56M10).epsilon(1e-12));
    CHECK(r.zeta == doctest::Approx(kBern56Zeta).epsilon(1e-12));
    CHECK(r.rate == doctest::Approx(kBern56Rate).epsilon(1e-9));
    CHECK(uniform_bound_bernoulli(0.5, 0.6, 100).bound ==
          doctest::Approx(kBern56M100).epsilon(1e-12));
    InequalityResult r59 = uniform_bound_bernoulli(0.5, 0.9, 1);
    CHECK(r59.bound == doctest::Approx(kBern59M1).epsilon(1e-12));
    CHECK(r59.zeta == doctest::Approx(kBern59Zeta).epsilon(1e-12));

    InequalityResult bv = uniform_bound_bounded_variance(1.0, 1.0, 0.5, 1);
    CHECK(bv.bound == doctest::Approx(kBV115).epsilon(1e-12));
    CHECK(bv.zeta == doctest::Approx(kBV115Zeta).epsilon(1e-12));

    CHECK(uniform_bound_normal(0.0, 1.0, 1.0, 1).bound ==
          doctest::Approx(kNormal011).epsilon(1e-12));
    InequalityResult po = uniform_bound_poisson(1.0, 2.0, 1);
    CHECK(po.bound == doctest::Approx(kPoisson12).epsilon(1e-12));
    CHECK(po.zeta == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    // 2/e pins the rate formula theta - lambda + theta ln(lambda/theta) at (2, 1)
    CHECK(std::exp(std::log(2.0) - 1.0) == doctest::Approx(kPoisson21).epsilon(1e-12));
}

TEST_CASE("generic minimizer agrees with the bernoulli closed form") {
    for (double mu : {0.3, 0.5, 0.7}) {
        for (double theta : {0.55, 0.75, 0.9}) {
            if (theta <= mu) continue;
            CumulantSpec c = bernoulli_cumulant(mu);
            // crossing level theta per step
            ChernoffResult g = chernoff_inf(c, theta);
            InequalityResult closed = uniform_bound_bernoulli(mu, theta, 1);
            CAPTURE(mu);
            CAPTURE(theta);
            CHECK(std::fabs(g.res.bound - closed.bound) < 1e-8);
            CHECK(std::fabs(g.res.zeta - closed.zeta) < 1e-6);
        }
    }
}

TEST_CASE("monotonicity in the horizon parameter and level") {
    double prev = 1.0;
    for (long m : {1, 2, 5, 10, 50}) {
        const double b = uniform_bound_bernoulli(0.5, 0.6, m).bound;
        CHECK(b < prev);
        prev = b;
    }
    prev = 1.0;
    for (double theta : {0.55, 0.6, 0.7, 0.8, 0.9}) {
        const double b = uniform_bound_bernoulli(0.5, theta, 10).bound;
        CHECK(b < prev);
        prev = b;
    }
}

TEST_CASE("clipping keeps reported bounds in [0, 1]") {
    // tiny deviation: the exponential bound exceeds 1 before clipping is impossible
    // here, but clipped_bound must never exceed 1 anyway
    InequalityResult r = uniform_bound_normal(0.0, 1.0, 1e-8, 1);
    CHECK(r.bound <= 1.0 + 1e-12);
    CHECK(r.clipped_bound <= 1.0);
    CHECK(r.clipped_bound >= 0.0);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(uniform_bound_bernoulli(0.0, 0.5, 1), Error);
    CHECK_THROWS_AS(uniform_bound_bernoulli(0.5, 0.4, 1), Error);
    CHECK_THROWS_AS(uniform_bound_bernoulli(0.5, 0.6, 0), Error);
    CHECK_THROWS_AS(uniform_bound_bounded_variance(-1.0, 1.0, 0.5, 1), Error);
    CHECK_THROWS_AS(uniform_bound_bounded_variance(1.0, 1.0, 1.5, 1), Error);
    CHECK_THROWS_AS(uniform_bound_normal(0.0, -1.0, 1.0, 1), Error);
    CHECK_THROWS_AS(uniform_bound_poisson(-1.0, 1.0, 1), Error);
    CHECK_THROWS_AS(uniform_bound_poisson(2.0, 1.0, 1), Error);

    CumulantSpec c = bernoulli_cumulant(0.5);
    try {
        chernoff_inf(c, 2.0);  // beyond any admissible slope
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EpsOutOfRange);
    }
}

TEST_CASE("asymptotic check approaches the gaussian rate") {
    CumulantSpec c;
    c.phi = parse("ln((exp(x1/2)+exp(-x1/2))/2)", 1);
    c.a = -6.0;
    c.b = 6.0;
    std::vector<AsymptoticReport> reps = asymptotic_check(c, 0.25, 0.0, {0.1, 0.05, 0.025});
    REQUIRE(reps.size() == 3);
    double prev_gap = 1.0;
    for (const AsymptoticReport& r : reps) {
        const double gap = std::fabs(r.rate - r.gaussian_rate);
        CHECK(gap < prev_gap);
        CHECK(r.gaussian_rate == doctest::Approx(-r.epsilon * r.epsilon / 0.5).epsilon(1e-12));
        prev_gap = gap;
    }
}
