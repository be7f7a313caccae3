#include "doctest.h"

#include <cmath>

#include "wcbound/error.hpp"
#include "wcbound/expr.hpp"
#include "wcbound/vecbounds.hpp"

using namespace wcb;

namespace {

// reference values pinned from high-precision evaluation
constexpr double kMgfE10 = 0.56807572748274974;
constexpr double kMgfT = 0.50111769380084217;
constexpr double kIid2em4 = 0.036631277777468361;
constexpr double kIid2em04 = 1.3406400920712786;
constexpr double kCompRadius = 0.32465246735834973;
constexpr double kCompRange = 0.97609047214037028;
constexpr double kVr1a = 0.32963239294616019;
constexpr double kVr2a = 0.36446001532900882;
constexpr double kVr3a = 0.38598981486215426;
constexpr double kVr1b = 0.015318623380669569;
constexpr double kVr2b = 0.022109970464316681;
constexpr double kVr3b = 0.034492196918627897;
constexpr double kSmallDev = 0.37409480600844810;

} // namespace

TEST_CASE("golden distribution identities") {
    GoldenDistribution g;
    CHECK(g.phi == doctest::Approx(1.6180339887498949).epsilon(1e-16));
    CHECK(g.p_plus + g.p_minus == doctest::Approx(1.0).epsilon(1e-16));
    CHECK(g.p_plus * g.value_plus + g.p_minus * g.value_minus ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-16));
    CHECK(g.value_plus - g.value_minus == doctest::Approx(std::sqrt(5.0)).epsilon(1e-16));
    // phi is a fixed point: phi^2 = phi + 1
    CHECK(g.phi * g.phi == doctest::Approx(g.phi + 1.0).epsilon(1e-15));
}

TEST_CASE("golden moments are the fibonacci numbers") {
    CHECK(std::fabs(golden_moment(1)) < 1e-15);
    CHECK(golden_moment(2) == doctest::Approx(1.0).epsilon(1e-14));
    double fib_prev = 1.0, fib = 1.0;  // F(1), F(2)
    for (int k = 3; k <= 20; ++k) {
        // entering iteration k, fib holds F(k - 1) = E[Z^k]
        CHECK(golden_moment(k) == doctest::Approx(fib).epsilon(1e-12));
        const double next = fib + fib_prev;
        fib_prev = fib;
        fib = next;
    }
    CHECK(golden_moment(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(golden_moment(-1), Error);
}

TEST_CASE("mgf vector bound reference value") {
    InequalityResult r = mgf_vector_bound(parse("exp(x1)", 1), 5.0, 0.5, 10);
    CHECK(r.bound == doctest::Approx(kMgfE10).epsilon(1e-9));
    CHECK(r.zeta == doctest::Approx(kMgfT).epsilon(1e-6));
    CHECK_THROWS_AS(mgf_vector_bound(parse("exp(x1)", 1), -1.0, 0.5, 10), Error);
}

TEST_CASE("iid bounded bound reference values and clipping") {
    InequalityResult a = iid_bounded_bound(1.0, 10, 1.0);  // 2 e^{-4}
    CHECK(a.bound == doctest::Approx(kIid2em4).epsilon(1e-12));
    InequalityResult b = iid_bounded_bound(1.0, 10, 0.316227766016837933);  // eps^2 = 0.1
    CHECK(b.bound == doctest::Approx(kIid2em04).epsilon(1e-9));
    CHECK(b.clipped_bound == 1.0);
    CHECK(v_from_radii({1.0, 3.0}) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(v_from_diameters({2.0, 2.0}) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("martingale bound equals iid bound for equal unit steps") {
    // n unit steps: sum c_i^2 = n, total deviation n*eps
    const long n = 16;
    const double eps = 0.5;
    InequalityResult m = martingale_bound(std::vector<double>(n, 1.0), n * eps);
    InequalityResult i = iid_bounded_bound(1.0, n, eps);
    CHECK(m.bound == doctest::Approx(i.bound).epsilon(1e-12));
}

TEST_CASE("componentwise bounds reference values") {
    InequalityResult r1 = componentwise_tail_radius({1.0}, 0.25, 1.0);
    CHECK(r1.bound == doctest::Approx(kCompRadius).epsilon(1e-12));
    InequalityResult r2 = componentwise_tail_range({{-1.0, 1.0}}, 1.2);
    CHECK(r2.bound == doctest::Approx(kCompRange).epsilon(1e-12));
    CHECK_THROWS_AS(componentwise_tail_radius({}, 1.0, 1.0), Error);
}

TEST_CASE("variance-range tiers are ordered and match references") {
    VarianceRangeBound a = variance_range_bound(0.5, 1.0, 100, 0.1);
    CHECK(a.tier1 == doctest::Approx(kVr1a).epsilon(1e-9));
    CHECK(a.tier2 == doctest::Approx(kVr2a).epsilon(1e-9));
    CHECK(a.tier3 == doctest::Approx(kVr3a).epsilon(1e-9));
    VarianceRangeBound b = variance_range_bound(1.0, 2.0, 50, 0.5);
    CHECK(b.tier1 == doctest::Approx(kVr1b).epsilon(1e-9));
    CHECK(b.tier2 == doctest::Approx(kVr2b).epsilon(1e-9));
    CHECK(b.tier3 == doctest::Approx(kVr3b).epsilon(1e-9));
    for (const VarianceRangeBound* vr : {&a, &b}) {
        CHECK(vr->tier1 <= vr->tier2 + 1e-9);
        CHECK(vr->tier2 <= vr->tier3 + 1e-9);
        CHECK(vr->t_opt > 0.0);
        CHECK_FALSE(vr->zero_probability);
    }
    VarianceRangeBound z = variance_range_bound(0.5, 1.0, 10, 1.5);  // eps above the norm bound
    CHECK(z.zero_probability);
}

TEST_CASE("small deviation bound reference and domain guard") {
    InequalityResult r = small_deviation_bound(0.1, 2.0);
    CHECK(r.bound == doctest::Approx(kSmallDev).epsilon(1e-12));
    try {
        small_deviation_bound(0.5, 2.0);  // x >= 1/(phi c_n) ~ 1.236
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::XOutOfRange);
    }
}

TEST_CASE("moment envelope: diameter and ellipsoid modes") {
    auto d = moment_envelope(3.0);
    CHECK(d.first == 3.0);
    CHECK(d.second == 4.5);

    EllipsoidSpec iso({{2.0, 0.0}, {0.0, 2.0}}, {0.0, 0.0}, 1.0, {0.0, 0.0});
    auto e = moment_envelope(iso);
    CHECK(e.first == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(e.second == doctest::Approx(0.5).epsilon(1e-9));

    CHECK_THROWS_AS(EllipsoidSpec({{1.0, 0.0}, {1.0, 0.0}}, {0.0, 0.0}, 1.0, {0.0, 0.0}), Error);
}
