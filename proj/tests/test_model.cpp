#include "doctest.h"

#include <cmath>

#include "wcbound/error.hpp"
#include "wcbound/model.hpp"

using namespace wcb;

namespace {

MomentProblem sample_problem() {
    MomentProblem p;
    p.domain = {{0.0, -1.0}, {1.0, 2.0}};
    p.moment_map = {parse("x1", 2), parse("x1*x2", 2)};
    p.moment_src = {"x1", "x1*x2"};
    p.moment_set = {{0.2, -0.5}, {0.6, 0.5}};
    p.event = parse("0.5 - x1 - x2", 2);
    p.event_src = "0.5 - x1 - x2";
    p.indicator_objective = true;
    p.objective_src = "indicator";
    return p;
}

ErrorCode validate_code(const MomentProblem& p) {
    try {
        validate_problem(p);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

} // namespace

TEST_CASE("validate_problem accepts a well-formed problem") {
    CHECK_NOTHROW(validate_problem(sample_problem()));
}

TEST_CASE("validate_problem rejects malformed problems") {
    {
        MomentProblem p = sample_problem();
        p.domain.lower[0] = 2.0;  // above upper
        CHECK(validate_code(p) == ErrorCode::EmptyBox);
    }
    {
        MomentProblem p = sample_problem();
        p.moment_set.lower.pop_back();
        p.moment_set.upper.pop_back();
        CHECK(validate_code(p) == ErrorCode::DimMismatch);
    }
    {
        MomentProblem p = sample_problem();
        p.event = parse("x3", 3);  // variable beyond the domain dimension
        CHECK(validate_code(p) == ErrorCode::BadExpr);
    }
    {
        MomentProblem p = sample_problem();
        p.event = nullptr;
        CHECK(validate_code(p) == ErrorCode::BadExpr);
    }
    {
        MomentProblem p = sample_problem();
        p.indicator_objective = false;  // expectation problems need an objective
        CHECK(validate_code(p) == ErrorCode::BadExpr);
    }
}

TEST_CASE("problem JSON round-trip preserves structure") {
    MomentProblem p = validate_problem(sample_problem());
    MomentProblem q = problem_from_json(problem_to_json(p));
    CHECK(q.domain.lower == p.domain.lower);
    CHECK(q.domain.upper == p.domain.upper);
    CHECK(q.moment_set.lower == p.moment_set.lower);
    CHECK(q.moment_set.upper == p.moment_set.upper);
    REQUIRE(q.moment_map.size() == p.moment_map.size());
    for (std::size_t i = 0; i < p.moment_map.size(); ++i)
        CHECK(expr_equal(q.moment_map[i], p.moment_map[i]));
    CHECK(expr_equal(q.event, p.event));
    CHECK(q.indicator_objective == p.indicator_objective);
}

TEST_CASE("certificate JSON round-trip") {
    BoundCertificate c;
    c.upper = 0.25;
    c.lower = 0.2475;
    c.witness.points = {{{0.1, 0.2}, 0.75}, {{0.9, -0.5}, 0.25}};
    c.iterations = 321;
    c.boxes_explored = 17;
    c.tolerance_used = 1e-5;
    c.status = CertStatus::Certified;
    BoundCertificate d = certificate_from_json(certificate_to_json(c));
    CHECK(d.upper == c.upper);
    CHECK(d.lower == c.lower);
    CHECK(d.iterations == c.iterations);
    CHECK(d.boxes_explored == c.boxes_explored);
    CHECK(d.tolerance_used == c.tolerance_used);
    CHECK(d.status == c.status);
    REQUIRE(d.witness.points.size() == 2);
    CHECK(d.witness.points[0].x == c.witness.points[0].x);
    CHECK(d.witness.points[1].w == c.witness.points[1].w);
}

TEST_CASE("check_distribution accepts a valid witness and rejects bad ones") {
    MomentProblem p = validate_problem(sample_problem());
    DiscreteDistribution good;
    good.points = {{{0.0, 0.5}, 0.5}, {{0.8, -0.5}, 0.5}};
    // moments: E[x1] = 0.4 in [0.2,0.6]; E[x1 x2] = 0.5*0 + 0.5*(-0.4) = -0.2 in [-0.5,0.5]
    CHECK_NOTHROW(check_distribution(good, p, 1e-9));

    DiscreteDistribution bad_mass = good;
    bad_mass.points[0].w = 0.4;
    CHECK_THROWS_AS(check_distribution(bad_mass, p, 1e-9), Error);

    DiscreteDistribution bad_support = good;
    bad_support.points[0].x = {-0.5, 0.5};
    CHECK_THROWS_AS(check_distribution(bad_support, p, 1e-9), Error);

    DiscreteDistribution bad_moment = good;
    bad_moment.points = {{{1.0, 2.0}, 1.0}};  // E[x1] = 1 outside [0.2, 0.6]
    CHECK_THROWS_AS(check_distribution(bad_moment, p, 1e-9), Error);

    DiscreteDistribution too_many = good;
    too_many.points = {{{0.0, 0.0}, 0.25},
                       {{0.1, 0.0}, 0.25},
                       {{0.725, 0.0}, 0.25},
                       {{0.775, 0.0}, 0.25}};  // k+1 = 3 < 4 support points
    CHECK_THROWS_AS(check_distribution(too_many, p, 1e-9), Error);

    DiscreteDistribution negative = good;
    negative.points[0].w = -0.1;
    negative.points[1].w = 1.1;
    CHECK_THROWS_AS(check_distribution(negative, p, 1e-9), Error);
}
