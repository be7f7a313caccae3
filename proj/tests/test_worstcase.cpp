#include "doctest.h"

#include <cmath>

#include "wcbound/error.hpp"
#include "wcbound/expr.hpp"
#include "wcbound/model.hpp"
#include "wcbound/routh.hpp"
#include "wcbound/worstcase.hpp"

using namespace wcb;

namespace {

MomentProblem markov_problem() {
    MomentProblem p;
    p.domain = {{0.0}, {1.0}};
    p.moment_map = {parse("x1", 1)};
    p.moment_src = {"x1"};
    p.moment_set = {{0.5}, {0.5}};
    p.event = parse("0.9 - x1", 1);
    p.event_src = "0.9 - x1";
    p.indicator_objective = true;
    p.objective_src = "indicator";
    return validate_problem(p);
}

SolverSettings fast_settings() {
    SolverSettings st;
    st.multistarts = 16;
    st.seed = 1;
    return st;
}

} // namespace

TEST_CASE("markov problem certified near 5/9 with feasible witness") {
    BoundCertificate c = sup_probability(markov_problem(), fast_settings());
    CHECK(c.status == CertStatus::Certified);
    CHECK(c.lower <= c.upper);
    CHECK(c.upper == doctest::Approx(5.0 / 9.0).epsilon(1e-3));
    CHECK(c.upper - c.lower <= 1e-5 + 1e-12);
    CHECK_NOTHROW(check_distribution(c.witness, markov_problem(), 1e-8));
}

TEST_CASE("expectation toy: sup E[x^2] with mean pinned at 1/2 is 1/2") {
    MomentProblem p = markov_problem();
    p.indicator_objective = false;
    p.objective = parse("x1^2", 1);
    p.objective_src = "x1^2";
    p = validate_problem(p);
    BoundCertificate c = sup_expectation(p, fast_settings());
    CHECK(c.upper == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(c.lower <= c.upper);
    CHECK(c.lower >= 0.5 - 1e-3);
}

TEST_CASE("upper bound is monotone in the moment box") {
    double prev = -1.0;
    for (double delta : {0.0, 0.1, 0.2}) {
        MomentProblem p = markov_problem();
        p.moment_set = {{0.5 - delta}, {0.5 + delta}};
        p = validate_problem(p);
        BoundCertificate c = sup_probability(p, fast_settings());
        CHECK(c.upper >= prev - 1e-9);
        prev = c.upper;
    }
}

TEST_CASE("infeasible moment constraints are detected") {
    MomentProblem p = markov_problem();
    p.moment_set = {{2.0}, {3.0}};  // impossible on [0, 1]
    p = validate_problem(p);
    BoundCertificate c = sup_probability(p, fast_settings());
    CHECK(c.status == CertStatus::Infeasible);
    CHECK(c.upper == 0.0);
    CHECK(c.lower == 0.0);
    CHECK(c.witness.points.empty());
}

TEST_CASE("empty event yields a certified zero instantly") {
    MomentProblem p = markov_problem();
    p.event = parse("x1 + 1", 1);  // always positive: event never occurs
    p.event_src = "x1 + 1";
    p = validate_problem(p);
    BoundCertificate c = sup_probability(p, fast_settings());
    CHECK(c.status == CertStatus::Certified);
    CHECK(c.upper == 0.0);
    CHECK(c.lower == 0.0);
    CHECK_FALSE(c.witness.points.empty());
    CHECK(c.boxes_explored == 0);
}

TEST_CASE("two-dimensional cantelli-style problem brackets 1/3") {
    // X in [-1, 2]^2 with E[X] = 0, E[|X|^2] <= 1: Pr{x1 + x2 >= 2}.
    // The event is the sublevel set {h <= 0}, so h = 2 - x1 - x2.
    MomentProblem p;
    p.domain = {{-1.0, -1.0}, {2.0, 2.0}};
    p.moment_map = {parse("x1", 2), parse("x2", 2), parse("x1^2 + x2^2", 2)};
    p.moment_src = {"x1", "x2", "x1^2 + x2^2"};
    p.moment_set = {{0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
    p.event = parse("2 - x1 - x2", 2);
    p.event_src = "2 - x1 - x2";
    p.indicator_objective = true;
    p.objective_src = "indicator";
    p = validate_problem(p);
    SolverSettings st = fast_settings();
    st.bnb_tol = 1e-2;
    BoundCertificate c = sup_probability(p, st);
    // extremal pair: weight 1/3 at (1,1) on the event boundary, weight 2/3 at
    // (-1/2,-1/2), which zeroes the mean and exhausts the second-moment budget
    CHECK(c.lower <= c.upper);
    CHECK(c.upper >= 1.0 / 3.0 - 1e-6);
    CHECK(c.upper <= 1.0 / 3.0 + 2e-2);
    CHECK(c.lower >= 1.0 / 3.0 - 2e-2);
    CHECK_NOTHROW(check_distribution(c.witness, p, 1e-8));
}

TEST_CASE("certificates are bit-identical across thread counts") {
    SolverSettings s1 = fast_settings();
    s1.threads = 1;
    SolverSettings s4 = fast_settings();
    s4.threads = 4;
    const std::string j1 = certificate_to_json(sup_probability(markov_problem(), s1));
    const std::string j4 = certificate_to_json(sup_probability(markov_problem(), s4));
    CHECK(j1 == j4);

    MomentProblem stab = build_stability_problem();
    const std::string s1j = certificate_to_json(sup_probability(stab, s1));
    const std::string s4j = certificate_to_json(sup_probability(stab, s4));
    CHECK(s1j == s4j);
}

TEST_CASE("solver settings validation") {
    SolverSettings st;
    st.multistarts = 0;
    CHECK_THROWS_AS(validate_settings(st), Error);
    st = SolverSettings{};
    st.bnb_tol = -1.0;
    CHECK_THROWS_AS(validate_settings(st), Error);
    st = SolverSettings{};
    st.threads = 0;
    CHECK_THROWS_AS(validate_settings(st), Error);
    st = SolverSettings{};
    st.bnb_max_boxes = 0;
    CHECK_THROWS_AS(validate_settings(st), Error);
}

TEST_CASE("objective/event expression requirements") {
    MomentProblem p = markov_problem();
    CHECK_THROWS_AS(sup_expectation(p, fast_settings()), Error);  // indicator objective
    p.indicator_objective = false;
    p.objective = parse("x1", 1);
    p.objective_src = "x1";
    p = validate_problem(p);
    CHECK_THROWS_AS(sup_probability(p, fast_settings()), Error);  // non-indicator
}
