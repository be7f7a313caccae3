#include "doctest.h"

#include <cmath>
#include <vector>

#include "wcbound/error.hpp"
#include "wcbound/expr.hpp"
#include "wcbound/model.hpp"
#include "wcbound/rng.hpp"

using namespace wcb;

namespace {

ErrorCode thrown_code(const char* text, int dim) {
    try {
        parse(text, dim);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

} // namespace

TEST_CASE("parse and evaluate basics") {
    ExprPtr e = parse("2*x1 + x2^2 - 1", 2);
    CHECK(eval_point(e, {3.0, 2.0}) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(max_var(e) == 2);

    CHECK(eval_point(parse("min(x1, 2, -x1)", 1), {1.5}) == -1.5);
    CHECK(eval_point(parse("max(x1, 2, -x1)", 1), {1.5}) == 2.0);
    CHECK(eval_point(parse("abs(0 - x1)", 1), {2.5}) == 2.5);
    CHECK(eval_point(parse("exp(ln(x1))", 1), {4.0}) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(eval_point(parse("-x1 + 5", 1), {2.0}) == 3.0);
    CHECK(eval_point(parse("x1/4", 1), {2.0}) == 0.5);
}

TEST_CASE("integer power is exact repeated multiplication") {
    const double b = 1.0000001;
    CHECK(eval_point(parse("x1^2", 1), {b}) == b * b);
    CHECK(eval_point(parse("x1^3", 1), {b}) == b * b * b);
    CHECK(eval_point(parse("x1^0", 1), {0.0}) == 1.0);
}

TEST_CASE("parse errors carry the right codes") {
    CHECK(thrown_code("min(x1,", 1) == ErrorCode::SyntaxError);
    CHECK(thrown_code("1 + ", 1) == ErrorCode::SyntaxError);
    CHECK(thrown_code("(x1", 1) == ErrorCode::SyntaxError);
    CHECK(thrown_code("x1 x2", 2) == ErrorCode::SyntaxError);
    CHECK(thrown_code("x3", 2) == ErrorCode::UnknownIdentifier);
    CHECK(thrown_code("foo(x1)", 1) == ErrorCode::UnknownIdentifier);
    CHECK(thrown_code("exp(x1, x1)", 1) == ErrorCode::ArityError);
    CHECK(thrown_code("ln(x1, x1)", 1) == ErrorCode::ArityError);
    CHECK(thrown_code("min()", 1) == ErrorCode::SyntaxError);

    try {
        parse("1 + @", 1);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SyntaxError);
        CHECK(e.offset() == 4);
    }
}

TEST_CASE("render round-trips to a structurally equal tree") {
    const char* samples[] = {
        "2*x1 + x2^2 - 1",
        "min(x1, max(x2, 0 - x1), 3.5)",
        "exp(-x1) * ln(x2 + 2)",
        "abs(x1 - x2)/(1 + x1^4)",
        "-(x1 + x2)^3",
        "1.25e-3 * x1 - 7",
    };
    for (const char* s : samples) {
        ExprPtr a = parse(s, 2);
        ExprPtr b = parse(render(a), 2);
        CAPTURE(s);
        CHECK(expr_equal(a, b));
        RngStream rng(11, 0);
        for (int i = 0; i < 20; ++i) {
            std::vector<double> x{rng.next_uniform(-1.5, 1.5), rng.next_uniform(0.1, 1.5)};
            CHECK(eval_point(a, x) == eval_point(b, x));
        }
    }
}

TEST_CASE("interval evaluation contains point evaluations") {
    const char* samples[] = {
        "x1^2 - x2*x1 + 3",
        "min(x1, x2) * max(x1, -x2)",
        "exp(x1 - x2)",
        "abs(x1) + x2^3",
        "(x1 + 2.5)/(x2 + 3)",
    };
    RngStream rng(17, 0);
    for (const char* s : samples) {
        ExprPtr e = parse(s, 2);
        for (int rep = 0; rep < 30; ++rep) {
            BoxRegion box;
            for (int j = 0; j < 2; ++j) {
                const double a = rng.next_uniform(-2.0, 2.0);
                const double w = rng.next_uniform(0.0, 1.5);
                box.lower.push_back(a);
                box.upper.push_back(a + w);
            }
            const Interval iv = eval_interval(e, box);
            CHECK(iv.lo <= iv.hi);
            for (int p = 0; p < 16; ++p) {
                std::vector<double> x;
                for (int j = 0; j < 2; ++j)
                    x.push_back(rng.next_uniform(box.lower[j], box.upper[j]));
                const double v = eval_point(e, x);
                CAPTURE(s);
                CHECK(v >= iv.lo - 1e-12);
                CHECK(v <= iv.hi + 1e-12);
            }
        }
    }
}

TEST_CASE("evaluation domain errors") {
    CHECK_THROWS_AS(eval_point(parse("ln(x1)", 1), {-1.0}), Error);
    CHECK_THROWS_AS(eval_point(parse("x1/(x1 - 1)", 1), {1.0}), Error);
}

TEST_CASE("finite-difference gradient matches analytic derivative") {
    ExprPtr e = parse("x1^2 + 3*x1*x2", 2);
    std::vector<double> gr = grad_fd(e, {1.5, -0.5});
    CHECK(gr[0] == doctest::Approx(2.0 * 1.5 + 3.0 * -0.5).epsilon(1e-5));
    CHECK(gr[1] == doctest::Approx(3.0 * 1.5).epsilon(1e-5));
}
