#pragma once

#include <string>
#include <vector>

#include "wcbound/expr.hpp"

namespace wcb {

// Axis-aligned box in R^d. Both the support region and the moment set are
// restricted to boxes by design.
struct BoxRegion {
    std::vector<double> lower;
    std::vector<double> upper;

    int dim() const { return static_cast<int>(lower.size()); }
};

// Throws Error{EmptyBox} when malformed (lower > upper, empty, non-finite).
void validate_box(const BoxRegion& b, const char* what);

// The worst-case inference problem: distributions supported in `domain` whose
// moment vector E[f(X)] lies in `moment_set`. The event C is the sublevel set
// {x : event(x) <= 0}. The objective is either an expression g (sup E[g(X)])
// or the indicator of C (sup Pr{X in C}).
struct MomentProblem {
    BoxRegion domain;                    // A, dimension d
    std::vector<ExprPtr> moment_map;     // f_1..f_k
    std::vector<std::string> moment_src; // source text for serialization
    BoxRegion moment_set;                // B, dimension k
    ExprPtr event;                       // h; C = {h <= 0}
    std::string event_src;
    bool indicator_objective = false;    // true: sup Pr{X in C}
    ExprPtr objective;                   // g, used when !indicator_objective
    std::string objective_src;

    int d() const { return domain.dim(); }
    int k() const { return static_cast<int>(moment_map.size()); }
};

// Returns p unchanged if all invariants hold.
// Throws Error{EmptyBox, DimMismatch, BadExpr}.
MomentProblem validate_problem(const MomentProblem& p);

// JSON round-trip; schema field "v1". Layout:
// {"schema":"v1","domain":{"lower":[...],"upper":[...]},"moments":["expr",...],
//  "moment_set":{...},"event":"expr","objective":"expr"|"indicator"}
std::string problem_to_json(const MomentProblem& p);
MomentProblem problem_from_json(const std::string& text);

struct DiscreteDistribution {
    struct Point {
        std::vector<double> x;
        double w = 0.0;
    };
    std::vector<Point> points;
};

// Shared assertion routine: weights >= -1e-12 and sum to 1 within 1e-9,
// support inside p.domain (within tol), moments inside p.moment_set inflated
// by tol, point count <= k+1. Throws Error{Internal} with a description on
// violation; used by both the solver and the tests.
void check_distribution(const DiscreteDistribution& dist, const MomentProblem& p, double tol);

// Moment vector E[f(X)] of a discrete distribution under problem p.
std::vector<double> distribution_moments(const DiscreteDistribution& dist, const MomentProblem& p);

enum class CertStatus { Certified, HeuristicOnly, Infeasible };
const char* cert_status_name(CertStatus s);

// Certified bracket for a worst-case problem. `upper` is the rigorous bound
// from branch and bound; `lower` is the best feasible value found, attained by
// `witness`. For Infeasible the convention sup(empty set) = 0 applies:
// upper = lower = 0 with an empty witness.
struct BoundCertificate {
    double upper = 0.0;
    double lower = 0.0;
    DiscreteDistribution witness;
    long iterations = 0;      // gradient-search iterations + refinement rounds
    long boxes_explored = 0;  // total boxes ever created in the partition
    double tolerance_used = 0.0;
    CertStatus status = CertStatus::HeuristicOnly;
};

std::string certificate_to_json(const BoundCertificate& c);
BoundCertificate certificate_from_json(const std::string& text);

// Result of a closed-form inequality evaluator.
//   rate  — per-sample exponent: bound = prefactor * exp(m * rate), where the
//           prefactor is 1 for Chernoff-type bounds and 2 for the two-sided
//           vector bounds (documented per evaluator).
//   zeta  — inner optimizer of the exponent where one exists (the Chernoff
//           parameter, or the argmin t of an inf-over-t bound), else 0.
struct InequalityResult {
    double bound = 0.0;
    double zeta = 0.0;
    double rate = 0.0;
    double clipped_bound = 0.0; // min(1, bound)
};

InequalityResult make_result(double bound, double zeta, double rate);

} // namespace wcb
