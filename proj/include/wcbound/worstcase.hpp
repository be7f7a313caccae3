#pragma once

#include <cstdint>

#include "wcbound/model.hpp"

namespace wcb {

struct SolverSettings {
    int multistarts = 64;       // gradient-search starts (low-discrepancy seeds)
    int gradient_iters = 200;   // iteration cap per start
    double gradient_tol = 1e-8; // stop when improvement stalls below this
    double bnb_tol = 1e-5;      // absolute certification gap target
    long bnb_max_boxes = 200000;
    std::uint64_t seed = 0;
    int threads = 1;            // multistart worker count; results independent of it
};

// Throws Error{ParamOutOfRange}.
void validate_settings(const SolverSettings& s);

// Interval sign of the event expression h over a sub-box of the domain.
enum class BoxTag {
    InsideC,   // eval_interval(h, box).hi <= 0: box fully inside C
    OutsideC,  // eval_interval(h, box).lo  > 0: box fully outside C
    Mixed      // straddles (or interval evaluation failed: conservative)
};

// sup E[g(X)] over distributions supported in p.domain with moments in
// p.moment_set. Requires an expression objective (p.indicator_objective
// false). `lower` comes from multistart projected-gradient search over k+1
// support locations (inner LP for the weights at every step) consolidated by
// a pooled LP over all visited candidates; `upper` from a branch-and-bound
// interval relaxation solved by column generation, valid at every partition.
// status: Certified when upper - lower <= bnb_tol; Infeasible (with
// upper = lower = 0 and an empty witness, the sup-over-empty-set convention)
// when the relaxation proves no distribution meets the moment constraints.
// Throws Error{BadExpr} on objective kind mismatch; Error{DomainError} when
// g or f lack finite interval enclosures on the domain.
BoundCertificate sup_expectation(const MomentProblem& p, const SolverSettings& s);

// sup Pr{X in C}, C = {h <= 0}, over the same family. Requires
// p.indicator_objective true. Same machinery with the objective coefficient
// of a support point y equal to 1{h(y) <= 0}; the relaxation counts a box as
// potentially-in-C unless its tag is OutsideC. The search organizes starts by
// the number i of points placed inside C (the P_i programs), enforcing
// membership by rejection and boundary bisection; the reported value is the
// max over i. Strict exterior membership (h > 0) is relaxed to h >= 0, which
// can only enlarge the feasible set, so upper bounds remain valid.
// Short-circuit: if eval_interval(h, domain).lo > 0 the event is empty and
// the certificate is an immediate 0 (with a feasibility witness when one is
// found). upper is clamped to [0, 1].
BoundCertificate sup_probability(const MomentProblem& p, const SolverSettings& s);

} // namespace wcb
