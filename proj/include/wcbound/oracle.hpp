#pragma once

#include <cstdint>

#include "wcbound/model.hpp"

namespace wcb {

// Sample families used by the Monte Carlo verification oracles. Scalar
// families produce real samples; SphereUniform and BallUniform produce
// vectors in R^dim and the running sum is compared through its norm.
enum class Family {
    Bernoulli,     // {0, 1} with success probability p
    CenteredCoin,  // +-1/2 with probability 1/2 each
    Normal,        // mean mu, variance nu
    Poisson,       // rate lambda
    SphereUniform, // uniform on the unit sphere in R^dim
    BallUniform,   // uniform in the unit ball in R^dim
    GoldenZ        // two-point golden law
};

struct SamplerSpec {
    Family family = Family::Bernoulli;
    double p = 0.5;       // Bernoulli
    double mu = 0.0;      // Normal
    double nu = 1.0;      // Normal
    double lambda = 1.0;  // Poisson
    int dim = 2;          // SphereUniform / BallUniform
    long n = 1;           // samples per replicate (the horizon for mc_tail)
    long reps = 1;
    std::uint64_t seed = 0;
};

// Throws Error{ParamOutOfRange} when a field is out of domain.
void validate_spec(const SamplerSpec& spec);

struct McEstimate {
    double p_hat = 0.0;
    double stderr_est = 0.0;  // sqrt(p_hat (1 - p_hat) / reps)
    long reps = 0;
};

// Exhaustive verification of a worst-case problem: enumerate all support-point
// combinations of size <= k+1 on a uniform grid over A (resolution points per
// axis), solve the theta-LP for each, return the maximum (0 when nothing is
// feasible). Guards: d <= 2, k <= 2, resolution <= 101, and the total number
// of combinations <= 2e6; Error{TooLarge} beyond.
double grid_bruteforce(const MomentProblem& p, int resolution);

// Pr{S_n >= n * threshold_per_sample} over spec.reps independent replicates
// (||S_n|| for vector families). Deterministic given spec.seed: replicate r
// always draws from stream (seed, r), whatever the thread count.
McEstimate mc_tail(const SamplerSpec& spec, double threshold_per_sample, int threads = 1);

// Probability that the path crosses the boundary at ANY time 1 <= j <=
// horizon: S_j >= boundary(j) (||S_j|| >= boundary(j) for vector families).
// `boundary` is an expression in x1 = j, precomputed once per call. A
// truncated lower estimate of the corresponding all-time crossing
// probability, which is the conservative direction for dominance testing.
// spec.n is ignored in favor of `horizon`.
McEstimate mc_sup_crossing(const SamplerSpec& spec, const ExprPtr& boundary, long horizon,
                           int threads = 1);

} // namespace wcb
