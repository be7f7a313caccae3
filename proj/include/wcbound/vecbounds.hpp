#pragma once

#include <utility>
#include <vector>

#include "wcbound/model.hpp"

namespace wcb {

// The two-point zero-mean unit-variance distribution whose range U - L attains
// sqrt(5): P{Z = phi} = 1/(sqrt(5) phi), P{Z = -1/phi} = phi/sqrt(5), with
// phi the golden ratio.
struct GoldenDistribution {
    double phi;
    double p_plus;
    double p_minus;
    double value_plus;   // U = phi
    double value_minus;  // L = -1/phi
    GoldenDistribution();
};

// E[Z^k] = (phi^{k-1} + (-1)^k phi^{1-k})/sqrt(5) in closed form (these are
// the Fibonacci numbers F_{k-1}). Requires k >= 0.
double golden_moment(int k);

// Bound on the uniform crossing probability of n i.i.d. vector sums driven by
// a scalar MGF envelope g (expression in x1 = s):
//   bound = 5^{-n/2} * inf_{t in (0,tau)} e^{-n t eps} *
//           { [g(phi t)/phi + phi g(-t/phi)]^n + [g(-phi t)/phi + phi g(t/phi)]^n }
// Evaluated in log space; golden-section search guarded by a 64-point grid
// pre-scan (the grid refines locally if it beats the search by > 1e-9).
// Returns zeta = argmin t, rate = log(bound)/n.
// Throws Error{TauNonpositive}; Error{DomainError} from g.
InequalityResult mgf_vector_bound(const ExprPtr& g, double tau, double eps, int n);

// Bounded-increment bound 2 exp(-2 n eps^2 / (5 V)); prefactor 2, so
// bound = 2 exp(n * rate) with rate = -2 eps^2/(5V) and zeta = 0.
InequalityResult iid_bounded_bound(double V, long n, double eps);

double v_from_radii(const std::vector<double>& radii);       // mean r_i^2
double v_from_diameters(const std::vector<double>& diams);   // mean D_i^2

// Martingale form: 2 exp(-2 eps^2 / (5 sum c_k^2)), eps the total deviation.
InequalityResult martingale_bound(const std::vector<double>& c, double eps);

// Componentwise-independent tail exp(-2 (eps^2 - sigma2)^2 / denom):
//  - radius mode: denom = sum r_i^4, sigma2 supplied by the caller;
//  - range mode: sigma2 = sum |a_i b_i| computed internally,
//    denom = sum |b_i - a_i|^4.
// Requires eps > sqrt(sigma2): Error{EpsNotAboveSigma} otherwise.
InequalityResult componentwise_tail_radius(const std::vector<double>& radii, double sigma2,
                                           double eps);
InequalityResult componentwise_tail_range(const std::vector<std::pair<double, double>>& ranges,
                                          double eps);

// Variance + range bound for zero-mean vectors with mean square <= sigma^2 and
// norms <= r, at deviation eps of the average of n terms. tier1 <= tier2 <=
// tier3 (asserted up to 1e-9 slack); the probability is exactly 0 for eps > r.
struct VarianceRangeBound {
    double tier1 = 0.0;  // inf-over-t two-term expression (golden section)
    double tier2 = 0.0;  // closed form adjacent to the infimum
    double tier3 = 0.0;  // 2 exp(-n eps^2 / (2 (sigma^2 + phi r eps / 3)))
    double t_opt = 0.0;  // argmin of tier1
    bool zero_probability = false;
};

VarianceRangeBound variance_range_bound(double sigma, double r, long n, double eps);

// Small-deviation bound 2 exp(-(x^2/2)(1 - x phi c_n / 2)) for
// 0 < x < 1/(phi c_n); the deviation threshold is x*s_n in caller units.
// Throws Error{XOutOfRange}.
InequalityResult small_deviation_bound(double c_n, double x);

// The set {x : ||A(x - shift)|| <= c}-style ellipsoid support data used by the
// envelope below; mu is the mean of X. Construction validates invertibility
// (condition estimate < 1e12) and ||A mu + b|| <= c.
struct EllipsoidSpec {
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    double c = 0.0;
    std::vector<double> mu;
    EllipsoidSpec(std::vector<std::vector<double>> A_, std::vector<double> b_, double c_,
                  std::vector<double> mu_);
};

// Envelope (norm_bound, second_moment_bound) for ||X - mu||:
//  - diameter mode: (D, D^2/2);
//  - ellipsoid mode: (||A^-1||(c + ||A mu + b||), ||A^-1||(c^2 - ||A mu + b||^2))
//    with the spectral norm from power iteration (200 iterations, rel. 1e-10).
//    The second component deliberately carries a single power of ||A^-1||.
std::pair<double, double> moment_envelope(double D);
std::pair<double, double> moment_envelope(const EllipsoidSpec& e);

} // namespace wcb
