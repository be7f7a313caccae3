#pragma once

#include <vector>

#include "wcbound/model.hpp"

namespace wcb {

// A cumulant upper bound phi(s) (phi(0) = 0 expected) on an open domain
// (a, b) with a < 0 < b, or (0, b). Convexity is checked numerically on a
// dense grid at evaluation time.
struct CumulantSpec {
    ExprPtr phi;  // expression in the single variable x1 = s
    double a = 0.0;
    double b = 0.0;
};

struct ChernoffResult {
    InequalityResult res;       // res.zeta = minimizer, res.rate = phi(z)-eps*z
    double phi_over_zeta = 0.0; // boundary-slope quantity phi(zeta)/zeta
};

// inf over s in (a,b) of exp(phi(s) - eps*s), located by golden-section search
// refined by bisection on the central-difference derivative sign (tolerance
// 1e-12 on s). Throws Error{EpsOutOfRange} when eps is not strictly between
// the secant slopes phi(s)/s at the domain edges (shrunk by 1e-9 relative),
// Error{NonconvexPhi} when the grid convexity check fails, and propagates
// Error{DomainError} from phi.
ChernoffResult chernoff_inf(const CumulantSpec& c, double eps);

// Closed-form uniform bounds for sums of m samples. Each returns
// bound = exp(m * rate) with the per-sample rate, plus the optimizer zeta.
//
// Bernoulli mean mu in (0,1), threshold theta in (mu, 1):
//   zeta = ln(theta(1-mu)/(mu(1-theta)))
//   rate = theta ln(mu/theta) + (1-theta) ln((1-mu)/(1-theta))
InequalityResult uniform_bound_bernoulli(double mu, double theta, long m);

// Zero-mean samples bounded above by b with variance proxy nu, threshold
// eps in (0, b]:
//   zeta = (b/(b^2+nu)) ln((1+eps*b/nu)/(1-eps/b))
//   rate = [-(nu+b*eps) ln(1+b*eps/nu) - (b^2-b*eps) ln(1-eps/b)]/(b^2+nu)
// At eps = b the 0^0 factor takes its limit value 1 (rate = -ln(1+b^2/nu),
// zeta = +infinity).
InequalityResult uniform_bound_bounded_variance(double b, double nu, double eps, long m);

// Normal(mu, nu), threshold theta >= mu:
//   zeta = (theta-mu)/nu, rate = -(theta-mu)^2/(2 nu)
InequalityResult uniform_bound_normal(double mu, double nu, double theta, long m);

// Poisson(lambda), threshold theta >= lambda:
//   zeta = ln(theta/lambda), rate = theta - lambda + theta ln(lambda/theta)
InequalityResult uniform_bound_poisson(double lambda, double theta, long m);

// Diagnostic report comparing the exact Chernoff exponent with its Gaussian
// small-deviation limit.
struct AsymptoticReport {
    double epsilon = 0.0;
    double zeta = 0.0;
    double rate = 0.0;
    double gaussian_rate = 0.0;   // -eps^2/(2 sigma2)
    double ratio_phi_zeta = 0.0;  // phi(zeta)/zeta
    double sigma2 = 0.0;
    double nu = 0.0;              // third central moment, caller supplied
};

std::vector<AsymptoticReport> asymptotic_check(const CumulantSpec& c, double sigma2, double nu,
                                               const std::vector<double>& eps_list);

} // namespace wcb
