#include "wcbound/chernoff.hpp"

#include <cmath>
#include <limits>

#include "wcbound/minimize.hpp"

namespace wcb {

namespace {

double phi_at(const CumulantSpec& c, double s) {
    return eval_point(c.phi, {s});
}

void check_convexity(const CumulantSpec& c) {
    // 512-point grid on the (slightly shrunk) domain; second differences of a
    // convex function are nonnegative, allow -1e-8 of numerical slack
    const int N = 512;
    const double shrink = 1e-9 * (c.b - c.a);
    const double a = c.a + shrink, b = c.b - shrink;
    const double step = (b - a) / (N - 1);
    double prev2 = phi_at(c, a);
    double prev1 = phi_at(c, a + step);
    for (int i = 2; i < N; ++i) {
        const double cur = phi_at(c, a + i * step);
        if (cur - 2.0 * prev1 + prev2 < -1e-8)
            throw Error(ErrorCode::NonconvexPhi,
                        "cumulant fails the grid convexity check near s = " +
                            std::to_string(a + (i - 1) * step));
        prev2 = prev1;
        prev1 = cur;
    }
}

} // namespace

ChernoffResult chernoff_inf(const CumulantSpec& c, double eps) {
    if (!(c.a < c.b) || c.a > 0.0 || !(c.b > 0.0))
        throw Error(ErrorCode::ParamOutOfRange, "cumulant domain must satisfy a <= 0 < b");
    check_convexity(c);

    const double shrink = 1e-9 * (c.b - c.a);
    const double lo = c.a + shrink, hi = c.b - shrink;
    // admissible eps range: strictly between the secant slopes at the edges
    const double slope_lo = phi_at(c, lo) / lo;
    const double slope_hi = phi_at(c, hi) / hi;
    if (!(eps > slope_lo) || !(eps < slope_hi))
        throw Error(ErrorCode::EpsOutOfRange,
                    "eps = " + std::to_string(eps) + " outside the admissible range (" +
                        std::to_string(slope_lo) + ", " + std::to_string(slope_hi) + ")");

    auto objective = [&](double s) { return phi_at(c, s) - eps * s; };
    Min1D m = golden_section_min(objective, lo, hi, 1e-12);
    double zeta = refine_by_derivative_sign(objective, m.x, lo, hi, 1e-13);
    double rate = objective(zeta);
    if (m.fx < rate) { zeta = m.x; rate = m.fx; }

    ChernoffResult out;
    out.res = make_result(std::exp(rate), zeta, rate);
    out.phi_over_zeta = zeta != 0.0 ? phi_at(c, zeta) / zeta : eps;
    return out;
}

InequalityResult uniform_bound_bernoulli(double mu, double theta, long m) {
    if (!(mu > 0.0) || !(mu < 1.0))
        throw Error(ErrorCode::ParamOutOfRange, "mu must lie in (0,1)");
    if (!(theta > mu) || !(theta < 1.0))
        throw Error(ErrorCode::ParamOutOfRange, "theta must lie in (mu, 1)");
    if (m < 1) throw Error(ErrorCode::ParamOutOfRange, "m must be >= 1");
    const double zeta = std::log(theta * (1.0 - mu) / (mu * (1.0 - theta)));
    const double rate = theta * std::log(mu / theta) + (1.0 - theta) * std::log((1.0 - mu) / (1.0 - theta));
    return make_result(std::exp(static_cast<double>(m) * rate), zeta, rate);
}

InequalityResult uniform_bound_bounded_variance(double b, double nu, double eps, long m) {
    if (!(b > 0.0) || !(nu > 0.0))
        throw Error(ErrorCode::ParamOutOfRange, "require b > 0 and nu > 0");
    if (!(eps > 0.0) || eps > b)
        throw Error(ErrorCode::ParamOutOfRange, "require 0 < eps <= b");
    if (m < 1) throw Error(ErrorCode::ParamOutOfRange, "m must be >= 1");
    double zeta, rate;
    if (eps == b) {
        // limit of the closed form as eps -> b: the (1 - eps/b)^0 factor is 1
        zeta = std::numeric_limits<double>::infinity();
        rate = -std::log(1.0 + b * b / nu);
    } else {
        zeta = (b / (b * b + nu)) * std::log((1.0 + eps * b / nu) / (1.0 - eps / b));
        rate = (-(nu + b * eps) * std::log(1.0 + b * eps / nu) -
                (b * b - b * eps) * std::log(1.0 - eps / b)) /
               (b * b + nu);
    }
    return make_result(std::exp(static_cast<double>(m) * rate), zeta, rate);
}

InequalityResult uniform_bound_normal(double mu, double nu, double theta, long m) {
    if (!(nu > 0.0)) throw Error(ErrorCode::ParamOutOfRange, "nu must be > 0");
    if (theta < mu) throw Error(ErrorCode::ParamOutOfRange, "theta must be >= mu");
    if (m < 1) throw Error(ErrorCode::ParamOutOfRange, "m must be >= 1");
    const double zeta = (theta - mu) / nu;
    const double rate = -(theta - mu) * (theta - mu) / (2.0 * nu);
    return make_result(std::exp(static_cast<double>(m) * rate), zeta, rate);
}

InequalityResult uniform_bound_poisson(double lambda, double theta, long m) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::ParamOutOfRange, "lambda must be > 0");
    if (theta < lambda) throw Error(ErrorCode::ParamOutOfRange, "theta must be >= lambda");
    if (m < 1) throw Error(ErrorCode::ParamOutOfRange, "m must be >= 1");
    const double zeta = std::log(theta / lambda);
    const double rate = theta - lambda + theta * std::log(lambda / theta);
    return make_result(std::exp(static_cast<double>(m) * rate), zeta, rate);
}

std::vector<AsymptoticReport> asymptotic_check(const CumulantSpec& c, double sigma2, double nu,
                                               const std::vector<double>& eps_list) {
    if (!(sigma2 > 0.0)) throw Error(ErrorCode::ParamOutOfRange, "sigma2 must be > 0");
    std::vector<AsymptoticReport> out;
    out.reserve(eps_list.size());
    for (double eps : eps_list) {
        ChernoffResult r = chernoff_inf(c, eps);
        AsymptoticReport rep;
        rep.epsilon = eps;
        rep.zeta = r.res.zeta;
        rep.rate = r.res.rate;
        rep.gaussian_rate = -eps * eps / (2.0 * sigma2);
        rep.ratio_phi_zeta = r.phi_over_zeta;
        rep.sigma2 = sigma2;
        rep.nu = nu;
        out.push_back(rep);
    }
    return out;
}

} // namespace wcb
