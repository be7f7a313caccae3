#include "wcbound/vecbounds.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "wcbound/error.hpp"
#include "wcbound/expr.hpp"
#include "wcbound/minimize.hpp"

namespace wcb {

namespace {

constexpr double kPhi = 1.6180339887498948482;  // (1 + sqrt 5)/2
constexpr double kSqrt5 = 2.2360679774997896964;

double require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::ParamOutOfRange, std::string(what) + " must be positive and finite");
    }
    return v;
}

// log(e^a + e^b) without overflow.
double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

} // namespace

GoldenDistribution::GoldenDistribution()
    : phi(kPhi),
      p_plus(1.0 / (kSqrt5 * kPhi)),
      p_minus(kPhi / kSqrt5),
      value_plus(kPhi),
      value_minus(-1.0 / kPhi) {}

double golden_moment(int k) {
    if (k < 0) throw Error(ErrorCode::ParamOutOfRange, "golden_moment: k must be >= 0");
    // (phi^{k-1} + (-1)^k phi^{1-k}) / sqrt(5): integers for all k (Fibonacci
    // F_{k-1} with F_{-1} = 1), so round to kill representation noise.
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    const double v = (std::pow(kPhi, k - 1) + sgn * std::pow(kPhi, 1 - k)) / kSqrt5;
    return std::round(v);
}

InequalityResult mgf_vector_bound(const ExprPtr& g, double tau, double eps, int n) {
    if (!g) throw Error(ErrorCode::BadExpr, "mgf_vector_bound: null expression");
    if (max_var(g) > 1) {
        throw Error(ErrorCode::BadExpr, "mgf_vector_bound: g must be univariate (x1 only)");
    }
    if (!(tau > 0.0)) throw Error(ErrorCode::TauNonpositive, "mgf_vector_bound: tau must be > 0");
    require_positive(eps, "eps");
    if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "mgf_vector_bound: n must be >= 1");

    auto g_at = [&g](double s) {
        std::vector<double> x{s};
        const double v = eval_point(g, x);
        if (!std::isfinite(v) || v <= 0.0) {
            throw Error(ErrorCode::DomainError,
                        "mgf_vector_bound: g must be positive and finite on the scanned domain");
        }
        return v;
    };

    // log h(t) with h(t) = e^{-n t eps} { [g(phi t)/phi + phi g(-t/phi)]^n
    //                                  + [g(-phi t)/phi + phi g(t/phi)]^n }.
    auto log_h = [&](double t) {
        const double bracket_pos = g_at(kPhi * t) / kPhi + kPhi * g_at(-t / kPhi);
        const double bracket_neg = g_at(-kPhi * t) / kPhi + kPhi * g_at(t / kPhi);
        const double ln_sum = log_add(n * std::log(bracket_pos), n * std::log(bracket_neg));
        return -static_cast<double>(n) * t * eps + ln_sum;
    };

    // 64-point pre-scan: cheap global guard against golden section landing in
    // a local basin of a non-unimodal h.
    const double lo = tau * 1e-12;
    const double hi = tau * (1.0 - 1e-12);
    int best_i = 0;
    double best_grid = std::numeric_limits<double>::infinity();
    constexpr int kGrid = 64;
    for (int i = 0; i < kGrid; ++i) {
        const double t = lo + (hi - lo) * (static_cast<double>(i) / (kGrid - 1));
        const double v = log_h(t);
        if (v < best_grid) {
            best_grid = v;
            best_i = i;
        }
    }

    Min1D global = golden_section_min(log_h, lo, hi, tau * 1e-12);
    if (best_grid < global.fx - 1e-9) {
        // Refine around the winning grid cell instead.
        const double cell = (hi - lo) / (kGrid - 1);
        const double a = std::max(lo, lo + (best_i - 1) * cell);
        const double b = std::min(hi, lo + (best_i + 1) * cell);
        Min1D local = golden_section_min(log_h, a, b, tau * 1e-12);
        if (local.fx < global.fx) global = local;
    }

    const double log_bound = global.fx - 0.5 * n * std::log(5.0);
    return make_result(std::exp(log_bound), global.x, log_bound / n);
}

InequalityResult iid_bounded_bound(double V, long n, double eps) {
    require_positive(V, "V");
    require_positive(eps, "eps");
    if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "iid_bounded_bound: n must be >= 1");
    const double rate = -2.0 * eps * eps / (5.0 * V);
    return make_result(2.0 * std::exp(static_cast<double>(n) * rate), 0.0, rate);
}

double v_from_radii(const std::vector<double>& radii) {
    if (radii.empty()) throw Error(ErrorCode::ParamOutOfRange, "v_from_radii: empty input");
    double s = 0.0;
    for (double ri : radii) {
        require_positive(ri, "radius");
        s += ri * ri;
    }
    return s / static_cast<double>(radii.size());
}

double v_from_diameters(const std::vector<double>& diams) {
    if (diams.empty()) throw Error(ErrorCode::ParamOutOfRange, "v_from_diameters: empty input");
    double s = 0.0;
    for (double di : diams) {
        require_positive(di, "diameter");
        s += di * di;
    }
    return s / static_cast<double>(diams.size());
}

InequalityResult martingale_bound(const std::vector<double>& c, double eps) {
    if (c.empty()) throw Error(ErrorCode::ParamOutOfRange, "martingale_bound: empty increments");
    require_positive(eps, "eps");
    double sum_sq = 0.0;
    for (double ck : c) {
        require_positive(ck, "increment bound");
        sum_sq += ck * ck;
    }
    // Total (not averaged) deviation: single exponent, bound = 2 exp(rate).
    const double rate = -2.0 * eps * eps / (5.0 * sum_sq);
    return make_result(2.0 * std::exp(rate), 0.0, rate);
}

namespace {

InequalityResult componentwise_common(double sigma2, double denom, double eps) {
    if (!(eps * eps > sigma2)) {
        throw Error(ErrorCode::EpsNotAboveSigma,
                    "componentwise tail: requires eps^2 > sigma^2");
    }
    const double gap = eps * eps - sigma2;
    const double rate = -2.0 * gap * gap / denom;
    return make_result(std::exp(rate), 0.0, rate);
}

} // namespace

InequalityResult componentwise_tail_radius(const std::vector<double>& radii, double sigma2,
                                           double eps) {
    if (radii.empty()) throw Error(ErrorCode::ParamOutOfRange, "componentwise tail: empty radii");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
        throw Error(ErrorCode::ParamOutOfRange, "componentwise tail: sigma2 must be >= 0");
    }
    require_positive(eps, "eps");
    double denom = 0.0;
    for (double ri : radii) {
        require_positive(ri, "radius");
        denom += ri * ri * ri * ri;
    }
    return componentwise_common(sigma2, denom, eps);
}

InequalityResult componentwise_tail_range(const std::vector<std::pair<double, double>>& ranges,
                                          double eps) {
    if (ranges.empty()) throw Error(ErrorCode::ParamOutOfRange, "componentwise tail: empty ranges");
    require_positive(eps, "eps");
    double sigma2 = 0.0;
    double denom = 0.0;
    for (const auto& [a, b] : ranges) {
        if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
            throw Error(ErrorCode::ParamOutOfRange,
                        "componentwise tail: each range needs finite a < b");
        }
        sigma2 += std::fabs(a * b);
        const double w = std::fabs(b - a);
        denom += w * w * w * w;
    }
    return componentwise_common(sigma2, denom, eps);
}

VarianceRangeBound variance_range_bound(double sigma, double r, long n, double eps) {
    require_positive(sigma, "sigma");
    require_positive(r, "r");
    require_positive(eps, "eps");
    if (n < 1) throw Error(ErrorCode::ParamOutOfRange, "variance_range_bound: n must be >= 1");
    if (!(sigma <= r)) {
        throw Error(ErrorCode::ParamOutOfRange, "variance_range_bound: requires sigma <= r");
    }

    VarianceRangeBound out;
    if (eps > r) {
        // ||X_i|| <= r forces the average below r almost surely.
        out.zero_probability = true;
        return out;
    }

    const double s2 = sigma * sigma;
    const double nn = static_cast<double>(n);

    // tier1: inf over t > 0 of e^{-n t eps} { [ (phi r)^2/(s2+(phi r)^2) e^{-t s2/(phi r)}
    //          + s2/(s2+(phi r)^2) e^{t phi r} ]^n
    //        + [ r^2/(r^2+(phi sigma)^2) e^{-t phi s2 / r}
    //          + (phi sigma)^2/(r^2+(phi sigma)^2) e^{t r / phi} ]^n }.
    const double pr = kPhi * r;
    const double pr2 = pr * pr;
    const double ps = kPhi * sigma;
    const double ps2 = ps * ps;
    auto log_obj = [&](double t) {
        const double b1 = log_add(std::log(pr2 / (s2 + pr2)) - t * s2 / pr,
                                  std::log(s2 / (s2 + pr2)) + t * pr);
        const double b2 = log_add(std::log(r * r / (r * r + ps2)) - t * kPhi * s2 / r,
                                  std::log(ps2 / (r * r + ps2)) + t * r / kPhi);
        return -nn * t * eps + log_add(nn * b1, nn * b2);
    };

    // The minimizer always exists for eps < pr (the exponent grows at both
    // ends); expand the bracket until the right edge stops improving.
    double hi = 1.0;
    double f_hi = log_obj(hi);
    for (int it = 0; it < 120; ++it) {
        const double f_next = log_obj(hi * 2.0);
        if (f_next >= f_hi) break;
        hi *= 2.0;
        f_hi = f_next;
    }
    Min1D m = golden_section_min(log_obj, 0.0, hi * 2.0, std::max(1e-13, hi * 1e-12));
    out.t_opt = m.x;
    out.tier1 = std::exp(m.fx);

    // tier2 closed form: 2 [ (s2/(s2 + phi r eps))^{s2 + phi r eps}
    //                        (1 - eps/(phi r))^{phi r eps - (phi r)^2} ]^{n/(s2+(phi r)^2)}.
    {
        const double q = s2 + pr * eps;
        const double log_inner = q * std::log(s2 / q) + (pr * eps - pr2) * std::log1p(-eps / pr);
        out.tier2 = 2.0 * std::exp(nn / (s2 + pr2) * log_inner);
    }

    // tier3: 2 exp(-n eps^2 / (2 (s2 + phi r eps / 3))).
    out.tier3 = 2.0 * std::exp(-nn * eps * eps / (2.0 * (s2 + pr * eps / 3.0)));

    if (!(out.tier1 <= out.tier2 + 1e-9) || !(out.tier2 <= out.tier3 + 1e-9)) {
        throw Error(ErrorCode::Internal, "variance_range_bound: tier ordering violated");
    }
    return out;
}

InequalityResult small_deviation_bound(double c_n, double x) {
    require_positive(c_n, "c_n");
    const double x_max = 1.0 / (kPhi * c_n);
    if (!(x > 0.0) || !(x < x_max)) {
        throw Error(ErrorCode::XOutOfRange,
                    "small_deviation_bound: requires 0 < x < 1/(phi c_n)");
    }
    const double rate = -(x * x / 2.0) * (1.0 - x * kPhi * c_n / 2.0);
    return make_result(2.0 * std::exp(rate), 0.0, rate);
}

namespace {

// Spectral norm ||M|| by power iteration on M^T M.
double spectral_norm(const std::vector<std::vector<double>>& M) {
    const std::size_t nrows = M.size();
    const std::size_t ncols = M.front().size();
    std::vector<double> v(ncols, 1.0 / std::sqrt(static_cast<double>(ncols)));
    std::vector<double> mv(nrows), mtmv(ncols);
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        for (std::size_t i = 0; i < nrows; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < ncols; ++j) s += M[i][j] * v[j];
            mv[i] = s;
        }
        for (std::size_t j = 0; j < ncols; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < nrows; ++i) s += M[i][j] * mv[i];
            mtmv[j] = s;
        }
        double norm = 0.0;
        for (double c : mtmv) norm += c * c;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        const double lambda_new = norm;  // ||M^T M v|| with ||v|| = 1
        for (std::size_t j = 0; j < ncols; ++j) v[j] = mtmv[j] / norm;
        if (it > 0 && std::fabs(lambda_new - lambda) <= 1e-10 * std::max(1.0, lambda_new)) {
            lambda = lambda_new;
            break;
        }
        lambda = lambda_new;
    }
    return std::sqrt(lambda);
}

// Gauss-Jordan inverse with partial pivoting; returns false when a pivot
// collapses below 1e-300 (outright singular).
bool invert(std::vector<std::vector<double>> M, std::vector<std::vector<double>>& out) {
    const std::size_t d = M.size();
    out.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) out[i][i] = 1.0;
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t rr = col + 1; rr < d; ++rr) {
            if (std::fabs(M[rr][col]) > std::fabs(M[piv][col])) piv = rr;
        }
        if (std::fabs(M[piv][col]) < 1e-300) return false;
        std::swap(M[piv], M[col]);
        std::swap(out[piv], out[col]);
        const double inv_p = 1.0 / M[col][col];
        for (std::size_t j = 0; j < d; ++j) {
            M[col][j] *= inv_p;
            out[col][j] *= inv_p;
        }
        for (std::size_t rr = 0; rr < d; ++rr) {
            if (rr == col) continue;
            const double f = M[rr][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) {
                M[rr][j] -= f * M[col][j];
                out[rr][j] -= f * out[col][j];
            }
        }
    }
    return true;
}

} // namespace

EllipsoidSpec::EllipsoidSpec(std::vector<std::vector<double>> A_, std::vector<double> b_,
                             double c_, std::vector<double> mu_)
    : A(std::move(A_)), b(std::move(b_)), c(c_), mu(std::move(mu_)) {
    const std::size_t d = A.size();
    if (d == 0 || b.size() != d || mu.size() != d) {
        throw Error(ErrorCode::DimMismatch, "EllipsoidSpec: A, b, mu dimensions disagree");
    }
    for (const auto& row : A) {
        if (row.size() != d) throw Error(ErrorCode::DimMismatch, "EllipsoidSpec: A not square");
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::ParamOutOfRange, "EllipsoidSpec: non-finite entry in A");
            }
        }
    }
    for (double v : b) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::ParamOutOfRange, "EllipsoidSpec: non-finite entry in b");
        }
    }
    for (double v : mu) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::ParamOutOfRange, "EllipsoidSpec: non-finite entry in mu");
        }
    }
    require_positive(c, "c");

    std::vector<std::vector<double>> inv;
    if (!invert(A, inv)) {
        throw Error(ErrorCode::SingularA, "EllipsoidSpec: A is singular");
    }
    const double cond = spectral_norm(A) * spectral_norm(inv);
    if (!(cond < 1e12)) {
        throw Error(ErrorCode::SingularA, "EllipsoidSpec: A is numerically singular (cond >= 1e12)");
    }
    double shift = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double s = b[i];
        for (std::size_t j = 0; j < d; ++j) s += A[i][j] * mu[j];
        shift += s * s;
    }
    if (!(std::sqrt(shift) <= c)) {
        throw Error(ErrorCode::ParamOutOfRange,
                    "EllipsoidSpec: requires ||A mu + b|| <= c (mean inside the ellipsoid)");
    }
}

std::pair<double, double> moment_envelope(double D) {
    require_positive(D, "D");
    return {D, D * D / 2.0};
}

std::pair<double, double> moment_envelope(const EllipsoidSpec& e) {
    const std::size_t d = e.A.size();
    std::vector<std::vector<double>> inv;
    if (!invert(e.A, inv)) {
        throw Error(ErrorCode::SingularA, "moment_envelope: A is singular");
    }
    const double inv_norm = spectral_norm(inv);
    double shift = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        double s = e.b[i];
        for (std::size_t j = 0; j < d; ++j) s += e.A[i][j] * e.mu[j];
        shift += s * s;
    }
    const double rho = std::sqrt(shift);
    return {inv_norm * (e.c + rho), inv_norm * (e.c * e.c - rho * rho)};
}

} // namespace wcb
