#pragma once

#include <cmath>
#include <functional>

namespace wcb {

struct Min1D {
    double x = 0.0;
    double fx = 0.0;
};

// Golden-section search for the minimum of f on [a, b]; x is located to within
// xtol. f is assumed unimodal on [a, b] (callers guard with grid pre-scans
// when that is only an assertion, not a certainty).
inline Min1D golden_section_min(const std::function<double(double)>& f, double a, double b,
                                double xtol) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    return Min1D{xm, f(xm)};
}

// Refines a minimizer of f by bisecting on the sign of the central-difference
// derivative inside [lo, hi]. Returns the input guess when no sign change
// brackets it (flat region or finite-difference noise).
inline double refine_by_derivative_sign(const std::function<double(double)>& f, double guess,
                                        double lo, double hi, double xtol) {
    const double h = std::max(1e-7, 1e-7 * std::fabs(guess));
    auto deriv = [&](double s) { return (f(s + h) - f(s - h)) / (2.0 * h); };
    double a = std::max(lo, guess - 64.0 * h);
    double b = std::min(hi, guess + 64.0 * h);
    if (!(a < b)) return guess;
    double da = deriv(a), db = deriv(b);
    if (!(da < 0.0) || !(db > 0.0)) return guess;
    while (b - a > xtol) {
        const double mid = 0.5 * (a + b);
        if (deriv(mid) < 0.0) a = mid;
        else b = mid;
    }
    return 0.5 * (a + b);
}

} // namespace wcb
