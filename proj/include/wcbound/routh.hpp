#pragma once

#include <array>
#include <vector>

#include "wcbound/model.hpp"

namespace wcb {

// Real polynomial, highest-degree coefficient first. Degree >= 1 and a nonzero
// leading coefficient are required by routh_stable.
struct Polynomial {
    std::vector<double> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct StabilityReport {
    bool stable = false;
    // A first-column quantity is exactly zero: the test is inconclusive
    // between marginal and unstable, and stable is reported false.
    bool marginal = false;
    // Degree 4: (a1, a1 a2 - a3, (a1 a2 - a3) a3 - a1^2 a4, a4) of the monic
    // normalization. Other degrees: the first column of the Routh table.
    std::vector<double> margins;
    double margin_min = 0.0;
};

// Routh-Hurwitz test: all roots in the open left half plane iff every margin
// is strictly positive. The sign of the polynomial is normalized first.
// Throws Error{ZeroLeadingCoeff} (also for degree < 1 or empty input).
StabilityReport routh_stable(const Polynomial& p);

// Stability margin h(eta) of the uncertain plant: minimum of the four quartic
// margins of s^4 + a1 s^3 + a2 s^2 + a3 s + a4 with
//   a1 = 20 + 0.2 eta2 + 0.3 eta3
//   a2 = (4 + 0.2 eta2)(6 + 0.3 eta3) + 10 (10 + 0.2 eta2 + 0.3 eta3)
//   a3 = 10 (4 + 0.2 eta2)(6 + 0.3 eta3) + 800 (1 + 0.1 eta1)
//   a4 = 1600 (1 + 0.1 eta1)
// The plant is stable iff h(eta) > 0. Defined for all real eta.
double plant_margin(const std::array<double, 3>& eta);
double plant_margin(const std::vector<double>& eta);

// Case-study worst-case problem: support |eta_i| <= 0.16, identity moment map
// with |E[eta_i]| <= 0.05, event {h(eta) <= 0} (loss of stability), indicator
// objective. The event expression reproduces plant_margin bit-for-bit.
MomentProblem build_stability_problem();

} // namespace wcb
