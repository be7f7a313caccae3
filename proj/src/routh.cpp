#include "wcbound/routh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wcbound/error.hpp"

namespace wcb {

StabilityReport routh_stable(const Polynomial& p) {
    std::vector<double> c = p.coeffs;
    if (c.size() < 2) {
        throw Error(ErrorCode::ZeroLeadingCoeff, "routh_stable: degree must be >= 1");
    }
    for (double v : c) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::ZeroLeadingCoeff, "routh_stable: non-finite coefficient");
        }
    }
    if (c.front() == 0.0) {
        throw Error(ErrorCode::ZeroLeadingCoeff, "routh_stable: leading coefficient is zero");
    }
    if (c.front() < 0.0) {
        for (double& v : c) v = -v;
    }
    const int n = static_cast<int>(c.size()) - 1;

    // Routh table. Row 0 holds c0, c2, c4, ...; row 1 holds c1, c3, c5, ...;
    // row i >= 2 is the standard cross-product recurrence over the two rows
    // above. The first column collects the n+1 positivity quantities.
    const std::size_t width = c.size() / 2 + 1;
    std::vector<double> prev(width, 0.0), cur(width, 0.0);
    for (std::size_t j = 0; 2 * j < c.size(); ++j) prev[j] = c[2 * j];
    for (std::size_t j = 0; 2 * j + 1 < c.size(); ++j) cur[j] = c[2 * j + 1];

    StabilityReport rep;
    std::vector<double> first_col;
    first_col.push_back(prev[0]);
    first_col.push_back(cur[0]);
    for (int row = 2; row <= n && !rep.marginal; ++row) {
        if (cur[0] == 0.0) {
            rep.marginal = true;
            break;
        }
        std::vector<double> next(width, 0.0);
        for (std::size_t j = 0; j + 1 < width; ++j) {
            next[j] = (cur[0] * prev[j + 1] - prev[0] * cur[j + 1]) / cur[0];
        }
        first_col.push_back(next[0]);
        prev.swap(cur);
        cur.swap(next);
    }
    if (!rep.marginal && first_col.back() == 0.0) rep.marginal = true;

    if (n == 4) {
        const double a1 = c[1] / c[0];
        const double a2 = c[2] / c[0];
        const double a3 = c[3] / c[0];
        const double a4 = c[4] / c[0];
        const double m2 = a1 * a2 - a3;
        rep.margins = {a1, m2, m2 * a3 - (a1 * a1) * a4, a4};
    } else {
        rep.margins = first_col;
    }
    rep.margin_min = *std::min_element(rep.margins.begin(), rep.margins.end());
    bool all_pos = true;
    for (double m : rep.margins) all_pos = all_pos && (m > 0.0);
    rep.stable = all_pos && !rep.marginal;
    return rep;
}

double plant_margin(const std::array<double, 3>& eta) {
    const double e1 = eta[0], e2 = eta[1], e3 = eta[2];
    // Shared product and evaluation order chosen to agree bit-for-bit with
    // the event expression built in build_stability_problem.
    const double a1 = 20.0 + 0.2 * e2 + 0.3 * e3;
    const double p = (4.0 + 0.2 * e2) * (6.0 + 0.3 * e3);
    const double a2 = p + 10.0 * (10.0 + 0.2 * e2 + 0.3 * e3);
    const double a3 = 10.0 * p + 800.0 * (1.0 + 0.1 * e1);
    const double a4 = 1600.0 * (1.0 + 0.1 * e1);
    const double m2 = a1 * a2 - a3;
    const double m3 = m2 * a3 - (a1 * a1) * a4;
    return std::min(std::min(std::min(a1, m2), m3), a4);
}

double plant_margin(const std::vector<double>& eta) {
    if (eta.size() != 3) {
        throw Error(ErrorCode::DimMismatch, "plant_margin: eta must have 3 components");
    }
    return plant_margin(std::array<double, 3>{eta[0], eta[1], eta[2]});
}

MomentProblem build_stability_problem() {
    const std::string A1 = "(20 + 0.2*x2 + 0.3*x3)";
    const std::string P = "((4 + 0.2*x2)*(6 + 0.3*x3))";
    const std::string A2 = "(" + P + " + 10*(10 + 0.2*x2 + 0.3*x3))";
    const std::string A3 = "(10*" + P + " + 800*(1 + 0.1*x1))";
    const std::string A4 = "(1600*(1 + 0.1*x1))";
    const std::string M2 = "(" + A1 + "*" + A2 + " - " + A3 + ")";
    const std::string M3 = "(" + M2 + "*" + A3 + " - " + A1 + "^2*" + A4 + ")";
    const std::string H = "min(" + A1 + ", " + M2 + ", " + M3 + ", " + A4 + ")";

    MomentProblem prob;
    prob.domain = BoxRegion{{-0.16, -0.16, -0.16}, {0.16, 0.16, 0.16}};
    prob.moment_src = {"x1", "x2", "x3"};
    for (const std::string& s : prob.moment_src) prob.moment_map.push_back(parse(s, 3));
    prob.moment_set = BoxRegion{{-0.05, -0.05, -0.05}, {0.05, 0.05, 0.05}};
    prob.event_src = H;
    prob.event = parse(H, 3);
    prob.indicator_objective = true;
    prob.objective_src = "indicator";
    return validate_problem(prob);
}

} // namespace wcb
