#pragma once

#include <vector>

#include "wcbound/model.hpp"

namespace wcb {

// The inner program over weights for fixed support points:
//   maximize c'theta  s.t.  theta >= 0, sum(theta) = 1, F*theta in moment_box.
struct ThetaLP {
    std::vector<double> c;               // length L, c[l] = g(y_l)
    std::vector<std::vector<double>> F;  // k rows of length L, F[j][l] = f_j(y_l)
    BoxRegion moment_box;                // dimension k
};

enum class LpStatus { Optimal, Infeasible, UnboundedGuard };

// Row/dual layout: index 0 = the equality row sum(theta) = 1; indices 1..k =
// the upper-bound rows F_j*theta <= hi_j; indices k+1..2k = the lower-bound
// rows F_j*theta >= lo_j. Duals are reported in original (unscaled) row units,
// so the reduced cost of a candidate column (g, u) is
//   g - dual[0] - sum_j (dual[j] + dual[k+j]) * u_j        (Optimal duals)
//   0 - dual[0] - sum_j (dual[j] + dual[k+j]) * u_j        (phase-1 duals)
struct LpSolution {
    std::vector<double> theta;
    double value = 0.0;
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> dual;      // length 1 + 2k
    bool dual_from_phase1 = false; // true when status == Infeasible
    double infeasibility = 0.0;    // phase-1 optimum (0 when feasible)
};

// Two-phase dense simplex with Bland's anti-cycling rule. Pivot tolerance
// 1e-10, feasibility tolerance 1e-9; rows are normalized by their largest
// magnitude before solving.
LpSolution solve_lp(const ThetaLP& p);

} // namespace wcb
