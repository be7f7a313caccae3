#include "wcbound/lp.hpp"

#include <cmath>

namespace wcb {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

// Dense tableau simplex working on rows T[r] = [coeffs..., rhs], kept in
// canonical form with respect to `basis`. Maximizes cost'x.
struct Tableau {
    int m, n; // rows, structural+slack+artificial columns
    std::vector<std::vector<double>> T;
    std::vector<int> basis;

    double rhs(int r) const { return T[static_cast<size_t>(r)][static_cast<size_t>(n)]; }

    void pivot(int r, int col) {
        auto& pr = T[static_cast<size_t>(r)];
        const double piv = pr[static_cast<size_t>(col)];
        for (int j = 0; j <= n; ++j) pr[static_cast<size_t>(j)] /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == r) continue;
            auto& row = T[static_cast<size_t>(i)];
            const double factor = row[static_cast<size_t>(col)];
            if (factor == 0.0) continue;
            for (int j = 0; j <= n; ++j)
                row[static_cast<size_t>(j)] -= factor * pr[static_cast<size_t>(j)];
            row[static_cast<size_t>(col)] = 0.0;
        }
        basis[static_cast<size_t>(r)] = col;
    }

    // Returns false on the (theoretically unreachable) unbounded ray.
    bool optimize(const std::vector<double>& cost, int max_enter_col) {
        const long iter_cap = 10000 + 200L * n;
        for (long iter = 0; iter < iter_cap; ++iter) {
            // reduced costs via the basis cost multipliers
            int enter = -1;
            for (int j = 0; j < max_enter_col; ++j) {
                double rc = cost[static_cast<size_t>(j)];
                for (int r = 0; r < m; ++r) {
                    const double a = T[static_cast<size_t>(r)][static_cast<size_t>(j)];
                    if (a != 0.0) rc -= cost[static_cast<size_t>(basis[static_cast<size_t>(r)])] * a;
                }
                if (rc > kPivotTol) { enter = j; break; } // Bland: first improving index
            }
            if (enter < 0) return true;
            int leave = -1;
            double best_ratio = 0.0;
            for (int r = 0; r < m; ++r) {
                const double a = T[static_cast<size_t>(r)][static_cast<size_t>(enter)];
                if (a > kPivotTol) {
                    const double ratio = rhs(r) / a;
                    if (leave < 0 || ratio < best_ratio - 1e-15 ||
                        (std::fabs(ratio - best_ratio) <= 1e-15 &&
                         basis[static_cast<size_t>(r)] < basis[static_cast<size_t>(leave)])) {
                        leave = r;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
        throw Error(ErrorCode::Internal, "simplex iteration cap exceeded");
    }

    // y_r = cost_B * B^{-1} e_r, read off the artificial column of row r.
    std::vector<double> multipliers(const std::vector<double>& cost, int art0) const {
        std::vector<double> y(static_cast<size_t>(m), 0.0);
        for (int r = 0; r < m; ++r) {
            double v = 0.0;
            for (int i = 0; i < m; ++i) {
                const double a = T[static_cast<size_t>(i)][static_cast<size_t>(art0 + r)];
                if (a != 0.0) v += cost[static_cast<size_t>(basis[static_cast<size_t>(i)])] * a;
            }
            y[static_cast<size_t>(r)] = v;
        }
        return y;
    }
};

} // namespace

LpSolution solve_lp(const ThetaLP& p) {
    const int L = static_cast<int>(p.c.size());
    const int k = static_cast<int>(p.F.size());
    if (L < 1) throw Error(ErrorCode::Internal, "ThetaLP with no columns");
    for (const auto& row : p.F)
        if (static_cast<int>(row.size()) != L)
            throw Error(ErrorCode::Internal, "ThetaLP row length mismatch");
    if (p.moment_box.dim() != k)
        throw Error(ErrorCode::Internal, "ThetaLP moment_box dimension mismatch");

    const int m = 1 + 2 * k;          // equality + hi rows + lo rows
    const int nslack = 2 * k;
    const int n = L + nslack + m;     // structural + slack/surplus + artificial
    const int art0 = L + nslack;

    // raw rows in the layout of LpSolution::dual
    std::vector<std::vector<double>> A(static_cast<size_t>(m),
                                       std::vector<double>(static_cast<size_t>(L), 0.0));
    std::vector<double> rhs(static_cast<size_t>(m), 0.0);
    for (int l = 0; l < L; ++l) A[0][static_cast<size_t>(l)] = 1.0;
    rhs[0] = 1.0;
    for (int j = 0; j < k; ++j) {
        A[static_cast<size_t>(1 + j)] = p.F[static_cast<size_t>(j)];
        rhs[static_cast<size_t>(1 + j)] = p.moment_box.upper[static_cast<size_t>(j)];
        A[static_cast<size_t>(1 + k + j)] = p.F[static_cast<size_t>(j)];
        rhs[static_cast<size_t>(1 + k + j)] = p.moment_box.lower[static_cast<size_t>(j)];
    }

    // row scaling + sign flip so every scaled rhs is nonnegative
    std::vector<double> scale(static_cast<size_t>(m), 1.0), flip(static_cast<size_t>(m), 1.0);
    Tableau tb;
    tb.m = m;
    tb.n = n;
    tb.T.assign(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(n + 1), 0.0));
    tb.basis.resize(static_cast<size_t>(m));
    for (int r = 0; r < m; ++r) {
        double mx = std::fabs(rhs[static_cast<size_t>(r)]);
        for (double v : A[static_cast<size_t>(r)]) mx = std::max(mx, std::fabs(v));
        scale[static_cast<size_t>(r)] = mx > 0.0 ? mx : 1.0;
        double s = 1.0 / scale[static_cast<size_t>(r)];
        if (rhs[static_cast<size_t>(r)] * s < 0.0) flip[static_cast<size_t>(r)] = -1.0;
        const double f = s * flip[static_cast<size_t>(r)];
        auto& row = tb.T[static_cast<size_t>(r)];
        for (int l = 0; l < L; ++l) row[static_cast<size_t>(l)] = A[static_cast<size_t>(r)][static_cast<size_t>(l)] * f;
        if (r >= 1 && r <= k) row[static_cast<size_t>(L + (r - 1))] = f;            // slack, + on hi rows
        if (r >= 1 + k) row[static_cast<size_t>(L + k + (r - 1 - k))] = -f;         // surplus, - on lo rows
        row[static_cast<size_t>(art0 + r)] = 1.0;
        row[static_cast<size_t>(n)] = rhs[static_cast<size_t>(r)] * f;
        tb.basis[static_cast<size_t>(r)] = art0 + r;
    }

    LpSolution sol;
    sol.dual.assign(static_cast<size_t>(m), 0.0);

    // phase 1: drive the artificials to zero
    std::vector<double> cost1(static_cast<size_t>(n), 0.0);
    for (int r = 0; r < m; ++r) cost1[static_cast<size_t>(art0 + r)] = -1.0;
    if (!tb.optimize(cost1, art0)) // artificials never enter; they only leave
        return LpSolution{{}, 0.0, LpStatus::UnboundedGuard, {}, false, 0.0};
    double infeas = 0.0;
    for (int r = 0; r < m; ++r)
        if (tb.basis[static_cast<size_t>(r)] >= art0) infeas += tb.rhs(r);
    if (infeas > kFeasTol) {
        sol.status = LpStatus::Infeasible;
        sol.infeasibility = infeas;
        sol.dual_from_phase1 = true;
        std::vector<double> y = tb.multipliers(cost1, art0);
        for (int r = 0; r < m; ++r)
            sol.dual[static_cast<size_t>(r)] =
                y[static_cast<size_t>(r)] * flip[static_cast<size_t>(r)] / scale[static_cast<size_t>(r)];
        return sol;
    }

    // pivot basic artificials (at zero level) out where possible
    for (int r = 0; r < m; ++r) {
        if (tb.basis[static_cast<size_t>(r)] < art0) continue;
        for (int j = 0; j < art0; ++j) {
            if (std::fabs(tb.T[static_cast<size_t>(r)][static_cast<size_t>(j)]) > kPivotTol) {
                tb.pivot(r, j);
                break;
            }
        }
        // a row that stays artificial is redundant; its rhs is ~0 and the
        // artificial is excluded from entering below
    }

    // phase 2
    std::vector<double> cost2(static_cast<size_t>(n), 0.0);
    for (int l = 0; l < L; ++l) cost2[static_cast<size_t>(l)] = p.c[static_cast<size_t>(l)];
    if (!tb.optimize(cost2, art0))
        return LpSolution{{}, 0.0, LpStatus::UnboundedGuard, {}, false, 0.0};

    sol.status = LpStatus::Optimal;
    sol.theta.assign(static_cast<size_t>(L), 0.0);
    for (int r = 0; r < m; ++r) {
        const int b = tb.basis[static_cast<size_t>(r)];
        if (b < L) sol.theta[static_cast<size_t>(b)] = tb.rhs(r);
    }
    sol.value = 0.0;
    for (int l = 0; l < L; ++l) sol.value += p.c[static_cast<size_t>(l)] * sol.theta[static_cast<size_t>(l)];
    std::vector<double> y = tb.multipliers(cost2, art0);
    for (int r = 0; r < m; ++r)
        sol.dual[static_cast<size_t>(r)] =
            y[static_cast<size_t>(r)] * flip[static_cast<size_t>(r)] / scale[static_cast<size_t>(r)];
    return sol;
}

} // namespace wcb
