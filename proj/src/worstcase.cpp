#include "wcbound/worstcase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <unordered_set>
#include <vector>

#include "wcbound/error.hpp"
#include "wcbound/expr.hpp"
#include "wcbound/lp.hpp"
#include "wcbound/rng.hpp"

namespace wcb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Low-discrepancy start generation
// ---------------------------------------------------------------------------

std::vector<int> first_primes(int count) {
    std::vector<int> primes;
    primes.reserve(static_cast<std::size_t>(count));
    int candidate = 2;
    while (static_cast<int>(primes.size()) < count) {
        bool is_prime = true;
        for (int q : primes) {
            if (q * q > candidate) break;
            if (candidate % q == 0) {
                is_prime = false;
                break;
            }
        }
        if (is_prime) primes.push_back(candidate);
        ++candidate;
    }
    return primes;
}

double halton(int base, long index) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Search-side plumbing
// ---------------------------------------------------------------------------

// Lexicographic merit: any feasible support set beats any infeasible one;
// within a class, larger value wins. For infeasible sets `value` is the
// negated phase-1 infeasibility, so ascent walks toward feasibility.
struct Merit {
    bool feasible = false;
    double value = -kInf;

    bool better_than(const Merit& o) const {
        if (feasible != o.feasible) return feasible;
        return value > o.value;
    }
};

struct Candidate {
    std::vector<double> x;
    double obj = 0.0;
    std::vector<double> mom;
};

struct StartResult {
    std::vector<std::vector<double>> points;
    Merit merit;
    long iterations = 0;
};

// ---------------------------------------------------------------------------
// Branch-and-bound relaxation (column generation over box corners)
// ---------------------------------------------------------------------------

struct BnbBox {
    std::vector<double> lo, hi;
    std::vector<Interval> fiv;
    double ghi = 0.0;        // upper bound of the objective over the box
    double err_width = 0.0;  // objective width + sum of moment widths
    BoxTag tag = BoxTag::Mixed;
    bool alive = true;
};

struct RelaxOutcome {
    bool infeasible = false;
    double upper = kInf;
    std::vector<double> box_weight;  // theta mass per box at the final master solve
    long cg_iters = 0;
};

class Solver {
public:
    Solver(const MomentProblem& p, const SolverSettings& s, bool prob_mode)
        : p_(p), s_(s), prob_(prob_mode), d_(p.d()), k_(p.k()), L_(p.k() + 1) {}

    BoundCertificate run();

private:
    const MomentProblem& p_;
    const SolverSettings& s_;
    const bool prob_;
    const int d_, k_, L_;

    // --- candidate evaluation -------------------------------------------------
    double objective_at(const std::vector<double>& x) const {
        if (!prob_) return eval_point(p_.objective, x);
        try {
            return eval_point(p_.event, x) <= 0.0 ? 1.0 : 0.0;
        } catch (const Error&) {
            return 0.0;  // undefined h counts as outside C: keeps lower bounds valid
        }
    }

    Candidate make_candidate(const std::vector<double>& x) const {
        Candidate c;
        c.x = x;
        c.obj = objective_at(x);
        c.mom.resize(static_cast<std::size_t>(k_));
        for (int j = 0; j < k_; ++j) {
            c.mom[static_cast<std::size_t>(j)] = eval_point(p_.moment_map[static_cast<std::size_t>(j)], x);
        }
        return c;
    }

    // LP over a fixed candidate set; columns in the given order.
    LpSolution solve_candidates(const std::vector<Candidate>& cs) const {
        ThetaLP lp;
        const std::size_t n = cs.size();
        lp.c.resize(n);
        lp.F.assign(static_cast<std::size_t>(k_), std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            lp.c[i] = cs[i].obj;
            for (int j = 0; j < k_; ++j) {
                lp.F[static_cast<std::size_t>(j)][i] = cs[i].mom[static_cast<std::size_t>(j)];
            }
        }
        lp.moment_box = p_.moment_set;
        return solve_lp(lp);
    }

    Merit merit_of(const std::vector<std::vector<double>>& points,
                   std::vector<Candidate>* out = nullptr) const {
        std::vector<Candidate> cs;
        cs.reserve(points.size());
        for (const auto& x : points) cs.push_back(make_candidate(x));
        LpSolution sol = solve_candidates(cs);
        if (out) *out = std::move(cs);
        Merit m;
        if (sol.status == LpStatus::Optimal) {
            m.feasible = true;
            m.value = sol.value;
        } else {
            m.feasible = false;
            m.value = -sol.infeasibility;
        }
        return m;
    }

    void clip_into_domain(std::vector<double>& x) const {
        for (int j = 0; j < d_; ++j) {
            const std::size_t u = static_cast<std::size_t>(j);
            x[u] = std::min(std::max(x[u], p_.domain.lower[u]), p_.domain.upper[u]);
        }
    }

    // --- multistart gradient search ------------------------------------------
    std::vector<std::vector<double>> initial_points(int start_idx, const std::vector<int>& primes,
                                                    const std::vector<double>& rot,
                                                    RngStream& stream) const;
    StartResult search_from(std::vector<std::vector<double>> pts, int iter_cap) const;
    void run_multistart(std::vector<StartResult>& results) const;

    // --- branch and bound ----------------------------------------------------
    void add_box(std::vector<double> lo, std::vector<double> hi);
    void seed_column(std::size_t bi);
    void seed_root_partition();
    RelaxOutcome solve_master();
    bool split_round(const std::vector<double>& box_weight);
    void compact_columns(const std::vector<std::pair<int, int>>& remap);

    std::vector<BnbBox> boxes_;
    std::vector<double> col_c_;
    std::vector<std::vector<double>> col_u_;
    std::vector<int> col_box_;
    std::vector<double> col_theta_;  // weights at the last converged master solve
    std::unordered_set<std::uint64_t> corner_keys_;
    long boxes_created_ = 0;

    // --- pooled lower bound --------------------------------------------------
    std::vector<Candidate> pool_;
    static constexpr std::size_t kPoolCap = 4096;

    void pool_add(const std::vector<double>& x) {
        if (pool_.size() < kPoolCap) pool_.push_back(make_candidate(x));
    }

    // Best feasible value over the pool with a <= L-point witness.
    bool pool_solve(double& lower, DiscreteDistribution& witness) const;

    static void caratheodory_reduce(std::vector<Candidate>& pts, std::vector<double>& th, int k,
                                    int L);
};

// Deterministic Halton-with-rotation start locations; in probability mode the
// first i points are rejected into C (redrawn uniformly when the rotated
// Halton point misses), i cycling over 1..k+1 with the start index.
std::vector<std::vector<double>> Solver::initial_points(int start_idx,
                                                        const std::vector<int>& primes,
                                                        const std::vector<double>& rot,
                                                        RngStream& stream) const {
    std::vector<std::vector<double>> pts(static_cast<std::size_t>(L_),
                                         std::vector<double>(static_cast<std::size_t>(d_)));
    for (int l = 0; l < L_; ++l) {
        for (int j = 0; j < d_; ++j) {
            const std::size_t c = static_cast<std::size_t>(l * d_ + j);
            double u = halton(primes[c], start_idx + 1) + rot[c];
            u -= std::floor(u);
            pts[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] =
                p_.domain.lower[static_cast<std::size_t>(j)] +
                u * (p_.domain.upper[static_cast<std::size_t>(j)] -
                     p_.domain.lower[static_cast<std::size_t>(j)]);
        }
    }
    if (prob_) {
        const int i_target = 1 + (start_idx % L_);
        for (int l = 0; l < i_target; ++l) {
            auto& x = pts[static_cast<std::size_t>(l)];
            for (int attempt = 0; attempt < 256; ++attempt) {
                if (objective_at(x) > 0.5) break;  // inside C
                for (int j = 0; j < d_; ++j) {
                    x[static_cast<std::size_t>(j)] =
                        stream.next_uniform(p_.domain.lower[static_cast<std::size_t>(j)],
                                            p_.domain.upper[static_cast<std::size_t>(j)]);
                }
            }
        }
    }
    return pts;
}

StartResult Solver::search_from(std::vector<std::vector<double>> pts, int iter_cap) const {
    StartResult res;
    const int ncoord = L_ * d_;
    double max_width = 0.0;
    for (int j = 0; j < d_; ++j) {
        max_width = std::max(max_width, p_.domain.upper[static_cast<std::size_t>(j)] -
                                            p_.domain.lower[static_cast<std::size_t>(j)]);
    }

    Merit cur = merit_of(pts);
    int stall = 0;
    for (int iter = 0; iter < iter_cap && stall < 5; ++iter) {
        ++res.iterations;
        // finite-difference gradient of the merit value in the current branch
        std::vector<double> grad(static_cast<std::size_t>(ncoord), 0.0);
        double gmax = 0.0;
        for (int c = 0; c < ncoord; ++c) {
            const int l = c / d_, j = c % d_;
            double& yy = pts[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
            const double y0 = yy;
            const double h = 1e-6 * std::max(1.0, std::fabs(y0));
            const double yp = std::min(y0 + h, p_.domain.upper[static_cast<std::size_t>(j)]);
            const double ym = std::max(y0 - h, p_.domain.lower[static_cast<std::size_t>(j)]);
            if (!(yp > ym)) continue;
            yy = yp;
            Merit mp = merit_of(pts);
            yy = ym;
            Merit mm = merit_of(pts);
            yy = y0;
            double g = 0.0;
            if (cur.feasible) {
                // one-sided against the center when a side falls infeasible
                if (mp.feasible && mm.feasible) {
                    g = (mp.value - mm.value) / (yp - ym);
                } else if (mp.feasible && yp > y0) {
                    g = (mp.value - cur.value) / (yp - y0);
                } else if (mm.feasible && y0 > ym) {
                    g = (cur.value - mm.value) / (y0 - ym);
                }
            } else {
                const double vp = mp.feasible ? 0.0 : mp.value;
                const double vm = mm.feasible ? 0.0 : mm.value;
                g = (vp - vm) / (yp - ym);
            }
            grad[static_cast<std::size_t>(c)] = g;
            gmax = std::max(gmax, std::fabs(g));
        }
        if (gmax == 0.0) break;

        // backtracking projected line search along the ascent direction,
        // largest coordinate step alpha
        bool improved = false;
        double alpha = 0.25 * max_width;
        for (int bt = 0; bt < 24 && !improved; ++bt, alpha *= 0.5) {
            std::vector<std::vector<double>> trial = pts;
            for (int c = 0; c < ncoord; ++c) {
                const int l = c / d_, j = c % d_;
                trial[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)] +=
                    alpha * grad[static_cast<std::size_t>(c)] / gmax;
            }
            for (auto& x : trial) clip_into_domain(x);
            Merit mt = merit_of(trial);
            if (mt.better_than(cur)) {
                const double gain = (mt.feasible == cur.feasible) ? mt.value - cur.value : kInf;
                pts.swap(trial);
                cur = mt;
                improved = true;
                stall = (gain > s_.gradient_tol) ? 0 : stall + 1;
            }
        }
        if (!improved) break;
    }
    res.points = std::move(pts);
    res.merit = cur;
    return res;
}

void Solver::run_multistart(std::vector<StartResult>& results) const {
    const int n_starts = s_.multistarts;
    results.assign(static_cast<std::size_t>(n_starts), {});
    const std::vector<int> primes = first_primes(L_ * d_);
    std::vector<double> rot(static_cast<std::size_t>(L_ * d_));
    {
        RngStream rot_stream(s_.seed, 0x526F746174ULL);
        for (double& r : rot) r = rot_stream.next_unit();
    }

    auto do_start = [&](int idx) {
        RngStream stream(s_.seed, static_cast<std::uint64_t>(idx));
        auto pts = initial_points(idx, primes, rot, stream);
        results[static_cast<std::size_t>(idx)] = search_from(std::move(pts), s_.gradient_iters);
    };

    const int threads = std::max(1, s_.threads);
    if (threads == 1) {
        for (int i = 0; i < n_starts; ++i) do_start(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t]() {
                for (int i = t; i < n_starts; i += threads) do_start(i);
            });
        }
        for (auto& th : pool) th.join();
    }
}

// ---------------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------------

void Solver::add_box(std::vector<double> lo, std::vector<double> hi) {
    BnbBox b;
    b.lo = std::move(lo);
    b.hi = std::move(hi);
    BoxRegion region{b.lo, b.hi};
    b.fiv.resize(static_cast<std::size_t>(k_));
    double moment_width = 0.0;
    for (int j = 0; j < k_; ++j) {
        Interval iv = eval_interval(p_.moment_map[static_cast<std::size_t>(j)], region);
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
            throw Error(ErrorCode::DomainError,
                        "branch and bound: moment function has no finite enclosure on a sub-box");
        }
        b.fiv[static_cast<std::size_t>(j)] = iv;
        moment_width += iv.hi - iv.lo;
    }
    if (prob_) {
        try {
            Interval hv = eval_interval(p_.event, region);
            if (hv.hi <= 0.0) {
                b.tag = BoxTag::InsideC;
            } else if (hv.lo > 0.0) {
                b.tag = BoxTag::OutsideC;
            } else {
                b.tag = BoxTag::Mixed;
            }
        } catch (const Error&) {
            b.tag = BoxTag::Mixed;  // cannot bound h here: assume it may intersect C
        }
        b.ghi = (b.tag == BoxTag::OutsideC) ? 0.0 : 1.0;
        b.err_width = (b.tag == BoxTag::Mixed ? 1.0 : 0.0) + moment_width;
    } else {
        Interval gv = eval_interval(p_.objective, region);
        if (!std::isfinite(gv.hi)) {
            throw Error(ErrorCode::DomainError,
                        "branch and bound: objective has no finite upper enclosure on a sub-box");
        }
        b.ghi = gv.hi;
        b.err_width = (std::isfinite(gv.lo) ? gv.hi - gv.lo : kInf) + moment_width;
    }

    boxes_.push_back(std::move(b));
    ++boxes_created_;
}

void Solver::seed_column(std::size_t bi) {
    const BnbBox& b = boxes_[bi];
    std::vector<double> mid(static_cast<std::size_t>(k_));
    for (int j = 0; j < k_; ++j) {
        const Interval& iv = b.fiv[static_cast<std::size_t>(j)];
        mid[static_cast<std::size_t>(j)] = 0.5 * (iv.lo + iv.hi);
    }
    col_c_.push_back(b.ghi);
    col_u_.push_back(std::move(mid));
    col_box_.push_back(static_cast<int>(bi));
}

void Solver::seed_root_partition() {
    int divisions = 4;
    double count = std::pow(4.0, d_);
    if (count > 4096.0) {
        divisions = 2;
        count = std::pow(2.0, d_);
    }
    if (count > 4096.0) divisions = 1;

    std::vector<int> idx(static_cast<std::size_t>(d_), 0);
    while (true) {
        std::vector<double> lo(static_cast<std::size_t>(d_)), hi(static_cast<std::size_t>(d_));
        for (int j = 0; j < d_; ++j) {
            const std::size_t u = static_cast<std::size_t>(j);
            const double w = (p_.domain.upper[u] - p_.domain.lower[u]) / divisions;
            lo[u] = p_.domain.lower[u] + idx[u] * w;
            hi[u] = (idx[u] == divisions - 1) ? p_.domain.upper[u] : lo[u] + w;
        }
        add_box(std::move(lo), std::move(hi));
        int j = 0;
        while (j < d_ && ++idx[static_cast<std::size_t>(j)] == divisions) {
            idx[static_cast<std::size_t>(j)] = 0;
            ++j;
        }
        if (j == d_) break;
    }
    for (std::size_t bi = 0; bi < boxes_.size(); ++bi) seed_column(bi);
}

RelaxOutcome Solver::solve_master() {
    RelaxOutcome out;
    for (int round = 0; round < 300; ++round) {
        ++out.cg_iters;
        ThetaLP lp;
        const std::size_t ncols = col_c_.size();
        lp.c = col_c_;
        lp.F.assign(static_cast<std::size_t>(k_), std::vector<double>(ncols));
        for (std::size_t i = 0; i < ncols; ++i) {
            for (int j = 0; j < k_; ++j) {
                lp.F[static_cast<std::size_t>(j)][i] = col_u_[i][static_cast<std::size_t>(j)];
            }
        }
        lp.moment_box = p_.moment_set;
        LpSolution sol = solve_lp(lp);
        if (sol.status == LpStatus::UnboundedGuard) {
            throw Error(ErrorCode::Internal, "master relaxation claims an unbounded ray");
        }
        const bool phase1 = sol.status == LpStatus::Infeasible;

        // price the best corner of every live box against the duals
        double max_rc = -kInf;
        struct Improving {
            double rc;
            int box;
            std::vector<double> u;
            std::uint64_t key;
        };
        std::vector<Improving> adds;
        for (std::size_t bi = 0; bi < boxes_.size(); ++bi) {
            const BnbBox& b = boxes_[bi];
            if (!b.alive) continue;
            double rc = (phase1 ? 0.0 : b.ghi) - sol.dual[0];
            std::vector<double> u(static_cast<std::size_t>(k_));
            std::uint64_t key = static_cast<std::uint64_t>(bi) << 32;
            for (int j = 0; j < k_; ++j) {
                const std::size_t ju = static_cast<std::size_t>(j);
                const double w = sol.dual[static_cast<std::size_t>(1 + j)] +
                                 sol.dual[static_cast<std::size_t>(1 + k_ + j)];
                u[ju] = (w > 0.0) ? b.fiv[ju].lo : b.fiv[ju].hi;
                if (w <= 0.0) key |= (1ULL << j);
                rc -= w * u[ju];
            }
            max_rc = std::max(max_rc, rc);
            if (rc > 1e-9 && corner_keys_.find(key) == corner_keys_.end()) {
                adds.push_back({rc, static_cast<int>(bi), std::move(u), key});
            }
        }

        if (adds.empty()) {
            if (phase1) {
                out.infeasible = true;  // no corner restores feasibility: sound at any partition
                return out;
            }
            out.upper = sol.value + std::max(0.0, max_rc) + 1e-9;
            out.box_weight.assign(boxes_.size(), 0.0);
            col_theta_.assign(ncols, 0.0);
            for (std::size_t i = 0; i < ncols; ++i) {
                if (i < sol.theta.size() && sol.theta[i] > 0.0) {
                    out.box_weight[static_cast<std::size_t>(col_box_[i])] += sol.theta[i];
                    col_theta_[i] = sol.theta[i];
                }
            }
            return out;
        }
        std::sort(adds.begin(), adds.end(), [](const Improving& a, const Improving& b) {
            if (a.rc != b.rc) return a.rc > b.rc;
            return a.box < b.box;
        });
        const std::size_t cap = std::min<std::size_t>(adds.size(), 32);
        for (std::size_t i = 0; i < cap; ++i) {
            corner_keys_.insert(adds[i].key);
            col_c_.push_back(boxes_[static_cast<std::size_t>(adds[i].box)].ghi);
            col_u_.push_back(std::move(adds[i].u));
            col_box_.push_back(adds[i].box);
        }
    }
    // column-generation budget exhausted: re-solve once and take the safe bound
    ThetaLP lp;
    const std::size_t ncols = col_c_.size();
    lp.c = col_c_;
    lp.F.assign(static_cast<std::size_t>(k_), std::vector<double>(ncols));
    for (std::size_t i = 0; i < ncols; ++i) {
        for (int j = 0; j < k_; ++j) {
            lp.F[static_cast<std::size_t>(j)][i] = col_u_[i][static_cast<std::size_t>(j)];
        }
    }
    lp.moment_box = p_.moment_set;
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) {
        out.infeasible = true;
        return out;
    }
    double max_rc = 0.0;
    for (const BnbBox& b : boxes_) {
        if (!b.alive) continue;
        double rc = b.ghi - sol.dual[0];
        for (int j = 0; j < k_; ++j) {
            const double w = sol.dual[static_cast<std::size_t>(1 + j)] +
                             sol.dual[static_cast<std::size_t>(1 + k_ + j)];
            rc -= w * ((w > 0.0) ? b.fiv[static_cast<std::size_t>(j)].lo
                                 : b.fiv[static_cast<std::size_t>(j)].hi);
        }
        max_rc = std::max(max_rc, rc);
    }
    out.upper = sol.value + std::max(0.0, max_rc) + 1e-9;
    out.box_weight.assign(boxes_.size(), 0.0);
    col_theta_.assign(ncols, 0.0);
    for (std::size_t i = 0; i < ncols; ++i) {
        if (i < sol.theta.size() && sol.theta[i] > 0.0) {
            out.box_weight[static_cast<std::size_t>(col_box_[i])] += sol.theta[i];
            col_theta_[i] = sol.theta[i];
        }
    }
    return out;
}

void Solver::compact_columns(const std::vector<std::pair<int, int>>& remap) {
    // Keep only the mass-carrying columns of the last master solve; column
    // generation re-prices everything else on demand, so the master LP stays
    // small even when the partition grows to thousands of boxes. A split
    // parent's basic column is clipped into one child's moment intervals to
    // keep the next master solve warm.
    std::vector<double> c;
    std::vector<std::vector<double>> u;
    std::vector<int> owner;
    corner_keys_.clear();
    for (std::size_t i = 0; i < col_c_.size(); ++i) {
        const double th = i < col_theta_.size() ? col_theta_[i] : 0.0;
        if (th <= 1e-12) continue;
        int box = col_box_[i];
        std::vector<double> uu = std::move(col_u_[i]);
        if (!boxes_[static_cast<std::size_t>(box)].alive) {
            int child = -1;
            for (const auto& pr : remap) {
                if (pr.first == box) {
                    child = pr.second;
                    break;
                }
            }
            if (child < 0) continue;
            const BnbBox& cb = boxes_[static_cast<std::size_t>(child)];
            for (int j = 0; j < k_; ++j) {
                const Interval& iv = cb.fiv[static_cast<std::size_t>(j)];
                uu[static_cast<std::size_t>(j)] =
                    std::min(std::max(uu[static_cast<std::size_t>(j)], iv.lo), iv.hi);
            }
            box = child;
        }
        c.push_back(boxes_[static_cast<std::size_t>(box)].ghi);
        u.push_back(std::move(uu));
        owner.push_back(box);
    }
    if (c.empty()) {
        for (std::size_t bi = 0; bi < boxes_.size(); ++bi) {
            if (boxes_[bi].alive) {
                col_c_.clear();
                col_u_.clear();
                col_box_.clear();
                seed_column(bi);
                col_theta_.clear();
                return;
            }
        }
    }
    col_c_.swap(c);
    col_u_.swap(u);
    col_box_.swap(owner);
    col_theta_.clear();
}

bool Solver::split_round(const std::vector<double>& box_weight) {
    struct Pick {
        double priority;
        std::size_t bi;
    };
    std::vector<Pick> picks;
    std::size_t widest_mixed = boxes_.size();
    double widest_mixed_w = 0.0;
    for (std::size_t bi = 0; bi < boxes_.size(); ++bi) {
        const BnbBox& b = boxes_[bi];
        if (!b.alive) continue;
        double wmax = 0.0;
        for (int j = 0; j < d_; ++j) {
            wmax = std::max(wmax, b.hi[static_cast<std::size_t>(j)] - b.lo[static_cast<std::size_t>(j)]);
        }
        if (wmax <= 1e-9) continue;
        const double weight = bi < box_weight.size() ? box_weight[bi] : 0.0;
        if (prob_ && b.tag == BoxTag::Mixed && weight > 1e-12 && wmax > widest_mixed_w) {
            widest_mixed_w = wmax;
            widest_mixed = bi;
        }
        const double priority = weight * b.err_width;
        if (priority > 1e-15) picks.push_back({priority, bi});
    }
    std::sort(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) {
        if (a.priority != b.priority) return a.priority > b.priority;
        return a.bi < b.bi;
    });
    std::vector<std::size_t> chosen;
    for (const Pick& pk : picks) {
        if (chosen.size() >= 8) break;
        chosen.push_back(pk.bi);
    }
    if (widest_mixed < boxes_.size() &&
        std::find(chosen.begin(), chosen.end(), widest_mixed) == chosen.end()) {
        chosen.push_back(widest_mixed);
    }
    if (chosen.empty()) return false;

    std::vector<std::pair<int, int>> remap;  // split parent -> first child
    for (std::size_t bi : chosen) {
        int split_dim = 0;
        double wmax = -1.0;
        for (int j = 0; j < d_; ++j) {
            const double w = boxes_[bi].hi[static_cast<std::size_t>(j)] -
                             boxes_[bi].lo[static_cast<std::size_t>(j)];
            if (w > wmax) {
                wmax = w;
                split_dim = j;
            }
        }
        const double mid = 0.5 * (boxes_[bi].lo[static_cast<std::size_t>(split_dim)] +
                                  boxes_[bi].hi[static_cast<std::size_t>(split_dim)]);
        std::vector<double> lo = boxes_[bi].lo, hi = boxes_[bi].hi;
        boxes_[bi].alive = false;
        remap.push_back({static_cast<int>(bi), static_cast<int>(boxes_.size())});
        hi[static_cast<std::size_t>(split_dim)] = mid;
        add_box(boxes_[bi].lo, hi);
        lo[static_cast<std::size_t>(split_dim)] = mid;
        add_box(std::move(lo), boxes_[bi].hi);
    }
    compact_columns(remap);
    return true;
}

// ---------------------------------------------------------------------------
// Pool LP + Caratheodory reduction
// ---------------------------------------------------------------------------

void Solver::caratheodory_reduce(std::vector<Candidate>& pts, std::vector<double>& th, int k,
                                 int L) {
    while (static_cast<int>(pts.size()) > L) {
        const int m = static_cast<int>(pts.size());
        const int rows = k + 1;
        // A d = 0 with A = [1; f_1; ...; f_k] has a nontrivial solution since
        // m > k+1; find it by Gaussian elimination.
        std::vector<std::vector<double>> A(static_cast<std::size_t>(rows),
                                           std::vector<double>(static_cast<std::size_t>(m)));
        for (int i = 0; i < m; ++i) {
            A[0][static_cast<std::size_t>(i)] = 1.0;
            for (int j = 0; j < k; ++j) {
                A[static_cast<std::size_t>(j + 1)][static_cast<std::size_t>(i)] =
                    pts[static_cast<std::size_t>(i)].mom[static_cast<std::size_t>(j)];
            }
        }
        std::vector<int> pivot_col(static_cast<std::size_t>(rows), -1);
        std::vector<bool> is_pivot(static_cast<std::size_t>(m), false);
        int r = 0;
        for (int c = 0; c < m && r < rows; ++c) {
            int best = -1;
            double bestval = 1e-12;
            for (int i = r; i < rows; ++i) {
                const double v = std::fabs(A[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]);
                if (v > bestval) {
                    bestval = v;
                    best = i;
                }
            }
            if (best < 0) continue;
            std::swap(A[static_cast<std::size_t>(r)], A[static_cast<std::size_t>(best)]);
            const double piv = A[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            for (int j = 0; j < m; ++j) A[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] /= piv;
            for (int i = 0; i < rows; ++i) {
                if (i == r) continue;
                const double f = A[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
                if (f == 0.0) continue;
                for (int j = 0; j < m; ++j) {
                    A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
                        f * A[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
                }
            }
            pivot_col[static_cast<std::size_t>(r)] = c;
            is_pivot[static_cast<std::size_t>(c)] = true;
            ++r;
        }
        int free_col = -1;
        for (int c = 0; c < m; ++c) {
            if (!is_pivot[static_cast<std::size_t>(c)]) {
                free_col = c;
                break;
            }
        }
        if (free_col < 0) break;  // full column rank: already minimal
        std::vector<double> dvec(static_cast<std::size_t>(m), 0.0);
        dvec[static_cast<std::size_t>(free_col)] = 1.0;
        for (int i = 0; i < rows; ++i) {
            if (pivot_col[static_cast<std::size_t>(i)] >= 0) {
                dvec[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(i)])] =
                    -A[static_cast<std::size_t>(i)][static_cast<std::size_t>(free_col)];
            }
        }
        double dobj = 0.0;
        for (int i = 0; i < m; ++i) dobj += dvec[static_cast<std::size_t>(i)] * pts[static_cast<std::size_t>(i)].obj;
        if (dobj < 0.0) {
            for (double& v : dvec) v = -v;
        }
        double tmax = kInf;
        for (int i = 0; i < m; ++i) {
            if (dvec[static_cast<std::size_t>(i)] < -1e-15) {
                tmax = std::min(tmax, -th[static_cast<std::size_t>(i)] / dvec[static_cast<std::size_t>(i)]);
            }
        }
        if (!std::isfinite(tmax)) {
            // flip: the direction with nonincreasing objective must hit zero
            for (double& v : dvec) v = -v;
            tmax = kInf;
            for (int i = 0; i < m; ++i) {
                if (dvec[static_cast<std::size_t>(i)] < -1e-15) {
                    tmax = std::min(tmax,
                                    -th[static_cast<std::size_t>(i)] / dvec[static_cast<std::size_t>(i)]);
                }
            }
            if (!std::isfinite(tmax)) break;
        }
        for (int i = 0; i < m; ++i) th[static_cast<std::size_t>(i)] += tmax * dvec[static_cast<std::size_t>(i)];
        std::vector<Candidate> np;
        std::vector<double> nth;
        for (int i = 0; i < m; ++i) {
            if (th[static_cast<std::size_t>(i)] > 1e-14) {
                np.push_back(std::move(pts[static_cast<std::size_t>(i)]));
                nth.push_back(th[static_cast<std::size_t>(i)]);
            }
        }
        if (static_cast<int>(np.size()) >= m) break;  // numerical stall: stop
        pts.swap(np);
        th.swap(nth);
    }
}

bool Solver::pool_solve(double& lower, DiscreteDistribution& witness) const {
    if (pool_.empty()) return false;
    LpSolution sol = solve_candidates(pool_);
    if (sol.status != LpStatus::Optimal) return false;

    std::vector<Candidate> pts;
    std::vector<double> th;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
        if (sol.theta[i] > 1e-12) {
            pts.push_back(pool_[i]);
            th.push_back(sol.theta[i]);
        }
    }
    if (pts.empty()) {
        // fully degenerate optimum (all mass below threshold) should not occur;
        // fall back to the largest weight
        std::size_t arg = 0;
        for (std::size_t i = 1; i < pool_.size(); ++i) {
            if (sol.theta[i] > sol.theta[arg]) arg = i;
        }
        pts.push_back(pool_[arg]);
        th.push_back(1.0);
    }
    caratheodory_reduce(pts, th, k_, L_);

    double mass = 0.0, value = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        mass += th[i];
        value += th[i] * pts[i].obj;
    }
    // dropping tiny-weight columns can leave a sub-1e-6 mass deficit;
    // renormalizing keeps the witness a genuine probability distribution
    if (mass > 0.0 && std::fabs(mass - 1.0) <= 1e-6) {
        for (double& t : th) t /= mass;
        value /= mass;
    }
    lower = value;
    witness.points.clear();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        witness.points.push_back({pts[i].x, th[i]});
    }
    return true;
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

BoundCertificate Solver::run() {
    BoundCertificate cert;
    cert.tolerance_used = s_.bnb_tol;

    // probability-mode short circuit: the event is empty on the whole domain
    if (prob_) {
        bool surely_empty = false;
        try {
            Interval hv = eval_interval(p_.event, p_.domain);
            surely_empty = hv.lo > 0.0;
        } catch (const Error&) {
            surely_empty = false;
        }
        if (surely_empty) {
            cert.upper = 0.0;
            cert.lower = 0.0;
            cert.status = CertStatus::Certified;
            // best-effort feasibility witness for the zero bound
            std::vector<std::vector<double>> seeds;
            {
                std::vector<double> center(static_cast<std::size_t>(d_));
                for (int j = 0; j < d_; ++j) {
                    const std::size_t u = static_cast<std::size_t>(j);
                    center[u] = 0.5 * (p_.domain.lower[u] + p_.domain.upper[u]);
                }
                seeds.push_back(std::move(center));
            }
            if (d_ <= 10) {
                for (int mask = 0; mask < (1 << d_); ++mask) {
                    std::vector<double> corner(static_cast<std::size_t>(d_));
                    for (int j = 0; j < d_; ++j) {
                        const std::size_t u = static_cast<std::size_t>(j);
                        corner[u] = (mask >> j) & 1 ? p_.domain.upper[u] : p_.domain.lower[u];
                    }
                    seeds.push_back(std::move(corner));
                }
            }
            for (const auto& x : seeds) pool_add(x);
            double lower_unused = 0.0;
            DiscreteDistribution w;
            if (pool_solve(lower_unused, w)) {
                cert.witness = std::move(w);
            } else {
                // seed points alone cannot meet the moment box: search briefly
                std::vector<StartResult> starts;
                run_multistart(starts);
                for (const StartResult& sr : starts) {
                    for (const auto& x : sr.points) pool_add(x);
                    cert.iterations += sr.iterations;
                }
                if (pool_solve(lower_unused, w)) {
                    cert.witness = std::move(w);
                } else {
                    seed_root_partition();
                    RelaxOutcome root = solve_master();
                    cert.iterations += root.cg_iters;
                    cert.boxes_explored = boxes_created_;
                    if (root.infeasible) cert.status = CertStatus::Infeasible;
                    // else: the zero bound stands even without an explicit witness
                }
            }
            cert.boxes_explored = boxes_created_;
            if (!cert.witness.points.empty()) check_distribution(cert.witness, p_, 1e-8);
            return cert;
        }
    }

    // ---- heuristic lower bound ----
    std::vector<StartResult> starts;
    run_multistart(starts);
    for (const StartResult& sr : starts) {
        cert.iterations += sr.iterations;
        for (const auto& x : sr.points) pool_add(x);
    }
    if (d_ <= 10) {
        for (int mask = 0; mask < (1 << d_); ++mask) {
            std::vector<double> corner(static_cast<std::size_t>(d_));
            for (int j = 0; j < d_; ++j) {
                const std::size_t u = static_cast<std::size_t>(j);
                corner[u] = (mask >> j) & 1 ? p_.domain.upper[u] : p_.domain.lower[u];
            }
            pool_add(corner);
        }
    }

    double lower = -kInf;
    DiscreteDistribution witness;
    bool have_witness = pool_solve(lower, witness);

    // ---- certified upper bound ----
    seed_root_partition();
    double upper = kInf;
    bool infeasible = false;
    for (int round = 0; round < 1200; ++round) {
        RelaxOutcome rel = solve_master();
        cert.iterations += rel.cg_iters;
        if (rel.infeasible) {
            infeasible = true;
            break;
        }
        upper = std::min(upper, rel.upper);

        const double cur_lower = have_witness ? lower : -kInf;
        double gap = upper - cur_lower;
        if (prob_) gap = std::min(1.0, upper) - std::max(0.0, cur_lower);
        if (gap <= s_.bnb_tol) break;
        if (boxes_created_ >= s_.bnb_max_boxes) break;

        // reseed the search from the mass-carrying boxes, polish, re-pool;
        // after the early rounds the incumbent rarely moves, so poll sparsely
        if (round < 12 || round % 6 == 0) {
            std::vector<std::pair<double, std::size_t>> heavy;
            for (std::size_t bi = 0; bi < rel.box_weight.size(); ++bi) {
                if (rel.box_weight[bi] > 1e-12 && boxes_[bi].alive) {
                    heavy.push_back({rel.box_weight[bi], bi});
                }
            }
            std::sort(heavy.begin(), heavy.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            std::vector<std::vector<double>> seed_pts;
            for (const auto& hv : heavy) {
                if (static_cast<int>(seed_pts.size()) == L_) break;
                const std::size_t bi = hv.second;
                std::vector<double> center(static_cast<std::size_t>(d_));
                for (int j = 0; j < d_; ++j) {
                    const std::size_t u = static_cast<std::size_t>(j);
                    center[u] = 0.5 * (boxes_[bi].lo[u] + boxes_[bi].hi[u]);
                }
                seed_pts.push_back(std::move(center));
            }
            while (static_cast<int>(seed_pts.size()) < L_ && !seed_pts.empty()) {
                seed_pts.push_back(seed_pts.front());
            }
            if (!seed_pts.empty()) {
                StartResult polish = search_from(std::move(seed_pts), 30);
                cert.iterations += polish.iterations;
                for (const auto& x : polish.points) pool_add(x);
                double nl = -kInf;
                DiscreteDistribution nw;
                if (pool_solve(nl, nw) && (!have_witness || nl > lower)) {
                    lower = nl;
                    witness = std::move(nw);
                    have_witness = true;
                }
            }
        }
        {
            const double cl = have_witness ? lower : -kInf;
            double g2 = upper - cl;
            if (prob_) g2 = std::min(1.0, upper) - std::max(0.0, cl);
            if (g2 <= s_.bnb_tol) break;
        }
        if (!split_round(rel.box_weight)) break;
    }
    cert.boxes_explored = boxes_created_;

    if (infeasible) {
        cert.upper = 0.0;
        cert.lower = 0.0;
        cert.witness.points.clear();
        cert.status = CertStatus::Infeasible;
        return cert;
    }

    if (have_witness) upper = std::max(upper, lower);  // absorb sub-1e-9 LP roundoff
    if (prob_) {
        upper = std::min(1.0, std::max(0.0, upper));
        if (have_witness) lower = std::max(0.0, std::min(lower, upper));
    }
    cert.upper = upper;
    if (have_witness) {
        cert.lower = lower;
        cert.witness = std::move(witness);
        check_distribution(cert.witness, p_, 1e-8);
    } else {
        // No feasible support set was found, so no attained value can be
        // reported. Feasibility itself is also unproven, and an infeasible
        // problem has value 0 by the sup-over-empty-set convention, so the
        // only floor that is valid either way is min(inf g, 0).
        double floor = 0.0;
        if (!prob_) {
            try {
                Interval gi = eval_interval(p_.objective, p_.domain);
                if (std::isfinite(gi.lo)) floor = std::min(floor, gi.lo);
            } catch (const Error&) {
            }
        }
        cert.lower = std::min(floor, upper);
        cert.witness.points.clear();
    }
    const double gap = cert.upper - cert.lower;
    cert.status = (have_witness && gap <= s_.bnb_tol + 1e-12) ? CertStatus::Certified
                                                              : CertStatus::HeuristicOnly;
    return cert;
}

} // namespace

void validate_settings(const SolverSettings& s) {
    if (s.multistarts < 1 || s.gradient_iters < 1 || s.bnb_max_boxes < 1 || s.threads < 1 ||
        !(s.gradient_tol > 0.0) || !(s.bnb_tol > 0.0)) {
        throw Error(ErrorCode::ParamOutOfRange, "solver settings must all be positive");
    }
}

BoundCertificate sup_expectation(const MomentProblem& p, const SolverSettings& s) {
    validate_problem(p);
    validate_settings(s);
    if (p.indicator_objective || !p.objective) {
        throw Error(ErrorCode::BadExpr,
                    "sup_expectation requires an expression objective, not the event indicator");
    }
    Solver solver(p, s, false);
    return solver.run();
}

BoundCertificate sup_probability(const MomentProblem& p, const SolverSettings& s) {
    validate_problem(p);
    validate_settings(s);
    if (!p.indicator_objective) {
        throw Error(ErrorCode::BadExpr,
                    "sup_probability requires the indicator objective over the event set");
    }
    if (!p.event) {
        throw Error(ErrorCode::BadExpr, "sup_probability requires an event expression");
    }
    Solver solver(p, s, true);
    return solver.run();
}

} // namespace wcb
