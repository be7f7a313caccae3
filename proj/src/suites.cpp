#include "wcbound/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <utility>

#include "wcbound/chernoff.hpp"
#include "wcbound/error.hpp"
#include "wcbound/expr.hpp"
#include "wcbound/lp.hpp"
#include "wcbound/model.hpp"
#include "wcbound/oracle.hpp"
#include "wcbound/rng.hpp"
#include "wcbound/routh.hpp"
#include "wcbound/vecbounds.hpp"
#include "wcbound/worstcase.hpp"

#include "../vendor/json.hpp"

namespace wcb {

namespace {

using nlohmann::json;

constexpr double kPhi = 1.6180339887498948482;
constexpr long kReps = 100000;

std::string cellf(const char* fmt, ...) {
    char buf[192];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return std::string(buf);
}

void push_row(SuiteReport& rep, std::string cell, double bound, double ref, double margin,
              bool violation) {
    rep.rows.push_back({std::move(cell), bound, ref, margin, violation});
    ++rep.cells;
    if (violation) ++rep.violations;
}

// bound + 3*stderr >= p_hat is the dominance requirement
void push_dominance(SuiteReport& rep, std::string cell, double bound, const McEstimate& est) {
    const double margin = bound + 3.0 * est.stderr_est - est.p_hat;
    push_row(rep, std::move(cell), bound, est.p_hat, margin, margin < 0.0);
}

// Crossing boundary for the uniform bounds: the path S_j crosses
//   boundary(j) = m*theta + slope*(j - m),  slope = phi(zeta)/zeta = theta + rate/zeta.
// The Monte Carlo estimate of crossing at any j <= horizon is a truncated
// lower estimate of the all-time event the bound covers.
void crossing_cell(SuiteReport& rep, const std::string& cell, const InequalityResult& r,
                   double theta, long m, SamplerSpec spec, int threads, long horizon = 0) {
    const double slope = theta + r.rate / r.zeta;
    const double md = static_cast<double>(m);
    ExprPtr boundary =
        node(Op::Add, {lit(md * (theta - slope)), node(Op::Mul, {lit(slope), var(1)})});
    spec.reps = kReps;
    McEstimate est = mc_sup_crossing(spec, boundary, horizon > 0 ? horizon : 20 * m, threads);
    push_dominance(rep, cell, r.clipped_bound, est);
}

std::uint64_t cell_seed(std::uint64_t base, long idx) {
    return sm64_finalize(base + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(idx + 1));
}

// ---------------------------------------------------------------------------
// Dominance suites (criterion: bound + 3*stderr >= p_hat on every cell)
// ---------------------------------------------------------------------------

SuiteReport suite_bernoulli(std::uint64_t seed, int threads) {
    SuiteReport rep{"bernoulli", 0, 0, {}, {}};
    const double mus[] = {0.2, 0.35, 0.5, 0.65, 0.8};
    const double dths[] = {0.1, 0.15};
    const long ms[] = {10, 40};
    long idx = 0;
    for (double mu : mus)
        for (double dth : dths)
            for (long m : ms) {
                const double theta = mu + dth;
                InequalityResult r = uniform_bound_bernoulli(mu, theta, m);
                SamplerSpec spec;
                spec.family = Family::Bernoulli;
                spec.p = mu;
                spec.seed = cell_seed(seed, idx);
                crossing_cell(rep, cellf("mu=%.2f theta=%.2f m=%ld", mu, theta, m), r, theta, m,
                              spec, threads);
                ++idx;
            }
    return rep;
}

SuiteReport suite_bounded_variance(std::uint64_t seed, int threads) {
    SuiteReport rep{"bounded-variance", 0, 0, {}, {}};
    struct FamilyCase {
        Family family;
        const char* name;
        double b, nu;
        double eps[5];
    };
    const FamilyCase cases[] = {
        {Family::CenteredCoin, "coin", 0.5, 0.25, {0.05, 0.1, 0.2, 0.3, 0.4}},
        {Family::GoldenZ, "golden", kPhi, 1.0, {0.2, 0.4, 0.6, 0.8, 1.0}},
    };
    const long ms[] = {10, 40};
    long idx = 0;
    for (const FamilyCase& fc : cases)
        for (double eps : fc.eps)
            for (long m : ms) {
                InequalityResult r = uniform_bound_bounded_variance(fc.b, fc.nu, eps, m);
                SamplerSpec spec;
                spec.family = fc.family;
                spec.seed = cell_seed(seed, idx);
                crossing_cell(rep, cellf("%s eps=%.2f m=%ld", fc.name, eps, m), r, eps, m, spec,
                              threads);
                ++idx;
            }
    return rep;
}

SuiteReport suite_normal(std::uint64_t seed, int threads) {
    SuiteReport rep{"normal", 0, 0, {}, {}};
    const double mus[] = {0.0, 1.0};
    const double nus[] = {0.5, 2.0};
    const double dths[] = {0.2, 0.4, 0.6, 0.8, 1.0};
    const long m = 20;
    long idx = 0;
    for (double mu : mus)
        for (double nu : nus)
            for (double dth : dths) {
                const double theta = mu + dth;
                InequalityResult r = uniform_bound_normal(mu, nu, theta, m);
                SamplerSpec spec;
                spec.family = Family::Normal;
                spec.mu = mu;
                spec.nu = nu;
                spec.seed = cell_seed(seed, idx);
                crossing_cell(rep, cellf("mu=%.1f nu=%.1f theta=%.1f m=%ld", mu, nu, theta, m), r,
                              theta, m, spec, threads);
                ++idx;
            }
    return rep;
}

SuiteReport suite_poisson(std::uint64_t seed, int threads) {
    SuiteReport rep{"poisson", 0, 0, {}, {}};
    const double lambdas[] = {0.5, 1.0, 2.0, 4.0};
    const double mults[] = {1.3, 1.6, 2.0, 2.5, 3.0};
    const long m = 15;
    long idx = 0;
    for (double lambda : lambdas)
        for (double mult : mults) {
            const double theta = lambda * mult;
            InequalityResult r = uniform_bound_poisson(lambda, theta, m);
            SamplerSpec spec;
            spec.family = Family::Poisson;
            spec.lambda = lambda;
            spec.seed = cell_seed(seed, idx);
            crossing_cell(rep, cellf("lambda=%.1f theta=%.2f m=%ld", lambda, theta, m), r, theta,
                          m, spec, threads);
            ++idx;
        }
    return rep;
}

SuiteReport suite_chernoff_generic(std::uint64_t seed, int threads) {
    SuiteReport rep{"chernoff-generic", 0, 0, {}, {}};
    struct GenericCase {
        Family family;
        const char* name;
        const char* phi;
        double halfwidth;  // zeta search interval (-halfwidth, halfwidth)
        double eps0, deps;
    };
    // centered +-1/2 coin cumulant (wide interval: admissible eps < phi(b)/b
    // and the grid tops out at 0.40); golden two-point cumulant with its
    // exact weights ln(p+ e^{phi s} + p- e^{-s/phi})
    const GenericCase cases[] = {
        {Family::CenteredCoin, "coin", "ln((exp(x1/2)+exp(-x1/2))/2)", 30.0, 0.04, 0.04},
        {Family::GoldenZ, "golden",
         "ln(0.27639320225002103*exp(1.6180339887498949*x1) + "
         "0.72360679774997897*exp(-0.61803398874989485*x1))",
         6.0, 0.12, 0.12},
    };
    long idx = 0;
    for (const GenericCase& gc : cases) {
        CumulantSpec cs;
        cs.phi = parse(gc.phi, 1);
        cs.a = -gc.halfwidth;
        cs.b = gc.halfwidth;
        for (int i = 0; i < 10; ++i) {
            const double eps = gc.eps0 + gc.deps * i;
            ChernoffResult cr = chernoff_inf(cs, eps);
            SamplerSpec spec;
            spec.family = gc.family;
            spec.seed = cell_seed(seed, idx);
            crossing_cell(rep, cellf("%s eps=%.2f", gc.name, eps), cr.res, eps, 1, spec, threads,
                          200);
            ++idx;
        }
    }
    return rep;
}

void vector_spec_cases(std::vector<std::pair<SamplerSpec, std::string>>& out) {
    const Family fams[] = {Family::SphereUniform, Family::BallUniform};
    const char* names[] = {"sphere", "ball"};
    for (int f = 0; f < 2; ++f)
        for (int d = 2; d <= 3; ++d) {
            SamplerSpec spec;
            spec.family = fams[f];
            spec.dim = d;
            out.push_back({spec, cellf("%s d=%d", names[f], d)});
        }
}

SuiteReport suite_mgf_vector(std::uint64_t seed, int threads) {
    SuiteReport rep{"mgf-vector", 0, 0, {}, {}};
    // g(s) = e^{|s|} dominates e^{s} everywhere, so the envelope premise holds
    // for unit-norm increments in any direction
    ExprPtr g = parse("exp(abs(x1))", 1);
    const double epss[] = {0.3, 0.45, 0.6, 0.75, 0.9};
    const int n = 5;
    std::vector<std::pair<SamplerSpec, std::string>> specs;
    vector_spec_cases(specs);
    long idx = 0;
    for (auto& sc : specs)
        for (double eps : epss) {
            InequalityResult r = mgf_vector_bound(g, 5.0, eps, n);
            SamplerSpec spec = sc.first;
            spec.n = n;
            spec.reps = kReps;
            spec.seed = cell_seed(seed, idx);
            McEstimate est = mc_tail(spec, eps, threads);
            push_dominance(rep, cellf("%s eps=%.2f n=%d", sc.second.c_str(), eps, n),
                           r.clipped_bound, est);
            ++idx;
        }
    return rep;
}

SuiteReport suite_iid_bounded(std::uint64_t seed, int threads) {
    SuiteReport rep{"iid-bounded", 0, 0, {}, {}};
    const double epss[] = {0.2, 0.4, 0.6, 0.8, 1.0};
    const long n = 10;
    std::vector<std::pair<SamplerSpec, std::string>> specs;
    vector_spec_cases(specs);
    long idx = 0;
    for (auto& sc : specs)
        for (double eps : epss) {
            InequalityResult r = iid_bounded_bound(1.0, n, eps);
            SamplerSpec spec = sc.first;
            spec.n = n;
            spec.reps = kReps;
            spec.seed = cell_seed(seed, idx);
            McEstimate est = mc_tail(spec, eps, threads);
            push_dominance(rep, cellf("%s eps=%.2f n=%ld", sc.second.c_str(), eps, n),
                           r.clipped_bound, est);
            ++idx;
        }
    return rep;
}

SuiteReport suite_martingale(std::uint64_t seed, int threads) {
    SuiteReport rep{"martingale", 0, 0, {}, {}};
    const double epss[] = {0.2, 0.4, 0.6, 0.8, 1.0};
    const long n = 10;
    const std::vector<double> c(static_cast<std::size_t>(n), 1.0);  // unit increment bounds
    std::vector<std::pair<SamplerSpec, std::string>> specs;
    vector_spec_cases(specs);
    long idx = 0;
    for (auto& sc : specs)
        for (double eps : epss) {
            // total-deviation form: ||S_n|| >= n*eps
            InequalityResult r = martingale_bound(c, static_cast<double>(n) * eps);
            SamplerSpec spec = sc.first;
            spec.n = n;
            spec.reps = kReps;
            spec.seed = cell_seed(seed, idx);
            McEstimate est = mc_tail(spec, eps, threads);
            push_dominance(rep, cellf("%s eps=%.2f n=%ld", sc.second.c_str(), eps, n),
                           r.clipped_bound, est);
            ++idx;
        }
    return rep;
}

SuiteReport suite_variance_range(std::uint64_t seed, int threads) {
    SuiteReport rep{"variance-range", 0, 0, {}, {}};
    const double epss[] = {0.3, 0.45, 0.6, 0.75, 0.9};
    const long n = 10;
    std::vector<std::pair<SamplerSpec, std::string>> specs;
    vector_spec_cases(specs);
    long idx = 0;
    for (auto& sc : specs)
        for (double eps : epss) {
            const int d = sc.first.dim;
            // E||X||^2: 1 on the sphere, d/(d+2) in the ball
            const double sigma2 = sc.first.family == Family::SphereUniform
                                      ? 1.0
                                      : static_cast<double>(d) / (d + 2);
            VarianceRangeBound vr = variance_range_bound(std::sqrt(sigma2), 1.0, n, eps);
            SamplerSpec spec = sc.first;
            spec.n = n;
            spec.reps = kReps;
            spec.seed = cell_seed(seed, idx);
            McEstimate est = mc_tail(spec, eps, threads);
            push_dominance(rep, cellf("%s eps=%.2f n=%ld", sc.second.c_str(), eps, n),
                           std::min(1.0, vr.tier1), est);
            ++idx;
        }
    return rep;
}

SuiteReport suite_small_deviation(std::uint64_t seed, int threads) {
    SuiteReport rep{"small-deviation", 0, 0, {}, {}};
    const double xs[] = {0.4, 0.8, 1.2, 1.6, 2.0};
    const long ns[] = {16, 64};
    long idx = 0;
    for (int d = 2; d <= 3; ++d)
        for (long n : ns)
            for (double x : xs) {
                const double sn = std::sqrt(static_cast<double>(n));  // s_n for unit increments
                InequalityResult r = small_deviation_bound(1.0 / sn, x);
                SamplerSpec spec;
                spec.family = Family::SphereUniform;
                spec.dim = d;
                spec.n = n;
                spec.reps = kReps;
                spec.seed = cell_seed(seed, idx);
                // event ||S_n|| >= x*s_n, i.e. per-sample threshold x/sqrt(n)
                McEstimate est = mc_tail(spec, x / sn, threads);
                push_dominance(rep, cellf("d=%d n=%ld x=%.1f", d, n, x), r.clipped_bound, est);
                ++idx;
            }
    return rep;
}

SuiteReport suite_componentwise(std::uint64_t seed, int threads) {
    (void)threads;  // the custom loop is cheap enough to stay serial
    SuiteReport rep{"componentwise", 0, 0, {}, {}};
    const double eps_factors[] = {1.15, 1.35};
    long idx = 0;
    for (int d = 2; d <= 6; ++d)
        for (double f : eps_factors) {
            const double eps = f * std::sqrt(static_cast<double>(d));
            // one vector X per replicate, d independent golden components;
            // empirical Pr{||X|| >= eps}
            long hits = 0;
            const std::uint64_t s = cell_seed(seed, idx);
            for (long r = 0; r < kReps; ++r) {
                RngStream stream(s, static_cast<std::uint64_t>(r));
                double norm2 = 0.0;
                for (int j = 0; j < d; ++j) {
                    const double z = stream.next_golden_z();
                    norm2 += z * z;
                }
                if (norm2 >= eps * eps) ++hits;
            }
            McEstimate est;
            est.reps = kReps;
            est.p_hat = static_cast<double>(hits) / kReps;
            est.stderr_est = std::sqrt(est.p_hat * (1.0 - est.p_hat) / kReps);

            InequalityResult r1 = componentwise_tail_radius(
                std::vector<double>(static_cast<std::size_t>(d), kPhi),
                static_cast<double>(d), eps);
            push_dominance(rep, cellf("radius d=%d eps=%.3f", d, eps), r1.clipped_bound, est);
            InequalityResult r2 = componentwise_tail_range(
                std::vector<std::pair<double, double>>(static_cast<std::size_t>(d),
                                                       {-1.0 / kPhi, kPhi}),
                eps);
            push_dominance(rep, cellf("range d=%d eps=%.3f", d, eps), r2.clipped_bound, est);
            ++idx;
        }
    return rep;
}

// ---------------------------------------------------------------------------
// Deterministic check suites
// ---------------------------------------------------------------------------

SuiteReport suite_golden(std::uint64_t, int) {
    SuiteReport rep{"golden", 0, 0, {}, {}};
    const double sqrt5 = std::sqrt(5.0);
    {
        const double m1 = golden_moment(1);
        push_row(rep, "E[Z]=0", m1, 0.0, 1e-15 - std::fabs(m1), std::fabs(m1) > 1e-15);
        const double m2 = golden_moment(2);
        push_row(rep, "E[Z^2]=1", m2, 1.0, 1e-14 - std::fabs(m2 - 1.0),
                 std::fabs(m2 - 1.0) > 1e-14);
    }
    for (int k = 2; k <= 20; ++k) {
        const double mk = golden_moment(k);
        const double slack = mk - (1.0 - 1e-12);
        push_row(rep, cellf("E[Z^%d]>=1", k), mk, 1.0, slack, slack < 0.0);
    }
    GoldenDistribution g;
    const double range = g.value_plus - g.value_minus;
    push_row(rep, "U-L=sqrt5", range, sqrt5, 1e-15 - std::fabs(range - sqrt5),
             std::fabs(range - sqrt5) > 1e-15);
    const double peak = std::max(g.value_plus, std::fabs(g.value_minus));
    push_row(rep, "max(U,|L|)=phi", peak, g.phi, 1e-15 - std::fabs(peak - g.phi),
             std::fabs(peak - g.phi) > 1e-15);
    const double psum = g.p_plus + g.p_minus;
    push_row(rep, "p+ + p- = 1", psum, 1.0, 1e-15 - std::fabs(psum - 1.0),
             std::fabs(psum - 1.0) > 1e-15);
    const double mean = g.p_plus * g.value_plus + g.p_minus * g.value_minus;
    push_row(rep, "mean(Z)=0", mean, 0.0, 1e-15 - std::fabs(mean), std::fabs(mean) > 1e-15);
    return rep;
}

SuiteReport suite_asymptotic(std::uint64_t, int) {
    SuiteReport rep{"asymptotic", 0, 0, {}, {}};
    CumulantSpec cs;
    cs.phi = parse("ln((exp(x1/2)+exp(-x1/2))/2)", 1);
    cs.a = -6.0;
    cs.b = 6.0;
    const std::vector<double> eps_list = {0.1, 0.05, 0.025};
    std::vector<AsymptoticReport> reports = asymptotic_check(cs, 0.25, 0.0, eps_list);
    std::vector<double> rate_gap, ratio_gap;
    for (const AsymptoticReport& ar : reports) {
        rate_gap.push_back(std::fabs(ar.rate - ar.gaussian_rate));
        ratio_gap.push_back(std::fabs(ar.ratio_phi_zeta - ar.epsilon / 2.0));
        push_row(rep, cellf("eps=%.3f rate", ar.epsilon), ar.rate, ar.gaussian_rate,
                 rate_gap.back(), false);
        push_row(rep, cellf("eps=%.3f phi(z)/z", ar.epsilon), ar.ratio_phi_zeta, ar.epsilon / 2.0,
                 ratio_gap.back(), false);
    }
    for (std::size_t i = 0; i + 1 < rate_gap.size(); ++i) {
        const double contraction = rate_gap[i] / rate_gap[i + 1];
        push_row(rep, cellf("rate contraction %zu", i + 1), contraction, 6.0, contraction - 6.0,
                 contraction < 6.0);
        const double rc = ratio_gap[i] / ratio_gap[i + 1];
        push_row(rep, cellf("ratio contraction %zu", i + 1), rc, 3.0, rc - 3.0, rc < 3.0);
    }
    return rep;
}

// polynomial multiplication by a monic factor, coefficients highest degree first
std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> out(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
    return out;
}

SuiteReport suite_routh(std::uint64_t seed, int) {
    SuiteReport rep{"routh", 0, 0, {}, {}};
    // nominal plant quartic: margins must come out exactly (all-integer arithmetic)
    {
        StabilityReport nom = routh_stable(Polynomial{{1.0, 20.0, 124.0, 1040.0, 1600.0}});
        const double expected[] = {20.0, 1440.0, 857600.0, 1600.0};
        for (int j = 0; j < 4; ++j) {
            const bool exact = nom.margins.size() == 4 && nom.margins[j] == expected[j];
            push_row(rep, cellf("nominal margin %d", j + 1), exact ? nom.margins[j] : -1.0,
                     expected[j], exact ? 0.0 : -1.0, !exact);
        }
        const double h0 = plant_margin(std::array<double, 3>{0.0, 0.0, 0.0});
        push_row(rep, "nominal h(0)=20", h0, 20.0, h0 == 20.0 ? 0.0 : -1.0, h0 != 20.0);
    }
    for (long i = 0; i < 500; ++i) {
        RngStream rng(seed, 30000 + static_cast<std::uint64_t>(i));
        bool done = false;
        for (int attempt = 0; attempt < 32 && !done; ++attempt) {
            std::vector<double> poly{1.0};
            bool all_negative = true;
            auto real_root = [&]() {
                double re = rng.next_uniform(0.05, 3.0);
                if (rng.next_unit() < 0.5) re = -re;
                if (re >= 0.0) all_negative = false;
                poly = poly_mul(poly, {1.0, -re});
            };
            auto conj_pair = [&]() {
                double re = rng.next_uniform(0.05, 3.0);
                if (rng.next_unit() < 0.5) re = -re;
                const double im = rng.next_uniform(0.2, 3.0);
                if (re >= 0.0) all_negative = false;
                poly = poly_mul(poly, {1.0, -2.0 * re, re * re + im * im});
            };
            switch (i % 3) {
                case 0: real_root(); real_root(); real_root(); real_root(); break;
                case 1: real_root(); real_root(); conj_pair(); break;
                default: conj_pair(); conj_pair(); break;
            }
            StabilityReport sr = routh_stable(Polynomial{poly});
            double min_abs_margin = std::numeric_limits<double>::infinity();
            for (double m : sr.margins) min_abs_margin = std::min(min_abs_margin, std::fabs(m));
            if (sr.marginal || min_abs_margin < 1e-9) continue;  // redraw
            done = true;
            const bool agree = sr.stable == all_negative;
            push_row(rep, cellf("quartic %ld %s", i, all_negative ? "stable" : "unstable"),
                     sr.stable ? 1.0 : 0.0, all_negative ? 1.0 : 0.0, min_abs_margin, !agree);
        }
        if (!done) {
            push_row(rep, cellf("quartic %ld degenerate", i), 0.0, 0.0, 0.0, true);
        }
    }
    return rep;
}

// Exact small-LP oracle: enumerate vertices of {theta >= 0, sum theta = 1,
// F theta in box} by activating subsets of constraints, take the best value.
struct OracleLpResult {
    bool feasible = false;
    double value = 0.0;
};

bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[best][col])) best = r;
        if (std::fabs(a[best][col]) < 1e-10) return false;
        std::swap(a[col], a[best]);
        std::swap(b[col], b[best]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t cc = col; cc < n; ++cc) a[r][cc] -= f * a[col][cc];
            b[r] -= f * b[col];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

OracleLpResult lp_vertex_oracle(const ThetaLP& lp) {
    const int L = static_cast<int>(lp.c.size());
    const int k = static_cast<int>(lp.F.size());
    // candidate active constraints a.theta = rhs beyond the fixed sum row
    std::vector<std::pair<std::vector<double>, double>> cons;
    for (int i = 0; i < L; ++i) {
        std::vector<double> a(static_cast<std::size_t>(L), 0.0);
        a[static_cast<std::size_t>(i)] = 1.0;
        cons.push_back({a, 0.0});
    }
    for (int j = 0; j < k; ++j) {
        cons.push_back({lp.F[static_cast<std::size_t>(j)],
                        lp.moment_box.lower[static_cast<std::size_t>(j)]});
        cons.push_back({lp.F[static_cast<std::size_t>(j)],
                        lp.moment_box.upper[static_cast<std::size_t>(j)]});
    }
    auto feasible_at = [&](const std::vector<double>& th) {
        for (double t : th)
            if (t < -1e-9) return false;
        for (int j = 0; j < k; ++j) {
            double v = 0.0;
            for (int i = 0; i < L; ++i)
                v += lp.F[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
                     th[static_cast<std::size_t>(i)];
            const double lo = lp.moment_box.lower[static_cast<std::size_t>(j)];
            const double hi = lp.moment_box.upper[static_cast<std::size_t>(j)];
            if (v < lo - 1e-9 || v > hi + 1e-9) return false;
        }
        return true;
    };
    OracleLpResult out;
    auto consider = [&](const std::vector<double>& th) {
        if (!feasible_at(th)) return;
        double v = 0.0;
        for (int i = 0; i < L; ++i)
            v += lp.c[static_cast<std::size_t>(i)] * th[static_cast<std::size_t>(i)];
        if (!out.feasible || v > out.value) {
            out.feasible = true;
            out.value = v;
        }
    };
    const int need = L - 1;  // extra active constraints to pin a vertex
    const int ncons = static_cast<int>(cons.size());
    // iterate over all size-`need` subsets
    std::vector<int> stack;
    stack.reserve(static_cast<std::size_t>(need));
    auto recurse = [&](auto&& self, int start) -> void {
        if (static_cast<int>(stack.size()) == need) {
            std::vector<std::vector<double>> A;
            std::vector<double> b;
            A.push_back(std::vector<double>(static_cast<std::size_t>(L), 1.0));
            b.push_back(1.0);
            for (int ci : stack) {
                A.push_back(cons[static_cast<std::size_t>(ci)].first);
                b.push_back(cons[static_cast<std::size_t>(ci)].second);
            }
            std::vector<double> th;
            if (solve_square(std::move(A), std::move(b), th)) consider(th);
            return;
        }
        for (int ci = start; ci < ncons; ++ci) {
            stack.push_back(ci);
            self(self, ci + 1);
            stack.pop_back();
        }
    };
    recurse(recurse, 0);
    return out;
}

SuiteReport suite_lp(std::uint64_t seed, int) {
    SuiteReport rep{"lp", 0, 0, {}, {}};
    for (long i = 0; i < 500; ++i) {
        RngStream rng(seed, 40000 + static_cast<std::uint64_t>(i));
        ThetaLP lp;
        const int L = 2 + static_cast<int>(i % 3);
        const int k = 1 + static_cast<int>(i % 2);
        lp.c.resize(static_cast<std::size_t>(L));
        for (double& v : lp.c) v = rng.next_uniform(-1.0, 1.0);
        lp.F.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(L)));
        for (auto& row : lp.F)
            for (double& v : row) v = rng.next_uniform(-1.0, 1.0);
        lp.moment_box.lower.resize(static_cast<std::size_t>(k));
        lp.moment_box.upper.resize(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
            const double center = rng.next_uniform(-1.0, 1.0);
            const double half = rng.next_uniform(0.0, 0.8);
            lp.moment_box.lower[static_cast<std::size_t>(j)] = center - half;
            lp.moment_box.upper[static_cast<std::size_t>(j)] = center + half;
        }
        LpSolution sol = solve_lp(lp);
        OracleLpResult oracle = lp_vertex_oracle(lp);
        const bool lp_feasible = sol.status == LpStatus::Optimal;
        bool violation;
        double margin;
        if (lp_feasible != oracle.feasible) {
            violation = true;
            margin = -1.0;
        } else if (!lp_feasible) {
            violation = false;
            margin = 0.0;
        } else {
            margin = 1e-8 - std::fabs(sol.value - oracle.value);
            violation = margin < 0.0;
        }
        push_row(rep, cellf("lp %ld L=%d k=%d %s", i, L, k, lp_feasible ? "feas" : "infeas"),
                 lp_feasible ? sol.value : 0.0, oracle.feasible ? oracle.value : 0.0, margin,
                 violation);
    }
    return rep;
}

MomentProblem markov_problem(double delta) {
    MomentProblem p;
    p.domain = {{0.0}, {1.0}};
    p.moment_map = {parse("x1", 1)};
    p.moment_src = {"x1"};
    p.moment_set = {{0.5 - delta}, {0.5 + delta}};
    p.event = parse("0.9 - x1", 1);
    p.event_src = "0.9 - x1";
    p.indicator_objective = true;
    p.objective_src = "indicator";
    return validate_problem(p);
}

SuiteReport suite_worstcase(std::uint64_t seed, int threads) {
    SuiteReport rep{"worstcase", 0, 0, {}, {}};
    SolverSettings st;
    st.seed = seed;
    st.threads = threads;
    const double markov_exact = 5.0 / 9.0;

    MomentProblem markov = markov_problem(0.0);
    BoundCertificate mc = sup_probability(markov, st);
    push_row(rep, "markov upper=5/9", mc.upper, markov_exact,
             1e-3 - std::fabs(mc.upper - markov_exact),
             std::fabs(mc.upper - markov_exact) > 1e-3);
    push_row(rep, "markov certified", mc.upper - mc.lower, st.bnb_tol,
             st.bnb_tol + 1e-12 - (mc.upper - mc.lower), mc.status != CertStatus::Certified);
    const double grid_markov = grid_bruteforce(markov, 101);
    push_row(rep, "markov grid", grid_markov, markov_exact,
             0.02 - std::fabs(grid_markov - markov_exact),
             std::fabs(grid_markov - markov_exact) > 0.02);

    MomentProblem toy;
    toy.domain = {{0.0}, {1.0}};
    toy.moment_map = {parse("x1", 1)};
    toy.moment_src = {"x1"};
    toy.moment_set = {{0.5}, {0.5}};
    toy.event = parse("0.9 - x1", 1);
    toy.event_src = "0.9 - x1";
    toy.objective = parse("x1^2", 1);
    toy.objective_src = "x1^2";
    toy = validate_problem(toy);
    BoundCertificate tc = sup_expectation(toy, st);
    push_row(rep, "toy upper=0.5", tc.upper, 0.5, 1e-3 - std::fabs(tc.upper - 0.5),
             std::fabs(tc.upper - 0.5) > 1e-3);
    const double grid_toy = grid_bruteforce(toy, 101);
    push_row(rep, "toy grid", grid_toy, 0.5, 0.02 - std::fabs(grid_toy - 0.5),
             std::fabs(grid_toy - 0.5) > 0.02);

    // enlarging the moment box never shrinks the certified upper bound
    double prev = mc.upper;
    for (double delta : {0.1, 0.2}) {
        BoundCertificate c = sup_probability(markov_problem(delta), st);
        push_row(rep, cellf("markov monotone delta=%.1f", delta), c.upper, prev,
                 c.upper - prev + 1e-9, c.upper + 1e-9 < prev);
        prev = c.upper;
    }
    return rep;
}

SuiteReport suite_stability(std::uint64_t seed, int threads) {
    SuiteReport rep{"stability", 0, 0, {}, {}};
    SolverSettings st;
    st.seed = seed;
    st.threads = threads;
    MomentProblem p = build_stability_problem();
    BoundCertificate c = sup_probability(p, st);
    const double reference = 0.00031;
    push_row(rep, "upper", c.upper, reference, reference - c.upper, false);
    push_row(rep, "lower", c.lower, 0.0, c.lower, false);
    push_row(rep, "bracket lower<=upper", c.upper - c.lower, 0.0,
             c.upper - c.lower + st.bnb_tol, c.lower > c.upper + st.bnb_tol);
    const bool window = c.upper >= 1.0e-4 && c.upper <= 5.0e-4;
    push_row(rep, "reference window [1e-4,5e-4]", c.upper, reference, window ? 1.0 : -1.0, false);
    bool witness_ok = true;
    if (!c.witness.points.empty()) {
        try {
            check_distribution(c.witness, p, 1e-8);
        } catch (const Error&) {
            witness_ok = false;
        }
    } else if (c.status != CertStatus::Infeasible) {
        witness_ok = false;  // a feasible certificate must carry a witness
    }
    push_row(rep, "witness feasible", witness_ok ? 1.0 : 0.0, 1.0, witness_ok ? 0.0 : -1.0,
             !witness_ok);
    push_row(rep, "certified", c.status == CertStatus::Certified ? 1.0 : 0.0, 1.0, 0.0,
             c.status != CertStatus::Certified);
    return rep;
}

std::string rows_digest(const SuiteReport& rep) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
    };
    char buf[96];
    for (const SuiteRow& row : rep.rows) {
        mix(row.cell);
        std::snprintf(buf, sizeof buf, "|%.17g|%.17g|%.17g|%d\n", row.bound, row.ref, row.margin,
                      row.violation ? 1 : 0);
        mix(buf);
    }
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace

std::vector<std::string> dominance_suite_names() {
    return {"bernoulli",   "bounded-variance", "normal",         "poisson",
            "chernoff-generic", "mgf-vector",  "iid-bounded",    "martingale",
            "variance-range",   "small-deviation", "componentwise"};
}

std::vector<std::string> suite_names() {
    std::vector<std::string> names = dominance_suite_names();
    for (const char* extra : {"golden", "asymptotic", "routh", "lp", "worstcase", "stability"})
        names.push_back(extra);
    return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed, int threads) {
    SuiteReport rep;
    if (name == "bernoulli") rep = suite_bernoulli(seed, threads);
    else if (name == "bounded-variance") rep = suite_bounded_variance(seed, threads);
    else if (name == "normal") rep = suite_normal(seed, threads);
    else if (name == "poisson") rep = suite_poisson(seed, threads);
    else if (name == "chernoff-generic") rep = suite_chernoff_generic(seed, threads);
    else if (name == "mgf-vector") rep = suite_mgf_vector(seed, threads);
    else if (name == "iid-bounded") rep = suite_iid_bounded(seed, threads);
    else if (name == "martingale") rep = suite_martingale(seed, threads);
    else if (name == "variance-range") rep = suite_variance_range(seed, threads);
    else if (name == "small-deviation") rep = suite_small_deviation(seed, threads);
    else if (name == "componentwise") rep = suite_componentwise(seed, threads);
    else if (name == "golden") rep = suite_golden(seed, threads);
    else if (name == "asymptotic") rep = suite_asymptotic(seed, threads);
    else if (name == "routh") rep = suite_routh(seed, threads);
    else if (name == "lp") rep = suite_lp(seed, threads);
    else if (name == "worstcase") rep = suite_worstcase(seed, threads);
    else if (name == "stability") rep = suite_stability(seed, threads);
    else throw Error(ErrorCode::ParamOutOfRange, "unknown suite: " + name);
    rep.digest = rows_digest(rep);
    return rep;
}

std::string report_to_json(const SuiteReport& r) {
    json rows = json::array();
    for (const SuiteRow& row : r.rows) {
        rows.push_back(json{{"cell", row.cell},
                            {"bound", row.bound},
                            {"ref", row.ref},
                            {"margin", row.margin},
                            {"violation", row.violation}});
    }
    json j{{"schema", "v1"}, {"suite", r.suite},   {"cells", r.cells},
           {"violations", r.violations}, {"digest", r.digest}, {"rows", rows}};
    return j.dump(2);
}

std::string report_to_text(const SuiteReport& r) {
    std::string out = "suite " + r.suite + ": " + std::to_string(r.cells) + " cells, " +
                      std::to_string(r.violations) + " violations, digest " + r.digest + "\n";
    char buf[256];
    for (const SuiteRow& row : r.rows) {
        std::snprintf(buf, sizeof buf, "  %-34s bound=%-12.6g ref=%-12.6g margin=%-12.6g %s\n",
                      row.cell.c_str(), row.bound, row.ref, row.margin,
                      row.violation ? "VIOLATION" : "ok");
        out += buf;
    }
    return out;
}

} // namespace wcb
