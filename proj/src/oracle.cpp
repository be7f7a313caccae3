#include "wcbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "wcbound/error.hpp"
#include "wcbound/lp.hpp"
#include "wcbound/rng.hpp"

namespace wcb {

namespace {

bool is_vector_family(Family f) {
    return f == Family::SphereUniform || f == Family::BallUniform;
}

// One replicate's sample source; vector families write into `vec`.
struct Sampler {
    const SamplerSpec& spec;
    RngStream stream;
    std::vector<double> vec;

    Sampler(const SamplerSpec& s, long replicate)
        : spec(s), stream(s.seed, static_cast<std::uint64_t>(replicate)) {}

    double next_scalar() {
        switch (spec.family) {
        case Family::Bernoulli: return stream.next_unit() < spec.p ? 1.0 : 0.0;
        case Family::CenteredCoin: return stream.next_unit() < 0.5 ? 0.5 : -0.5;
        case Family::Normal: return spec.mu + std::sqrt(spec.nu) * stream.next_normal();
        case Family::Poisson: return static_cast<double>(stream.next_poisson(spec.lambda));
        case Family::GoldenZ: return stream.next_golden_z();
        default: break;
        }
        throw Error(ErrorCode::Internal, "scalar sample from vector family");
    }

    const std::vector<double>& next_vector() {
        if (spec.family == Family::SphereUniform) {
            stream.next_sphere(spec.dim, vec);
        } else {
            stream.next_ball(spec.dim, vec);
        }
        return vec;
    }
};

McEstimate finish(long hits, long reps) {
    McEstimate e;
    e.reps = reps;
    e.p_hat = static_cast<double>(hits) / static_cast<double>(reps);
    e.stderr_est = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(reps));
    return e;
}

// Runs `body(replicate)` for every replicate, summing the integer hit counts.
// The per-replicate streams make the sum independent of the partitioning.
template <typename Body>
long parallel_hits(long reps, int threads, const Body& body) {
    threads = std::max(1, threads);
    if (threads == 1 || reps < 256) {
        long hits = 0;
        for (long r = 0; r < reps; ++r) hits += body(r);
        return hits;
    }
    std::vector<long> partial(static_cast<std::size_t>(threads), 0);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            long h = 0;
            for (long r = t; r < reps; r += threads) h += body(r);
            partial[static_cast<std::size_t>(t)] = h;
        });
    }
    for (auto& th : pool) th.join();
    long hits = 0;
    for (long h : partial) hits += h;
    return hits;
}

} // namespace

void validate_spec(const SamplerSpec& spec) {
    if (spec.reps < 1) throw Error(ErrorCode::ParamOutOfRange, "sampler: reps must be >= 1");
    if (spec.n < 1) throw Error(ErrorCode::ParamOutOfRange, "sampler: n must be >= 1");
    switch (spec.family) {
    case Family::Bernoulli:
        if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
            throw Error(ErrorCode::ParamOutOfRange, "sampler: Bernoulli p must be in [0,1]");
        }
        break;
    case Family::Normal:
        if (!(spec.nu > 0.0) || !std::isfinite(spec.mu) || !std::isfinite(spec.nu)) {
            throw Error(ErrorCode::ParamOutOfRange, "sampler: Normal requires finite mu, nu > 0");
        }
        break;
    case Family::Poisson:
        if (!(spec.lambda > 0.0) || !std::isfinite(spec.lambda)) {
            throw Error(ErrorCode::ParamOutOfRange, "sampler: Poisson lambda must be > 0");
        }
        break;
    case Family::SphereUniform:
    case Family::BallUniform:
        if (spec.dim < 1) throw Error(ErrorCode::ParamOutOfRange, "sampler: dim must be >= 1");
        break;
    case Family::CenteredCoin:
    case Family::GoldenZ:
        break;
    }
}

McEstimate mc_tail(const SamplerSpec& spec, double threshold_per_sample, int threads) {
    validate_spec(spec);
    if (!std::isfinite(threshold_per_sample)) {
        throw Error(ErrorCode::ParamOutOfRange, "mc_tail: non-finite threshold");
    }
    const double target = threshold_per_sample * static_cast<double>(spec.n);
    const bool vec_family = is_vector_family(spec.family);

    auto body = [&](long replicate) -> long {
        Sampler s(spec, replicate);
        if (vec_family) {
            std::vector<double> sum(static_cast<std::size_t>(spec.dim), 0.0);
            for (long i = 0; i < spec.n; ++i) {
                const std::vector<double>& x = s.next_vector();
                for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += x[j];
            }
            double norm2 = 0.0;
            for (double c : sum) norm2 += c * c;
            return std::sqrt(norm2) >= target ? 1 : 0;
        }
        double sum = 0.0;
        for (long i = 0; i < spec.n; ++i) sum += s.next_scalar();
        return sum >= target ? 1 : 0;
    };
    return finish(parallel_hits(spec.reps, threads, body), spec.reps);
}

McEstimate mc_sup_crossing(const SamplerSpec& spec, const ExprPtr& boundary, long horizon,
                           int threads) {
    validate_spec(spec);
    if (!boundary) throw Error(ErrorCode::BadExpr, "mc_sup_crossing: null boundary");
    if (max_var(boundary) > 1) {
        throw Error(ErrorCode::BadExpr, "mc_sup_crossing: boundary must use x1 only");
    }
    if (horizon < 1) throw Error(ErrorCode::ParamOutOfRange, "mc_sup_crossing: horizon must be >= 1");

    // Precompute the boundary once; +inf entries are simply uncrossable.
    std::vector<double> level(static_cast<std::size_t>(horizon));
    for (long j = 1; j <= horizon; ++j) {
        std::vector<double> arg{static_cast<double>(j)};
        level[static_cast<std::size_t>(j - 1)] = eval_point(boundary, arg);
    }
    const bool vec_family = is_vector_family(spec.family);

    auto body = [&](long replicate) -> long {
        Sampler s(spec, replicate);
        if (vec_family) {
            std::vector<double> sum(static_cast<std::size_t>(spec.dim), 0.0);
            for (long j = 1; j <= horizon; ++j) {
                const std::vector<double>& x = s.next_vector();
                double norm2 = 0.0;
                for (std::size_t c = 0; c < sum.size(); ++c) {
                    sum[c] += x[c];
                    norm2 += sum[c] * sum[c];
                }
                if (std::sqrt(norm2) >= level[static_cast<std::size_t>(j - 1)]) return 1;
            }
            return 0;
        }
        double sum = 0.0;
        for (long j = 1; j <= horizon; ++j) {
            sum += s.next_scalar();
            if (sum >= level[static_cast<std::size_t>(j - 1)]) return 1;
        }
        return 0;
    };
    return finish(parallel_hits(spec.reps, threads, body), spec.reps);
}

double grid_bruteforce(const MomentProblem& problem, int resolution) {
    validate_problem(problem);
    const int d = problem.d();
    const int k = problem.k();
    if (d > 2 || k > 2) {
        throw Error(ErrorCode::TooLarge, "grid_bruteforce: requires d <= 2 and k <= 2");
    }
    if (resolution < 2 || resolution > 101) {
        throw Error(ErrorCode::TooLarge, "grid_bruteforce: resolution must be in [2, 101]");
    }

    // Materialize the grid and pre-evaluate objective and moments per point.
    std::vector<std::vector<double>> pts;
    if (d == 1) {
        pts.reserve(static_cast<std::size_t>(resolution));
        for (int i = 0; i < resolution; ++i) {
            const double t = static_cast<double>(i) / (resolution - 1);
            pts.push_back({problem.domain.lower[0] +
                           t * (problem.domain.upper[0] - problem.domain.lower[0])});
        }
    } else {
        pts.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
        for (int i = 0; i < resolution; ++i) {
            for (int j = 0; j < resolution; ++j) {
                const double ti = static_cast<double>(i) / (resolution - 1);
                const double tj = static_cast<double>(j) / (resolution - 1);
                pts.push_back({problem.domain.lower[0] +
                                   ti * (problem.domain.upper[0] - problem.domain.lower[0]),
                               problem.domain.lower[1] +
                                   tj * (problem.domain.upper[1] - problem.domain.lower[1])});
            }
        }
    }
    const std::size_t npts = pts.size();
    const std::size_t support = static_cast<std::size_t>(k) + 1;

    double combos = 0.0;  // sum_{s<=k+1} C(npts, s), checked against the guard
    double binom = 1.0;
    for (std::size_t s = 1; s <= support; ++s) {
        binom *= static_cast<double>(npts - (s - 1)) / static_cast<double>(s);
        combos += binom;
    }
    if (combos > 2e6) {
        throw Error(ErrorCode::TooLarge, "grid_bruteforce: too many support combinations");
    }

    std::vector<double> obj(npts);
    std::vector<std::vector<double>> mom(npts, std::vector<double>(static_cast<std::size_t>(k)));
    for (std::size_t i = 0; i < npts; ++i) {
        if (problem.indicator_objective) {
            obj[i] = eval_point(problem.event, pts[i]) <= 0.0 ? 1.0 : 0.0;
        } else {
            obj[i] = eval_point(problem.objective, pts[i]);
        }
        for (int j = 0; j < k; ++j) {
            mom[i][static_cast<std::size_t>(j)] = eval_point(problem.moment_map[static_cast<std::size_t>(j)], pts[i]);
        }
    }

    double best = 0.0;  // sup over empty set convention
    bool any_feasible = false;
    ThetaLP lp;
    lp.moment_box = problem.moment_set;

    std::vector<std::size_t> idx(support);
    auto try_combo = [&](std::size_t count) {
        lp.c.resize(count);
        lp.F.assign(static_cast<std::size_t>(k), std::vector<double>(count));
        for (std::size_t c = 0; c < count; ++c) {
            lp.c[c] = obj[idx[c]];
            for (int j = 0; j < k; ++j) {
                lp.F[static_cast<std::size_t>(j)][c] = mom[idx[c]][static_cast<std::size_t>(j)];
            }
        }
        LpSolution sol = solve_lp(lp);
        if (sol.status == LpStatus::Optimal) {
            any_feasible = true;
            best = std::max(best, sol.value);
        }
    };

    // Sizes 1..k+1; k <= 2 so three nested loops cover everything.
    for (std::size_t a = 0; a < npts; ++a) {
        idx[0] = a;
        try_combo(1);
        if (support < 2) continue;
        for (std::size_t b = a + 1; b < npts; ++b) {
            idx[1] = b;
            try_combo(2);
            if (support < 3) continue;
            for (std::size_t c = b + 1; c < npts; ++c) {
                idx[2] = c;
                try_combo(3);
            }
        }
    }
    return any_feasible ? best : 0.0;
}

} // namespace wcb
