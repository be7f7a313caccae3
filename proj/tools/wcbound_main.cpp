// wcbound: certified worst-case probability bounds and concentration
// inequality toolkit. Subcommands: solve, bound, stability, verify,
// parse-check. Exit codes: 0 success, 1 domain failure, 2 usage/parse error.
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../vendor/CLI11.hpp"
#include "../vendor/json.hpp"

#include "wcbound/chernoff.hpp"
#include "wcbound/error.hpp"
#include "wcbound/expr.hpp"
#include "wcbound/model.hpp"
#include "wcbound/routh.hpp"
#include "wcbound/suites.hpp"
#include "wcbound/vecbounds.hpp"
#include "wcbound/worstcase.hpp"

namespace {

using nlohmann::json;

struct GlobalOpts {
    std::string output = "human";
    std::uint64_t seed = 0;
    int threads = 1;
};

void emit_line(const std::string& s) { std::fprintf(stdout, "%s\n", s.c_str()); }

void emit_error(const GlobalOpts& g, const std::string& code, std::string message) {
    // strip the "CODE: " prefix Error::what() carries
    const std::string prefix = code + ": ";
    if (message.rfind(prefix, 0) == 0) message = message.substr(prefix.size());
    if (g.output == "json") {
        json j{{"schema", "v1"}, {"error", code}, {"message", message}};
        std::fprintf(stderr, "%s\n", j.dump().c_str());
    } else {
        std::fprintf(stderr, "error: %s: %s\n", code.c_str(), message.c_str());
    }
}

int exit_code_for(const wcb::Error& e) {
    switch (e.code()) {
        case wcb::ErrorCode::SyntaxError:
        case wcb::ErrorCode::UnknownIdentifier:
        case wcb::ErrorCode::ArityError:
            return 2;
        default:
            return 1;
    }
}

std::vector<double> parse_csv(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string tok = text.substr(pos, comma - pos);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw CLI::ValidationError(flag, "expected comma-separated numbers, got '" + tok + "'");
        out.push_back(v);
        pos = comma + 1;
    }
    if (out.empty()) throw CLI::ValidationError(flag, "expected at least one number");
    return out;
}

std::vector<std::pair<double, double>> parse_ranges(const std::string& text,
                                                    const std::string& flag) {
    std::vector<std::pair<double, double>> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string tok = text.substr(pos, comma - pos);
        const std::size_t colon = tok.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError(flag, "expected lo:hi pairs, got '" + tok + "'");
        char* e1 = nullptr;
        char* e2 = nullptr;
        const std::string lo_s = tok.substr(0, colon), hi_s = tok.substr(colon + 1);
        const double lo = std::strtod(lo_s.c_str(), &e1);
        const double hi = std::strtod(hi_s.c_str(), &e2);
        if (e1 == lo_s.c_str() || *e1 != '\0' || e2 == hi_s.c_str() || *e2 != '\0')
            throw CLI::ValidationError(flag, "expected lo:hi pairs, got '" + tok + "'");
        out.push_back({lo, hi});
        pos = comma + 1;
    }
    if (out.empty()) throw CLI::ValidationError(flag, "expected at least one range");
    return out;
}

std::vector<std::vector<double>> parse_matrix(const std::string& text, const std::string& flag) {
    std::vector<std::vector<double>> rows;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t semi = text.find(';', pos);
        if (semi == std::string::npos) semi = text.size();
        rows.push_back(parse_csv(text.substr(pos, semi - pos), flag));
        pos = semi + 1;
    }
    return rows;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw wcb::Error(wcb::ErrorCode::Internal, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_inequality(const GlobalOpts& g, const std::string& family,
                      const wcb::InequalityResult& r, json extra = json::object()) {
    if (g.output == "json") {
        json j{{"schema", "v1"},        {"family", family},
               {"bound", r.bound},      {"clipped_bound", r.clipped_bound},
               {"zeta", r.zeta},        {"rate", r.rate}};
        for (auto& kv : extra.items()) j[kv.key()] = kv.value();
        emit_line(j.dump(2));
    } else {
        char buf[256];
        std::snprintf(buf, sizeof buf, "bound %.6f", r.clipped_bound);
        emit_line(buf);
        std::snprintf(buf, sizeof buf, "  raw %.12g  zeta %.12g  rate %.12g", r.bound, r.zeta,
                      r.rate);
        emit_line(buf);
        for (auto& kv : extra.items()) {
            std::snprintf(buf, sizeof buf, "  %s %.12g", kv.key().c_str(),
                          kv.value().get<double>());
            emit_line(buf);
        }
    }
}

std::string human_certificate(const wcb::BoundCertificate& c) {
    char buf[256];
    std::string out;
    out += std::string("status          ") + wcb::cert_status_name(c.status) + "\n";
    std::snprintf(buf, sizeof buf, "upper           %.12g\n", c.upper);
    out += buf;
    std::snprintf(buf, sizeof buf, "lower           %.12g\n", c.lower);
    out += buf;
    std::snprintf(buf, sizeof buf, "gap             %.6g\n", c.upper - c.lower);
    out += buf;
    std::snprintf(buf, sizeof buf, "witness points  %zu\n", c.witness.points.size());
    out += buf;
    for (const auto& pt : c.witness.points) {
        std::snprintf(buf, sizeof buf, "  w=%-22.16g x=(", pt.w);
        out += buf;
        for (std::size_t i = 0; i < pt.x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.16g", i ? ", " : "", pt.x[i]);
            out += buf;
        }
        out += ")\n";
    }
    std::snprintf(buf, sizeof buf, "iterations      %ld\nboxes explored  %ld\ntolerance       %g\n",
                  c.iterations, c.boxes_explored, c.tolerance_used);
    out += buf;
    return out;
}

wcb::SolverSettings* add_solver_flags(CLI::App* cmd, wcb::SolverSettings& st) {
    cmd->add_option("--multistarts", st.multistarts, "Gradient search start count");
    cmd->add_option("--gradient-iters", st.gradient_iters, "Iteration cap per start");
    cmd->add_option("--gradient-tol", st.gradient_tol, "Gradient search stall tolerance");
    cmd->add_option("--bnb-tol", st.bnb_tol, "Certified gap target");
    cmd->add_option("--max-boxes", st.bnb_max_boxes, "Branch-and-bound box budget");
    return &st;
}

} // namespace

int main(int argc, char** argv) {
    GlobalOpts g;
    int rc = 0;

    CLI::App app("certified worst-case probability bounds and concentration inequalities");
    app.name("wcbound");
    app.require_subcommand(1);
    app.add_option("--output", g.output, "Output format")
        ->check(CLI::IsMember({"human", "json"}))
        ->capture_default_str();
    app.add_option("--seed", g.seed, "Seed for all stochastic components")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker thread count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    // ---- solve ----------------------------------------------------------
    std::string solve_path;
    wcb::SolverSettings solve_st;
    CLI::App* solve = app.add_subcommand("solve", "Solve a worst-case moment problem (JSON file)");
    solve->add_option("problem", solve_path, "Problem JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    add_solver_flags(solve, solve_st);
    solve->callback([&] {
        wcb::MomentProblem p = wcb::problem_from_json(read_file(solve_path));
        solve_st.seed = g.seed;
        solve_st.threads = g.threads;
        wcb::validate_settings(solve_st);
        wcb::BoundCertificate c = p.indicator_objective ? wcb::sup_probability(p, solve_st)
                                                        : wcb::sup_expectation(p, solve_st);
        if (g.output == "json")
            emit_line(wcb::certificate_to_json(c));
        else
            std::fputs(human_certificate(c).c_str(), stdout);
        if (c.status == wcb::CertStatus::Infeasible) rc = 1;
    });

    // ---- bound ----------------------------------------------------------
    CLI::App* bound = app.add_subcommand("bound", "Evaluate a concentration inequality");
    bound->require_subcommand(1);
    struct {
        double mu = 0.5, theta = 0.6, nu = 1.0, b = 1.0, eps = 0.1, lambda = 1.0;
        double zeta_a = -6.0, zeta_b = 6.0;
        long m = 1, n = 1;
        int k = 2;
        double tau = 5.0, v = 1.0, sigma = 1.0, sigma2 = 1.0, r = 1.0, cn = 0.1, x = 1.0;
        double ell_c = 1.0, d = 1.0;
        std::string phi, gexpr, cvec, radii, diams, ranges, mat_a, vec_b, vec_mu;
    } f;

    {
        CLI::App* c = bound->add_subcommand("hoeffding-mean",
                                            "Uniform bound for [0,1] means (Bernoulli worst case)");
        c->alias("bernoulli");
        c->add_option("--mu", f.mu, "Mean upper bound, in (0,1)")->required();
        c->add_option("--theta", f.theta, "Crossing level, in (mu,1)")->required();
        c->add_option("--m", f.m, "Uniform-from-time horizon parameter")->required();
        c->callback([&] {
            print_inequality(g, "hoeffding-mean", wcb::uniform_bound_bernoulli(f.mu, f.theta, f.m));
        });
    }
    {
        CLI::App* c = bound->add_subcommand("bounded-variance",
                                            "Uniform bound under |X| <= b and Var <= nu");
        c->add_option("--b", f.b, "Support bound b > 0")->required();
        c->add_option("--nu", f.nu, "Variance bound nu > 0")->required();
        c->add_option("--eps", f.eps, "Deviation level, 0 < eps <= b")->required();
        c->add_option("--m", f.m, "Uniform-from-time horizon parameter")->required();
        c->callback([&] {
            print_inequality(g, "bounded-variance",
                             wcb::uniform_bound_bounded_variance(f.b, f.nu, f.eps, f.m));
        });
    }
    {
        CLI::App* c = bound->add_subcommand("normal", "Uniform bound for Normal(mu, nu) sums");
        c->add_option("--mu", f.mu, "Mean")->required();
        c->add_option("--nu", f.nu, "Variance, > 0")->required();
        c->add_option("--theta", f.theta, "Crossing level >= mu")->required();
        c->add_option("--m", f.m, "Uniform-from-time horizon parameter")->required();
        c->callback([&] {
            print_inequality(g, "normal", wcb::uniform_bound_normal(f.mu, f.nu, f.theta, f.m));
        });
    }
    {
        CLI::App* c = bound->add_subcommand("poisson", "Uniform bound for Poisson(lambda) sums");
        c->add_option("--lambda", f.lambda, "Rate, > 0")->required();
        c->add_option("--theta", f.theta, "Crossing level > lambda")->required();
        c->add_option("--m", f.m, "Uniform-from-time horizon parameter")->required();
        c->callback([&] {
            print_inequality(g, "poisson", wcb::uniform_bound_poisson(f.lambda, f.theta, f.m));
        });
    }
    {
        CLI::App* c = bound->add_subcommand(
            "chernoff-generic", "Uniform bound from a cumulant expression phi(x1) on (a,b)");
        c->add_option("--phi", f.phi, "Cumulant expression in x1")->required();
        c->add_option("--a", f.zeta_a, "Interval left end")->required();
        c->add_option("--b", f.zeta_b, "Interval right end")->required();
        c->add_option("--eps", f.eps, "Deviation level")->required();
        c->callback([&] {
            wcb::CumulantSpec cs;
            cs.phi = wcb::parse(f.phi, 1);
            cs.a = f.zeta_a;
            cs.b = f.zeta_b;
            wcb::ChernoffResult r = wcb::chernoff_inf(cs, f.eps);
            print_inequality(g, "chernoff-generic", r.res,
                             json{{"phi_over_zeta", r.phi_over_zeta}});
        });
    }
    {
        CLI::App* c = bound->add_subcommand("golden-moment", "Moment E[Z^k] of the golden law");
        c->add_option("--k", f.k, "Moment order >= 0")->required();
        c->callback([&] {
            const double v = wcb::golden_moment(f.k);
            if (g.output == "json")
                emit_line(json{{"schema", "v1"}, {"family", "golden-moment"}, {"k", f.k},
                               {"value", v}}
                              .dump(2));
            else {
                char buf[96];
                std::snprintf(buf, sizeof buf, "E[Z^%d] = %.17g", f.k, v);
                emit_line(buf);
            }
        });
    }
    {
        CLI::App* c = bound->add_subcommand(
            "mgf-vector", "Vector crossing bound from a scalar MGF envelope g(x1)");
        c->add_option("--g", f.gexpr, "Envelope expression in x1")->required();
        c->add_option("--tau", f.tau, "Upper end of the t search interval")->required();
        c->add_option("--eps", f.eps, "Per-step deviation level")->required();
        c->add_option("--n", f.n, "Number of increments")->required();
        c->callback([&] {
            print_inequality(
                g, "mgf-vector",
                wcb::mgf_vector_bound(wcb::parse(f.gexpr, 1), f.tau, f.eps, static_cast<int>(f.n)));
        });
    }
    {
        CLI::App* c = bound->add_subcommand("iid-bounded",
                                            "Vector bound for i.i.d. steps with E||X||^2 <= V");
        c->add_option("--v", f.v, "Second-moment bound V (overridden by --radii/--diameters)");
        c->add_option("--radii", f.radii, "Comma-separated radii; V = mean r_i^2");
        c->add_option("--diameters", f.diams, "Comma-separated diameters; V = mean D_i^2");
        c->add_option("--n", f.n, "Number of increments")->required();
        c->add_option("--eps", f.eps, "Per-step deviation level")->required();
        c->callback([&] {
            double V = f.v;
            if (!f.radii.empty()) V = wcb::v_from_radii(parse_csv(f.radii, "--radii"));
            else if (!f.diams.empty()) V = wcb::v_from_diameters(parse_csv(f.diams, "--diameters"));
            print_inequality(g, "iid-bounded", wcb::iid_bounded_bound(V, f.n, f.eps));
        });
    }
    {
        CLI::App* c = bound->add_subcommand(
            "martingale", "Vector martingale bound with per-step norm bounds c_i");
        c->add_option("--c", f.cvec, "Comma-separated per-step bounds")->required();
        c->add_option("--eps", f.eps, "Total deviation level")->required();
        c->callback([&] {
            print_inequality(g, "martingale",
                             wcb::martingale_bound(parse_csv(f.cvec, "--c"), f.eps));
        });
    }
    {
        CLI::App* c = bound->add_subcommand(
            "componentwise-radius", "Componentwise bound from per-coordinate radii");
        c->add_option("--radii", f.radii, "Comma-separated radii")->required();
        c->add_option("--sigma2", f.sigma2, "Total variance bound")->required();
        c->add_option("--eps", f.eps, "Deviation level")->required();
        c->callback([&] {
            print_inequality(
                g, "componentwise-radius",
                wcb::componentwise_tail_radius(parse_csv(f.radii, "--radii"), f.sigma2, f.eps));
        });
    }
    {
        CLI::App* c = bound->add_subcommand(
            "componentwise-range", "Componentwise bound from per-coordinate ranges lo:hi");
        c->add_option("--ranges", f.ranges, "Comma-separated lo:hi pairs")->required();
        c->add_option("--eps", f.eps, "Deviation level")->required();
        c->callback([&] {
            print_inequality(
                g, "componentwise-range",
                wcb::componentwise_tail_range(parse_ranges(f.ranges, "--ranges"), f.eps));
        });
    }
    {
        CLI::App* c = bound->add_subcommand(
            "variance-range", "Three-tier bound under mean-square and norm-range control");
        c->add_option("--sigma", f.sigma, "Root-mean-square bound")->required();
        c->add_option("--r", f.r, "Norm bound r")->required();
        c->add_option("--n", f.n, "Number of increments")->required();
        c->add_option("--eps", f.eps, "Deviation level for the average")->required();
        c->callback([&] {
            wcb::VarianceRangeBound vr = wcb::variance_range_bound(f.sigma, f.r, f.n, f.eps);
            if (g.output == "json")
                emit_line(json{{"schema", "v1"},
                               {"family", "variance-range"},
                               {"tier1", vr.tier1},
                               {"tier2", vr.tier2},
                               {"tier3", vr.tier3},
                               {"t_opt", vr.t_opt},
                               {"zero_probability", vr.zero_probability}}
                              .dump(2));
            else {
                char buf[160];
                std::snprintf(buf, sizeof buf, "bound %.6f", std::min(1.0, vr.tier1));
                emit_line(buf);
                std::snprintf(buf, sizeof buf,
                              "  tier1 %.12g  tier2 %.12g  tier3 %.12g  t_opt %.12g%s", vr.tier1,
                              vr.tier2, vr.tier3, vr.t_opt,
                              vr.zero_probability ? "  (event has probability 0)" : "");
                emit_line(buf);
            }
        });
    }
    {
        CLI::App* c = bound->add_subcommand("small-deviation",
                                            "Small-deviation bound at x standard scales");
        c->add_option("--cn", f.cn, "Scale ratio c_n")->required();
        c->add_option("--x", f.x, "Deviation in units of s_n")->required();
        c->callback([&] {
            print_inequality(g, "small-deviation", wcb::small_deviation_bound(f.cn, f.x));
        });
    }
    {
        CLI::App* c = bound->add_subcommand(
            "moment-envelope", "Support envelope (norm bound, second-moment bound)");
        c->add_option("--d", f.d, "Diameter (diameter mode)");
        c->add_option("--a", f.mat_a, "Ellipsoid matrix rows, e.g. '2,0;0,1'");
        c->add_option("--b", f.vec_b, "Ellipsoid offset, comma-separated");
        c->add_option("--c", f.ell_c, "Ellipsoid level c");
        c->add_option("--mu", f.vec_mu, "Mean of X, comma-separated");
        c->callback([&] {
            std::pair<double, double> env;
            std::string mode;
            if (f.mat_a.empty()) {
                env = wcb::moment_envelope(f.d);
                mode = "diameter";
            } else {
                if (f.vec_b.empty() || f.vec_mu.empty())
                    throw CLI::RequiredError("--a requires --b, --c and --mu");
                wcb::EllipsoidSpec spec(parse_matrix(f.mat_a, "--a"), parse_csv(f.vec_b, "--b"),
                                        f.ell_c, parse_csv(f.vec_mu, "--mu"));
                env = wcb::moment_envelope(spec);
                mode = "ellipsoid";
            }
            if (g.output == "json")
                emit_line(json{{"schema", "v1"},
                               {"family", "moment-envelope"},
                               {"mode", mode},
                               {"norm_bound", env.first},
                               {"second_moment_bound", env.second}}
                              .dump(2));
            else {
                char buf[128];
                std::snprintf(buf, sizeof buf, "norm bound %.12g  second moment bound %.12g",
                              env.first, env.second);
                emit_line(buf);
            }
        });
    }

    // ---- stability ------------------------------------------------------
    wcb::SolverSettings stab_st;
    std::string write_problem_path;
    CLI::App* stability =
        app.add_subcommand("stability", "Worst-case instability probability of the plant");
    add_solver_flags(stability, stab_st);
    stability->add_option("--write-problem", write_problem_path,
                          "Also write the embedded problem JSON to this path");
    stability->callback([&] {
        wcb::MomentProblem p = wcb::build_stability_problem();
        if (!write_problem_path.empty()) {
            std::ofstream out(write_problem_path, std::ios::binary);
            if (!out)
                throw wcb::Error(wcb::ErrorCode::Internal, "cannot write " + write_problem_path);
            out << wcb::problem_to_json(p) << "\n";
        }
        stab_st.seed = g.seed;
        stab_st.threads = g.threads;
        wcb::validate_settings(stab_st);
        wcb::BoundCertificate c = wcb::sup_probability(p, stab_st);
        const double reference = 0.00031;
        const bool within = c.upper >= 1.0e-4 && c.upper <= 5.0e-4;
        if (g.output == "json") {
            json j{{"schema", "v1"},
                   {"certificate", json::parse(wcb::certificate_to_json(c))},
                   {"reference", reference},
                   {"window", json::array({1.0e-4, 5.0e-4})},
                   {"within_window", within},
                   {"difference", c.upper - reference}};
            emit_line(j.dump(2));
        } else {
            std::fputs(human_certificate(c).c_str(), stdout);
            char buf[160];
            std::snprintf(buf, sizeof buf, "reference       %g\n", reference);
            std::fputs(buf, stdout);
            std::snprintf(buf, sizeof buf, "difference      %.6g (window [1e-4, 5e-4]: %s)\n",
                          c.upper - reference, within ? "inside" : "outside");
            std::fputs(buf, stdout);
        }
        if (c.status == wcb::CertStatus::Infeasible) rc = 1;
    });

    // ---- verify ---------------------------------------------------------
    std::string suite_arg;
    {
        std::vector<std::string> allowed = wcb::suite_names();
        allowed.push_back("all");
        allowed.push_back("dominance");
        CLI::App* verify = app.add_subcommand("verify", "Run a named verification suite");
        verify->add_option("suite", suite_arg, "Suite name, 'dominance', or 'all'")
            ->required()
            ->check(CLI::IsMember(allowed));
        verify->callback([&] {
            std::vector<std::string> to_run;
            if (suite_arg == "all") to_run = wcb::suite_names();
            else if (suite_arg == "dominance") to_run = wcb::dominance_suite_names();
            else to_run = {suite_arg};
            long total_violations = 0;
            json reports = json::array();
            for (const std::string& name : to_run) {
                wcb::SuiteReport r = wcb::run_suite(name, g.seed, g.threads);
                total_violations += r.violations;
                if (g.output == "json")
                    reports.push_back(json::parse(wcb::report_to_json(r)));
                else
                    std::fputs(wcb::report_to_text(r).c_str(), stdout);
            }
            if (g.output == "json") {
                if (to_run.size() == 1)
                    emit_line(reports[0].dump(2));
                else
                    emit_line(json{{"schema", "v1"}, {"reports", reports}}.dump(2));
            }
            if (total_violations > 0) rc = 1;
        });
    }

    // ---- parse-check ----------------------------------------------------
    std::string expr_text;
    int expr_dim = 16;
    {
        CLI::App* pc = app.add_subcommand("parse-check", "Parse an expression, echo canonical form");
        pc->add_option("expr", expr_text, "Expression text")->required();
        pc->add_option("--dim", expr_dim, "Highest allowed variable index")->capture_default_str();
        pc->callback([&] {
            wcb::ExprPtr e = wcb::parse(expr_text, expr_dim);
            if (g.output == "json")
                emit_line(json{{"schema", "v1"},
                               {"input", expr_text},
                               {"canonical", wcb::render(e)},
                               {"max_var", wcb::max_var(e)}}
                              .dump(2));
            else
                emit_line(wcb::render(e));
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error(g, "USAGE", e.what());
        return 2;
    } catch (const wcb::Error& e) {
        emit_error(g, wcb::error_code_name(e.code()), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        emit_error(g, "INTERNAL", e.what());
        return 1;
    }
    return rc;
}
