#include "wcbound/model.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace wcb {

using nlohmann::json;

void validate_box(const BoxRegion& b, const char* what) {
    if (b.lower.empty() || b.lower.size() != b.upper.size())
        throw Error(ErrorCode::EmptyBox,
                    std::string(what) + ": box must have matching nonempty bounds");
    for (size_t i = 0; i < b.lower.size(); ++i) {
        if (!std::isfinite(b.lower[i]) || !std::isfinite(b.upper[i]))
            throw Error(ErrorCode::EmptyBox,
                        std::string(what) + ": non-finite bound at index " + std::to_string(i));
        if (b.lower[i] > b.upper[i])
            throw Error(ErrorCode::EmptyBox,
                        std::string(what) + ": lower > upper at index " + std::to_string(i));
    }
}

MomentProblem validate_problem(const MomentProblem& p) {
    validate_box(p.domain, "domain");
    validate_box(p.moment_set, "moment_set");
    if (p.moment_map.empty())
        throw Error(ErrorCode::DimMismatch, "moment map must have k >= 1 entries");
    if (static_cast<int>(p.moment_map.size()) != p.moment_set.dim())
        throw Error(ErrorCode::DimMismatch,
                    "moment map length " + std::to_string(p.moment_map.size()) +
                        " vs moment_set dimension " + std::to_string(p.moment_set.dim()));
    const int d = p.d();
    auto check_expr = [d](const ExprPtr& e, const char* what) {
        if (!e) throw Error(ErrorCode::BadExpr, std::string(what) + ": missing expression");
        if (max_var(e) > d)
            throw Error(ErrorCode::BadExpr, std::string(what) + ": references variable x" +
                                                std::to_string(max_var(e)) +
                                                " beyond dimension " + std::to_string(d));
    };
    for (const auto& f : p.moment_map) check_expr(f, "moment_map");
    check_expr(p.event, "event");
    if (!p.indicator_objective) check_expr(p.objective, "objective");
    return p;
}

namespace {

json box_to_json(const BoxRegion& b) {
    return json{{"lower", b.lower}, {"upper", b.upper}};
}

BoxRegion box_from_json(const json& j) {
    BoxRegion b;
    b.lower = j.at("lower").get<std::vector<double>>();
    b.upper = j.at("upper").get<std::vector<double>>();
    return b;
}

} // namespace

std::string problem_to_json(const MomentProblem& p) {
    json j;
    j["schema"] = "v1";
    j["domain"] = box_to_json(p.domain);
    std::vector<std::string> moments;
    for (size_t i = 0; i < p.moment_map.size(); ++i)
        moments.push_back(i < p.moment_src.size() && !p.moment_src[i].empty()
                              ? p.moment_src[i]
                              : render(p.moment_map[i]));
    j["moments"] = moments;
    j["moment_set"] = box_to_json(p.moment_set);
    j["event"] = !p.event_src.empty() ? p.event_src : render(p.event);
    if (p.indicator_objective)
        j["objective"] = "indicator";
    else
        j["objective"] = !p.objective_src.empty() ? p.objective_src : render(p.objective);
    return j.dump(2);
}

MomentProblem problem_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadExpr, std::string("JSON parse failure: ") + e.what());
    }
    try {
        if (j.value("schema", "") != "v1")
            throw Error(ErrorCode::BadExpr, "unsupported schema (want \"v1\")");
        MomentProblem p;
        p.domain = box_from_json(j.at("domain"));
        const int d = p.domain.dim();
        for (const auto& m : j.at("moments")) {
            std::string src = m.get<std::string>();
            p.moment_src.push_back(src);
            p.moment_map.push_back(parse(src, d));
        }
        p.moment_set = box_from_json(j.at("moment_set"));
        p.event_src = j.at("event").get<std::string>();
        p.event = parse(p.event_src, d);
        std::string obj = j.at("objective").get<std::string>();
        if (obj == "indicator") {
            p.indicator_objective = true;
        } else {
            p.indicator_objective = false;
            p.objective_src = obj;
            p.objective = parse(obj, d);
        }
        return validate_problem(p);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadExpr, std::string("malformed problem document: ") + e.what());
    }
}

std::vector<double> distribution_moments(const DiscreteDistribution& dist,
                                         const MomentProblem& p) {
    std::vector<double> mu(static_cast<size_t>(p.k()), 0.0);
    for (const auto& pt : dist.points)
        for (int j = 0; j < p.k(); ++j)
            mu[static_cast<size_t>(j)] += pt.w * eval_point(p.moment_map[static_cast<size_t>(j)], pt.x);
    return mu;
}

void check_distribution(const DiscreteDistribution& dist, const MomentProblem& p, double tol) {
    auto fail = [](const std::string& msg) {
        throw Error(ErrorCode::Internal, "distribution check failed: " + msg);
    };
    if (dist.points.empty()) fail("no support points");
    if (static_cast<int>(dist.points.size()) > p.k() + 1)
        fail("more than k+1 support points (" + std::to_string(dist.points.size()) + ")");
    double wsum = 0.0;
    for (const auto& pt : dist.points) {
        if (!(pt.w >= -1e-12)) fail("negative weight " + std::to_string(pt.w));
        wsum += pt.w;
        if (static_cast<int>(pt.x.size()) != p.d()) fail("support point dimension mismatch");
        for (int i = 0; i < p.d(); ++i) {
            if (pt.x[static_cast<size_t>(i)] < p.domain.lower[static_cast<size_t>(i)] - tol ||
                pt.x[static_cast<size_t>(i)] > p.domain.upper[static_cast<size_t>(i)] + tol)
                fail("support point outside domain box");
        }
    }
    if (std::fabs(wsum - 1.0) > 1e-9) fail("weights sum to " + std::to_string(wsum));
    std::vector<double> mu = distribution_moments(dist, p);
    for (int j = 0; j < p.k(); ++j) {
        if (mu[static_cast<size_t>(j)] < p.moment_set.lower[static_cast<size_t>(j)] - tol ||
            mu[static_cast<size_t>(j)] > p.moment_set.upper[static_cast<size_t>(j)] + tol)
            fail("moment " + std::to_string(j + 1) + " = " + std::to_string(mu[static_cast<size_t>(j)]) +
                 " outside moment_set (tol " + std::to_string(tol) + ")");
    }
}

const char* cert_status_name(CertStatus s) {
    switch (s) {
    case CertStatus::Certified: return "CERTIFIED";
    case CertStatus::HeuristicOnly: return "HEURISTIC_ONLY";
    case CertStatus::Infeasible: return "INFEASIBLE";
    }
    return "?";
}

std::string certificate_to_json(const BoundCertificate& c) {
    json pts = json::array();
    for (const auto& pt : c.witness.points)
        pts.push_back(json{{"x", pt.x}, {"w", pt.w}});
    json j{{"schema", "v1"},
           {"upper", c.upper},
           {"lower", c.lower},
           {"status", cert_status_name(c.status)},
           {"witness", json{{"points", pts}}},
           {"iterations", c.iterations},
           {"boxes_explored", c.boxes_explored},
           {"tolerance_used", c.tolerance_used}};
    return j.dump(2);
}

BoundCertificate certificate_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadExpr, std::string("JSON parse failure: ") + e.what());
    }
    try {
        if (j.value("schema", "") != "v1")
            throw Error(ErrorCode::BadExpr, "unsupported schema (want \"v1\")");
        BoundCertificate c;
        c.upper = j.at("upper").get<double>();
        c.lower = j.at("lower").get<double>();
        std::string st = j.at("status").get<std::string>();
        if (st == "CERTIFIED") c.status = CertStatus::Certified;
        else if (st == "HEURISTIC_ONLY") c.status = CertStatus::HeuristicOnly;
        else if (st == "INFEASIBLE") c.status = CertStatus::Infeasible;
        else throw Error(ErrorCode::BadExpr, "unknown status " + st);
        for (const auto& pt : j.at("witness").at("points")) {
            DiscreteDistribution::Point q;
            q.x = pt.at("x").get<std::vector<double>>();
            q.w = pt.at("w").get<double>();
            c.witness.points.push_back(std::move(q));
        }
        c.iterations = j.at("iterations").get<long>();
        c.boxes_explored = j.at("boxes_explored").get<long>();
        c.tolerance_used = j.at("tolerance_used").get<double>();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BadExpr, std::string("malformed certificate document: ") + e.what());
    }
}

InequalityResult make_result(double bound, double zeta, double rate) {
    InequalityResult r;
    r.bound = bound;
    r.zeta = zeta;
    r.rate = rate;
    r.clipped_bound = std::min(1.0, bound);
    return r;
}

} // namespace wcb
