#include "doctest.h"

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "wcbound/model.hpp"

#include "json.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

// Runs the CLI binary (stderr folded into stdout) and captures everything.
RunResult run_cli(const std::string& args) {
    const char* bin = std::getenv("WCBOUND_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "WCBOUND_BIN must point at the wcbound binary");
    RunResult r;
    const std::string cmd = std::string(bin) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

const char* markov_json =
    "{\"schema\":\"v1\",\"domain\":{\"lower\":[0.0],\"upper\":[1.0]},"
    "\"moments\":[\"x1\"],\"moment_set\":{\"lower\":[0.5],\"upper\":[0.5]},"
    "\"event\":\"0.9 - x1\",\"objective\":\"indicator\"}";

std::string write_temp(const char* name, const std::string& content) {
    std::string path = std::string("/tmp/wcbound_test_") + name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

} // namespace

TEST_CASE("bound hoeffding-mean prints the documented value") {
    RunResult r = run_cli("bound hoeffding-mean --mu 0.5 --theta 0.6 --m 10");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("bound 0.817622") == 0);
}

TEST_CASE("bound subcommand json output carries the schema") {
    RunResult r = run_cli("--output json bound normal --mu 0 --nu 1 --theta 1 --m 1");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["schema"] == "v1");
    CHECK(j["family"] == "normal");
    CHECK(std::fabs(j["bound"].get<double>() - 0.60653065971263342) < 1e-12);
}

TEST_CASE("parse-check canonicalizes and reports errors with exit 2") {
    RunResult ok = run_cli("parse-check \"min(x1, 2*x2)\"");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("min(x1, (2*x2))") != std::string::npos);

    RunResult bad = run_cli("parse-check \"min(x1,\"");
    CHECK(bad.exit_code == 2);
    CHECK(bad.out.find("SYNTAX_ERROR") != std::string::npos);

    RunResult bad_json = run_cli("--output json parse-check \"min(x1,\"");
    CHECK(bad_json.exit_code == 2);
    // single-line JSON error document
    json e = json::parse(bad_json.out);
    CHECK(e["schema"] == "v1");
    CHECK(e["error"] == "SYNTAX_ERROR");
    CHECK(bad_json.out.find('\n') == bad_json.out.size() - 1);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("bound").exit_code == 2);
    CHECK(run_cli("bound no-such-family --mu 1").exit_code == 2);
    CHECK(run_cli("verify no-such-suite").exit_code == 2);
    CHECK(run_cli("solve /nonexistent/problem.json").exit_code == 2);
}

TEST_CASE("solve emits a round-trippable certificate document") {
    const std::string path = write_temp("markov.json", markov_json);
    RunResult r = run_cli("--output json solve " + path);
    REQUIRE(r.exit_code == 0);
    wcb::BoundCertificate c = wcb::certificate_from_json(r.out);
    CHECK(c.status == wcb::CertStatus::Certified);
    CHECK(std::fabs(c.upper - 5.0 / 9.0) < 1e-3);
    CHECK(c.lower <= c.upper);

    // golden schema: exact top-level key set, pinned so the format stays stable
    json j = json::parse(r.out);
    std::vector<std::string> keys;
    for (auto& kv : j.items()) keys.push_back(kv.key());
    std::sort(keys.begin(), keys.end());
    const std::vector<std::string> expected = {"boxes_explored", "iterations", "lower", "schema",
                                              "status",         "tolerance_used", "upper",
                                              "witness"};
    CHECK(keys == expected);
    CHECK(j["schema"] == "v1");
    REQUIRE(j["witness"].contains("points"));
    for (auto& pt : j["witness"]["points"]) {
        CHECK(pt.contains("x"));
        CHECK(pt.contains("w"));
    }
}

TEST_CASE("solve is deterministic for a fixed seed") {
    const std::string path = write_temp("markov2.json", markov_json);
    RunResult a = run_cli("--output json --seed 42 solve " + path);
    RunResult b = run_cli("--output json --seed 42 solve " + path);
    RunResult c = run_cli("--output json --seed 42 --threads 4 solve " + path);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
}

TEST_CASE("infeasible problems exit 1") {
    const std::string infeasible =
        "{\"schema\":\"v1\",\"domain\":{\"lower\":[0.0],\"upper\":[1.0]},"
        "\"moments\":[\"x1\"],\"moment_set\":{\"lower\":[2.0],\"upper\":[3.0]},"
        "\"event\":\"0.9 - x1\",\"objective\":\"indicator\"}";
    const std::string path = write_temp("infeasible.json", infeasible);
    RunResult r = run_cli("solve " + path);
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("INFEASIBLE") != std::string::npos);
}

TEST_CASE("malformed problem files exit nonzero with a coded error") {
    const std::string path = write_temp("bad.json", "{\"schema\":\"v1\"}");
    RunResult r = run_cli("--output json solve " + path);
    CHECK(r.exit_code != 0);
    json e = json::parse(r.out);
    CHECK(e.contains("error"));
}

TEST_CASE("stability prints the reference comparison") {
    RunResult r = run_cli("stability");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("reference") != std::string::npos);
    CHECK(r.out.find("0.00031") != std::string::npos);

    RunResult j = run_cli("--output json stability");
    REQUIRE(j.exit_code == 0);
    json doc = json::parse(j.out);
    CHECK(doc["schema"] == "v1");
    CHECK(doc["reference"].get<double>() == 0.00031);
    CHECK(doc["certificate"]["status"] == "CERTIFIED");
    CHECK(doc.contains("within_window"));
}

TEST_CASE("verify runs a cheap suite and reports violations") {
    RunResult r = run_cli("--output json verify golden");
    CHECK(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["schema"] == "v1");
    CHECK(doc["suite"] == "golden");
    CHECK(doc["violations"].get<long>() == 0);
    CHECK(doc["cells"].get<long>() >= 20);
    CHECK(doc["rows"].size() == doc["cells"].get<std::size_t>());
}

TEST_CASE("stability --write-problem emits a loadable problem") {
    const std::string path = "/tmp/wcbound_test_stab_problem.json";
    RunResult r = run_cli("stability --write-problem " + path);
    CHECK(r.exit_code == 0);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    wcb::MomentProblem p = wcb::problem_from_json(text);
    CHECK(p.d() == 3);
    CHECK(p.indicator_objective);
}
