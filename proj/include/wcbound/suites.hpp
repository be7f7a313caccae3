#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wcb {

// One checked cell of a verification suite. For Monte Carlo dominance suites,
// `bound` is the (clipped) theoretical bound, `ref` the empirical estimate,
// and `margin` = bound + 3*stderr - ref, which must be nonnegative. For
// deterministic check suites the three fields carry the computed value, the
// target, and the slack of the check, with the same sign convention.
struct SuiteRow {
    std::string cell;
    double bound = 0.0;
    double ref = 0.0;
    double margin = 0.0;
    bool violation = false;
};

struct SuiteReport {
    std::string suite;
    long cells = 0;
    long violations = 0;
    std::vector<SuiteRow> rows;
    std::string digest;  // FNV-1a over all serialized rows; equal digests mean
                         // bit-identical numeric output (determinism checks)
};

// Monte Carlo dominance suites: every closed-form and generic inequality
// evaluator against its simulated event, >= 20 cells each.
std::vector<std::string> dominance_suite_names();

// All suites: the dominance set plus the deterministic check suites
// golden, asymptotic, routh, lp, worstcase, stability.
std::vector<std::string> suite_names();

// Runs one named suite. Throws Error{ParamOutOfRange} for an unknown name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed, int threads);

std::string report_to_json(const SuiteReport& r);
std::string report_to_text(const SuiteReport& r);

} // namespace wcb
