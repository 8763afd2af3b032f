#pragma once
// JSON-configured commands, the verification suite and exit codes.

#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "ltx/report.hpp"

namespace ltx {

struct RunConfig {
    std::string command;
    long p = 3;
    int r = 0;  // 0: taken from u
    std::vector<std::vector<long>> u;
    long N = 20;
    int degree = 0;  // 0: the command's default
    long m = 1, d = 1;
    long e = 0;   // 0: the command's default
    long dN = 0;  // 0: m d
    std::string kase;  // "I", "T" or empty
    std::uint64_t seed = 1;
    std::string out;
    json options = json::object();  // command-specific keys
    std::vector<RunConfig> suite;    // audit-all

    // InvalidInput on unknown keys, malformed values, p = 2, non-square or non-invertible u
    static RunConfig from_json(const json& j);
    json to_json() const;
};

const std::vector<std::string>& commands();

// LTX_PRECISION when set, otherwise 20
long default_precision();

AuditReport run(const RunConfig& cfg);

// configurations covering every acceptance criterion, grouped by criterion number
struct SuiteGroup {
    int criterion = 0;
    std::string title;
    std::vector<RunConfig> configs;
};
std::vector<SuiteGroup> canonical_groups(long N);
std::vector<RunConfig> canonical_suite(long N);

// failures inside a configuration become failed checks; threads = 0 uses the hardware count
AuditReport audit_all(const std::vector<RunConfig>& suite, unsigned threads = 0);

json report_json(const RunConfig& cfg, const AuditReport& rpt, double seconds);

int exit_code(const AuditReport& rpt);
int exit_code(const std::exception& e);

// names of checks whose verdicts differ, or whose witnesses differ on digits both reports claim
std::vector<std::string> compare_reports(const AuditReport& a, const AuditReport& b, long p);
// the same for two audit_all reports of one suite
std::vector<std::string> compare_suite_reports(const std::vector<RunConfig>& suite, const AuditReport& a,
                                               const AuditReport& b);

}  // namespace ltx
