#include "ltx/report.hpp"

namespace ltx {

CheckEntry& AuditReport::add(const std::string& name, bool pass, json w, long prec) {
    CheckEntry c;
    c.name = name;
    c.formula = formula;
    c.pass = pass;
    c.precision = prec < 0 ? precision : prec;
    c.witness = std::move(w);
    checks.push_back(std::move(c));
    return checks.back();
}

void AuditReport::absorb(const AuditReport& other, const std::string& prefix) {
    for (auto c : other.checks) {
        if (!prefix.empty()) c.name = prefix + "/" + c.name;
        checks.push_back(std::move(c));
    }
}

bool AuditReport::pass() const { return failures() == 0; }

std::size_t AuditReport::failures() const {
    std::size_t n = 0;
    for (auto& c : checks)
        if (!c.pass) ++n;
    return n;
}

json AuditReport::to_json() const {
    json j;
    j["identity"] = identity;
    j["paper_ref"] = formula;
    j["status"] = pass() ? "pass" : "fail";
    j["precision"] = precision;
    j["witness"] = witness;
    json cs = json::array();
    for (auto& c : checks) {
        json e;
        e["name"] = c.name;
        e["paper_ref"] = c.formula;
        e["status"] = c.pass ? "pass" : "fail";
        e["precision"] = c.precision;
        e["witness"] = c.witness;
        cs.push_back(e);
    }
    j["checks"] = cs;
    j["summary"] = {{"checks", checks.size()}, {"failed", failures()}};
    return j;
}

}  // namespace ltx
