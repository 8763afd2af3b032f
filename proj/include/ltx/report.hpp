#pragma once
// Structured verdicts shared by every audit.

#include <string>
#include <vector>

#include "ltx/padic.hpp"

namespace ltx {

struct CheckEntry {
    std::string name;
    std::string formula;
    bool pass = false;
    long precision = 0;  // certified p-adic digits, 0 when not applicable
    json witness = json::object();
};

struct AuditReport {
    std::string identity;
    std::string formula;  // serialized under "paper_ref"
    long precision = 0;
    json witness = json::object();
    std::vector<CheckEntry> checks;

    CheckEntry& add(const std::string& name, bool pass, json witness = json::object(), long precision = -1);
    void absorb(const AuditReport& other, const std::string& prefix = "");
    bool pass() const;
    std::size_t failures() const;
    json to_json() const;
};

}  // namespace ltx
