// ltx <command> [--config file.json | flags] [--out report.json]

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "ltx/cli.hpp"
#include "ltx/errors.hpp"

namespace {

nlohmann::json parse_value(const std::string& s) {
    try {
        return nlohmann::json::parse(s);
    } catch (const nlohmann::json::exception&) {
        return s;
    }
}

int emit(const nlohmann::json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::ofstream f(out);
    if (!f) {
        std::cerr << "ltx: cannot write " << out << "\n";
        return 2;
    }
    f << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lubin-Tate formal groups, twist matrices and epsilon elements: batch checks with JSON reports"};
    std::string command, config, out, u, kase;
    long p = 0, r = 0, precision = 0, degree = 0, m = 0, d = 0, e = 0, dN = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> sets;

    app.add_option("command", command, "one of: ring, group-law, p-series, log-exp-check, rep-info, twist-solve, h2, "
                                        "audit-tame, audit-wild, ucris, ucris-funct, gauss-sum, conductor, block-det, "
                                        "eps-d, e-matrix, weak-rep, weak-audit, audit-all")
        ->required();
    app.add_option("--config", config, "JSON config file; flags override its keys");
    app.add_option("--out", out, "write the report here instead of stdout");
    app.add_option("--p", p, "odd prime");
    app.add_option("--r", r, "dimension");
    app.add_option("--u", u, "row-major integer matrix as JSON, e.g. [[4]]");
    app.add_option("--precision,-N", precision, "p-adic digits (default LTX_PRECISION or 20)");
    app.add_option("--degree,-D", degree, "truncation degree");
    app.add_option("--m", m);
    app.add_option("--d", d);
    app.add_option("--e", e);
    app.add_option("--dN", dN);
    app.add_option("--case", kase, "I or T");
    app.add_option("--seed", seed);
    app.add_option("--set", sets, "extra key=value (value read as JSON when it parses)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int rc = app.exit(err);
        return rc == 0 ? 0 : 2;
    }

    auto t0 = std::chrono::steady_clock::now();
    ltx::RunConfig cfg;
    try {
        nlohmann::json j = nlohmann::json::object();
        if (!config.empty()) {
            std::ifstream f(config);
            if (!f) throw ltx::InvalidInput("cannot read " + config);
            j = nlohmann::json::parse(f);
            if (!j.is_object()) throw ltx::InvalidInput("config must be a JSON object");
        }
        j["command"] = command;
        if (app.count("--p")) j["p"] = p;
        if (app.count("--r")) j["r"] = r;
        if (app.count("--u")) j["u"] = nlohmann::json::parse(u);
        if (app.count("--precision")) j["precision"] = precision;
        if (app.count("--degree")) j["degree"] = degree;
        if (app.count("--m")) j["m"] = m;
        if (app.count("--d")) j["d"] = d;
        if (app.count("--e")) j["e"] = e;
        if (app.count("--dN")) j["dN"] = dN;
        if (app.count("--case")) j["case"] = kase;
        if (app.count("--seed")) j["seed"] = seed;
        for (auto& s : sets) {
            auto eq = s.find('=');
            if (eq == std::string::npos) throw ltx::InvalidInput("--set expects key=value");
            j[s.substr(0, eq)] = parse_value(s.substr(eq + 1));
        }
        if (!out.empty()) j["out"] = out;
        cfg = ltx::RunConfig::from_json(j);

        ltx::AuditReport rpt = ltx::run(cfg);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        int rc = emit(ltx::report_json(cfg, rpt, secs), cfg.out);
        if (rc) return rc;
        if (!rpt.pass())
            std::cerr << "ltx: " << rpt.failures() << " of " << rpt.checks.size() << " checks failed\n";
        return ltx::exit_code(rpt);
    } catch (const std::exception& ex) {
        int rc = ltx::exit_code(ex);
        std::string kind = "error";
        if (auto* le = dynamic_cast<const ltx::Error*>(&ex)) kind = le->kind();
        std::cerr << "ltx: " << ex.what() << "\n";
        if (!out.empty()) {
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            emit({{"command", command}, {"status", "error"}, {"error", kind}, {"message", ex.what()},
                  {"exit_code", rc}, {"seconds", secs}},
                 out);
        }
        return rc;
    }
}
