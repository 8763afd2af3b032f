#include <doctest.h>

#include <cstdlib>
#include <set>

#include "ltx/cli.hpp"
#include "ltx/errors.hpp"

using namespace ltx;

namespace {

int code_of(const json& j) {
    try {
        return exit_code(run(RunConfig::from_json(j)));
    } catch (const std::exception& e) {
        return exit_code(e);
    }
}

json without_timing(json j) {
    j.erase("seconds");
    return j;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("config validation") {
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"p", 2}, {"u", {{1}}}}), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"p", 9}, {"u", {{1}}}}), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"p", 3}, {"u", {{1, 2}}}}), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"p", 3}, {"u", {{3}}}}), NonInvertibleU);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"p", 3}, {"u", {{1, 2}, {2, 1}}}}), NonInvertibleU);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"u", "4"}}), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"u", {{1.5}}}}), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"u", {{4}}}, {"r", 2}}), DimensionMismatch);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "nope"}}), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"colour", 1}}), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"precision", 0}}), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"precision", 20}, {"N", 30}}), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"case", "X"}}), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_json({{"command", "h2"}, {"seed", -1}}), InvalidInput);
        CHECK_THROWS_AS(RunConfig::from_json(json::array()), InvalidInput);
        json nested = {{"command", "audit-all"}, {"suite", {{{"command", "audit-all"}}}}};
        CHECK_THROWS_AS(RunConfig::from_json(nested), InvalidInput);

        RunConfig c = RunConfig::from_json({{"command", "h2"}, {"p", 5}, {"u", {{2, 1}, {1, 1}}}, {"dN", 2}, {"seed", 9}});
        CHECK(c.r == 2);
        CHECK(c.dN == 2);
        CHECK(c.seed == 9);
        CHECK(RunConfig::from_json(c.to_json()).to_json() == c.to_json());
    }

    TEST_CASE("precision from the environment") {
        unsetenv("LTX_PRECISION");
        CHECK(default_precision() == 20);
        setenv("LTX_PRECISION", "31", 1);
        CHECK(default_precision() == 31);
        CHECK(RunConfig::from_json({{"command", "ring"}}).N == 31);
        CHECK(RunConfig::from_json({{"command", "ring"}, {"precision", 12}}).N == 12);
        setenv("LTX_PRECISION", "many", 1);
        CHECK_THROWS_AS(default_precision(), InvalidInput);
        unsetenv("LTX_PRECISION");
    }

    TEST_CASE("exit codes") {
        CHECK(exit_code(InvalidInput()) == 2);
        CHECK(exit_code(HypothesisFViolated()) == 2);
        CHECK(exit_code(MissingGaussSum()) == 2);
        CHECK(exit_code(PrecisionExhausted()) == 3);
        CHECK(exit_code(DegreeBudgetExceeded()) == 3);
        CHECK(exit_code(TailTooWeak()) == 3);
        CHECK(exit_code(InconsistentConductorData()) == 1);
        CHECK(exit_code(std::runtime_error("x")) == 1);

        CHECK(code_of({{"command", "h2"}, {"p", 3}, {"u", {{4}}}, {"dN", 1}}) == 0);
        CHECK(code_of({{"command", "h2"}, {"p", 3}, {"u", {{1}}}}) == 2);
        CHECK(code_of({{"command", "h2"}, {"p", 3}, {"u", {{1, 0}}}}) == 2);
        CHECK(code_of({{"command", "twist-solve"}, {"p", 3}, {"u", {{2}}}}) == 3);
        CHECK(code_of({{"command", "p-series"}, {"p", 3}, {"u", {{1}}}, {"degree", 9}}) == 1);
    }

    TEST_CASE("h2 and group-law examples") {
        AuditReport h = run(RunConfig::from_json({{"command", "h2"}, {"p", 3}, {"r", 1}, {"u", {{4}}}, {"dN", 1}}));
        CHECK(h.pass());
        CHECK(h.witness["omega"] == 1);
        AuditReport g =
            run(RunConfig::from_json({{"command", "group-law"}, {"p", 3}, {"r", 1}, {"u", {{1}}}, {"degree", 9}}));
        CHECK(g.pass());
        CHECK(g.checks.size() == 6);
        AuditReport w = run(RunConfig::from_json({{"command", "h2"}, {"p", 3}, {"u", {{2}}}, {"m", 1}, {"d", 2}}));
        CHECK(w.witness["omega"] == 1);  // 2^2 - 1 = 3
    }

    TEST_CASE("reports are reproducible") {
        json j = {{"command", "weak-audit"}, {"p", 3}, {"u", {{2, 0}, {0, 4}}}, {"d", 2}, {"seed", 5}};
        RunConfig c = RunConfig::from_json(j);
        json a = without_timing(report_json(c, run(c), 1.0)), b = without_timing(report_json(c, run(c), 2.0));
        CHECK(a.dump() == b.dump());
        json k = {{"command", "log-exp-check"}, {"p", 3}, {"u", {{1}}}, {"samples", 5}, {"seed", 3}};
        RunConfig l = RunConfig::from_json(k);
        CHECK(run(l).to_json().dump() == run(l).to_json().dump());
    }

    TEST_CASE("suites") {
        AuditReport empty = audit_all({});
        CHECK(empty.pass());
        CHECK(empty.checks.empty());

        json j = {{"command", "audit-all"},
                  {"suite",
                   {{{"command", "h2"}, {"p", 3}, {"u", {{4}}}},
                    {{"command", "audit-tame"}, {"p", 3}, {"u", {{1}}}, {"d", 2}},
                    {{"command", "gauss-sum"}, {"p", 5}}}}};
        RunConfig c = RunConfig::from_json(j);
        REQUIRE(c.suite.size() == 3);
        CHECK(c.suite[0].N == c.N);
        AuditReport r = run(c);
        CHECK(exit_code(r) == 1);
        CHECK(r.failures() == 1);
        std::string failed;
        for (auto& k : r.checks)
            if (!k.pass) failed = k.name + " " + k.witness["error"].get<std::string>();
        CHECK(failed == "[1] audit-tame p=3 u=[[1]]/completed HypothesisFViolated");
        // stable order whatever the thread count
        AuditReport one = audit_all(c.suite, 1), many = audit_all(c.suite, 3);
        CHECK(one.to_json().dump() == many.to_json().dump());
    }

    TEST_CASE("canonical suite covers every command") {
        auto groups = canonical_groups(20);
        std::set<std::string> seen;
        for (auto& g : groups)
            for (auto& c : g.configs) seen.insert(c.command);
        for (auto& name : commands())
            if (name != "audit-all" && name != "e-matrix" && name != "weak-rep") CHECK_MESSAGE(seen.count(name), name);
        auto a = canonical_suite(20), b = canonical_suite(30);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            json x = a[i].to_json(), y = b[i].to_json();
            x.erase("precision");
            y.erase("precision");
            CHECK(x == y);
        }
    }

    TEST_CASE("report comparison") {
        auto make = [](const std::string& digits, long prec, bool pass) {
            AuditReport r;
            r.precision = prec;
            RingPtr R = make_ring(3, RingKind::base, 1);
            Padic x = Padic::integer(R, mpz_class(digits), prec);
            r.add("x", pass, {{"x", x.to_json()}, {"count", 4}}, prec);
            return r;
        };
        // 3^20 + 1 and 1 agree on 20 digits
        mpz_class big = 1;
        for (int i = 0; i < 20; ++i) big *= 3;
        CHECK(compare_reports(make("1", 20, true), make(mpz_class(big + 1).get_str(), 30, true), 3).empty());
        CHECK(compare_reports(make("1", 20, true), make("4", 30, true), 3).size() == 1);
        CHECK(compare_reports(make("1", 20, true), make("1", 30, false), 3).size() == 1);
        AuditReport c = make("1", 20, true);
        c.checks[0].witness["count"] = 5;
        CHECK(compare_reports(c, make("1", 20, true), 3).size() == 1);
    }
}
