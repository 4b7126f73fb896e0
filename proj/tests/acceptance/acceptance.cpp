// Runs every verification suite on a config (the shipped default unless a
// path is given) and prints one line per acceptance criterion.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "polymix/config.hpp"
#include "polymix/errors.hpp"
#include "polymix/report.hpp"
#include "polymix/verify.hpp"

using namespace polymix;

namespace {

const char* relation(CheckSense s)
{
    switch (s) {
    case CheckSense::at_most: return "<=";
    case CheckSense::at_least: return ">=";
    case CheckSense::holds: return "holds";
    }
    return "?";
}

/// The failing check with the largest utilization, else the tightest passing one.
const CheckResult* representative(const verify::SuiteReport& s)
{
    const CheckResult* best = nullptr;
    double worst = -1.0;
    for (const auto& c : s.checks) {
        const double u = utilization(c);
        const bool better = best == nullptr || (!c.passed && best->passed)
                            || (c.passed == best->passed && u > worst);
        if (better) {
            best = &c;
            worst = u;
        }
    }
    return best;
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        const Config cfg = argc > 1 ? load_config(argv[1]) : parse_config(default_config_json());
        const auto suites = verify::all(cfg);
        bool all_ok = true;
        nlohmann::json report = nlohmann::json::array();
        for (const auto& s : suites) {
            const CheckResult* c = representative(s);
            all_ok = all_ok && s.passed();
            int failed = 0;
            for (const auto& x : s.checks)
                failed += !x.passed;
            std::printf("criterion %2d %-26s %s  observed=%-12s %s tolerance=%-10s [%s] (%zu checks, "
                        "%d failed, %.1f s)\n",
                        s.criterion, s.name.c_str(), s.passed() ? "PASS" : "FAIL",
                        c ? format_number(c->observed).c_str() : "-", c ? relation(c->sense) : "",
                        c ? format_number(c->tolerance).c_str() : "-", c ? c->name.c_str() : "",
                        s.checks.size(), failed, s.seconds);
            report.push_back(verify::to_json(s));
        }
        std::printf("\nindividual checks:\n");
        for (const auto& s : suites)
            for (const auto& c : s.checks)
                std::printf("  [%2d] %s %s observed=%s %s tolerance=%s%s%s\n", s.criterion,
                            c.passed ? "PASS" : "FAIL", c.name.c_str(),
                            format_number(c.observed).c_str(), relation(c.sense),
                            format_number(c.tolerance).c_str(), c.detail.empty() ? "" : "; ",
                            c.detail.c_str());
        std::ofstream("acceptance_report.json")
            << nlohmann::json{{"schema_version", kReportSchemaVersion},
                              {"config_hash", cfg.hash},
                              {"passed", all_ok},
                              {"suites", report}}
                   .dump(2)
            << '\n';
        std::printf("\noverall: %s\n", all_ok ? "PASS" : "FAIL");
        return all_ok ? 0 : 1;
    }
    catch (const std::exception& e) {
        std::cerr << "acceptance run aborted: " << e.what() << '\n';
        return 2;
    }
}
