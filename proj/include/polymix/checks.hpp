#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace polymix {

/// Direction of the comparison between observed value and tolerance.
enum class CheckSense { at_most, at_least, holds };

/// One numerical check: observed figure of merit against its tolerance.
struct CheckResult {
    std::string name;
    double observed = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    long samples = 0;
    std::string detail;
    CheckSense sense = CheckSense::at_most;
};

/// Pass iff observed <= tolerance (check_le) or observed >= threshold (check_ge).
CheckResult check_le(std::string name, double observed, double tolerance, long samples = 0,
                     std::string detail = {});
CheckResult check_ge(std::string name, double observed, double threshold, long samples = 0,
                     std::string detail = {});
CheckResult check_true(std::string name, bool ok, std::string detail = {});

/// Fraction of the tolerance used: observed / tolerance for upper bounds,
/// threshold / observed for lower bounds, 0 or inf for boolean checks.
/// Values above 1 mean failure.
double utilization(const CheckResult& c);

bool all_passed(const std::vector<CheckResult>& checks);

nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const std::vector<CheckResult>& checks);

}  // namespace polymix
