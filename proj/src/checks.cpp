#include "polymix/checks.hpp"

#include <algorithm>
#include <cmath>

namespace polymix {

CheckResult check_le(std::string name, double observed, double tolerance, long samples,
                     std::string detail)
{
    return {std::move(name), observed, tolerance, observed <= tolerance, samples,
            std::move(detail)};
}

CheckResult check_ge(std::string name, double observed, double threshold, long samples,
                     std::string detail)
{
    return {std::move(name), observed, threshold, observed >= threshold, samples,
            std::move(detail), CheckSense::at_least};
}

CheckResult check_true(std::string name, bool ok, std::string detail)
{
    return {std::move(name), ok ? 1.0 : 0.0, 1.0, ok, 0, std::move(detail), CheckSense::holds};
}

double utilization(const CheckResult& c)
{
    if (std::isnan(c.observed))
        return INFINITY;
    switch (c.sense) {
    case CheckSense::at_most:
        if (c.tolerance > 0.0)
            return std::max(0.0, c.observed / c.tolerance);
        return c.observed <= c.tolerance ? 0.0 : INFINITY;
    case CheckSense::at_least:
        if (c.observed > 0.0)
            return c.tolerance / c.observed;
        return c.passed ? 0.0 : INFINITY;
    case CheckSense::holds: break;
    }
    return c.passed ? 0.0 : INFINITY;
}

bool all_passed(const std::vector<CheckResult>& checks)
{
    return std::all_of(checks.begin(), checks.end(), [](auto& c) { return c.passed; });
}

namespace {
nlohmann::json number(double x)
{
    if (std::isfinite(x))
        return x;
    return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}
}  // namespace

nlohmann::json to_json(const CheckResult& c)
{
    nlohmann::json j{{"name", c.name},
                     {"observed", number(c.observed)},
                     {"tolerance", number(c.tolerance)},
                     {"relation", c.sense == CheckSense::at_most    ? "<="
                                  : c.sense == CheckSense::at_least ? ">="
                                                                    : "holds"},
                     {"passed", c.passed}};
    if (c.samples > 0)
        j["samples"] = c.samples;
    if (!c.detail.empty())
        j["detail"] = c.detail;
    return j;
}

nlohmann::json to_json(const std::vector<CheckResult>& checks)
{
    nlohmann::json arr = nlohmann::json::array();
    for (auto& c : checks)
        arr.push_back(to_json(c));
    return arr;
}

}  // namespace polymix
