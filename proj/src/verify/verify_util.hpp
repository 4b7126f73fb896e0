#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polymix/kernels.hpp"

namespace polymix::verify::detail {

std::string label(int i, int j, const MixtureSpec& mix);
std::vector<std::pair<int, int>> pairs_of_class(const MixtureSpec& mix, InteractionClass cls);
nlohmann::json matrix_json(const Matrix& m, const MixtureSpec& mix);
double seconds_since(std::chrono::steady_clock::time_point t0);

}  // namespace polymix::verify::detail
