#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "polymix/dsmc.hpp"

namespace polymix {

inline constexpr int kReportSchemaVersion = 1;

/// Rows `t,species,k,value,stderr`, one per output time, species and order,
/// followed by the mixture rows (species "mixture"). Numbers are printed
/// with 17 significant digits so identical runs give identical bytes.
void write_moments_csv(std::ostream& os, const RunResult& run, const MixtureSpec& mix);

nlohmann::json to_json(const Invariants& inv, const MixtureSpec& mix);
nlohmann::json to_json(const ConservationReport& rep, const MixtureSpec& mix);
nlohmann::json to_json(const PairStats& st, const MixtureSpec& mix);

/// Shortest round-trip decimal form of x.
std::string format_number(double x);

}  // namespace polymix
