#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polymix/checks.hpp"
#include "polymix/config.hpp"
#include "polymix/moments.hpp"

namespace polymix::verify {

/// Outcome of one verification suite.
struct SuiteReport {
    int criterion = 0;
    std::string name;
    std::vector<CheckResult> checks;
    double seconds = 0.0;
    nlohmann::json data = nlohmann::json::object();

    [[nodiscard]] bool passed() const { return all_passed(checks); }
};

nlohmann::json to_json(const SuiteReport& r);

/// Involution, conservation, finite-difference Jacobian and measure
/// invariance of the collision maps, per interaction class.
SuiteReport kinematics(const Config& cfg);

/// Convexity, reconstruction and bracket estimates of the energy splits.
SuiteReport energy_identities(const Config& cfg);

/// Pushforward test of the weighted invariant measure on a compact window:
/// marginal histograms of pre- and post-collision coordinates are compared
/// by a paired chi-square statistic, one check per species pair.
std::vector<CheckResult> measure_invariance(const MixtureSpec& mix, int i, int j, long n,
                                            std::uint64_t seed, nlohmann::json* data = nullptr);

/// Energy-kernel sandwich, bracket product bounds, sum-form envelopes,
/// micro-reversibility and a Monte-Carlo cross-check of kappa_ub.
SuiteReport kernels(const Config& cfg, const KernelConstants& kc);

/// Monotonicity, threshold, decay fit and gain bound of the averaged
/// contraction constants. `report` is filled when given.
SuiteReport averaging(const Config& cfg, const KernelConstants& kc,
                      AveragingReport* report = nullptr);

SuiteReport p_binomial(const Config& cfg);

/// RK4 solutions of y' = B - A y^(1+c) against the comparison envelope.
SuiteReport comparison(const Config& cfg);

/// Trajectory of the configured simulation with its setup.
struct SimulationRun {
    Ensemble initial;
    RunResult result;
    double seconds = 0.0;
};

SimulationRun run_simulation(const Config& cfg);

/// Mass, energy and momentum bookkeeping of a run.
SuiteReport conservation(const Config& cfg, const SimulationRun& run);

/// Propagation and generation envelopes against the moments of a run.
SuiteReport envelopes(const Config& cfg, const KernelConstants& kc, const AveragingReport& avg,
                      const SimulationRun& run);

/// Species temperatures of a run started at equilibrium.
SuiteReport equilibrium(const Config& cfg);

/// Two runs with the same seed must write identical output files.
SuiteReport determinism(const Config& cfg);

/// Constants of the moment inequality and envelope samples for the initial
/// data of the simulation section.
struct OdiSummary {
    OdiConstants constants;
    MomentVector initial_moments;
    std::vector<double> t;
    std::vector<double> z;           //!< comparison envelope
    std::vector<double> generation;  //!< generation envelope
    std::optional<SubThresholdConstants> sub_threshold;
    AsymptoticSlope slope;
    double h_frak = 0.0;
};

/// `k` <= 0 selects k*.
OdiSummary moments_ode(const Config& cfg, const KernelConstants& kc, const AveragingReport& avg,
                       double k);
nlohmann::json to_json(const OdiSummary& s);
/// Rows `t,z,generation`.
std::string envelope_csv(const OdiSummary& s);

/// Every suite in criterion order.
std::vector<SuiteReport> all(const Config& cfg);

}  // namespace polymix::verify
