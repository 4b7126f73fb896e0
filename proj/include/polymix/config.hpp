#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "polymix/averaging.hpp"
#include "polymix/dsmc.hpp"
#include "polymix/kernels.hpp"

namespace polymix {

inline constexpr int kConfigSchemaVersion = 1;

struct MomentsSettings {
    double k = 0.0;                   //!< order for moments-ode; 0 selects k*
    std::vector<double> t_samples;    //!< envelope sample times
    double C_star = 0.0;              //!< 0 selects E_k* + B_k*
    bool uniform_in_time = true;
};

struct SimulationSettings {
    std::vector<int> n_particles;
    SimConfig sim;
    InitialCondition initial;
};

/// Sample sizes and seeds of the verification suites.
struct VerificationSettings {
    long kinematics_samples = 1000000;
    long energy_samples = 1000000;
    long kernel_samples = 1000000;
    long gain_pairs = 10000;
    long binomial_samples = 1000000;
    int comparison_configs = 100;
    std::uint64_t seed = 20240601;
};

/// Whole-pipeline configuration; every subcommand reads the sections it needs.
struct Config {
    explicit Config(MixtureSpec m) : mix{std::move(m)} {}

    MixtureSpec mix;
    KernelSpec kernels;
    AveragingOptions averaging;
    MomentsSettings moments;
    SimulationSettings simulation;
    VerificationSettings verification;
    nlohmann::json raw;
    std::string hash;
};

/// Throws ConfigError naming the offending field.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);

/// FNV-1a 64-bit over the canonical (key-sorted) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

/// The shipped default configuration.
nlohmann::json default_config_json();

PairKernelSpec parse_pair_kernel(const nlohmann::json& j, const std::string& where);
nlohmann::json to_json(const PairKernelSpec& k);

/// Fresh seed overrides every seed field.
void override_seed(Config& cfg, std::uint64_t seed);

}  // namespace polymix
