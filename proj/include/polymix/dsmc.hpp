#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polymix/ensemble.hpp"
#include "polymix/kernels.hpp"
#include "polymix/moments.hpp"

namespace polymix {

/// Draws sigma with density proportional to b(unit(u) . sigma) on the sphere.
///
/// Isotropic kernels sample uniformly; otherwise the polar angle is drawn by
/// inverse CDF from a table in theta and the azimuth uniformly.
class SigmaSampler {
  public:
    explicit SigmaSampler(const AngularKernel& b, int dim, int knots = 4096);

    [[nodiscard]] Vec sample(const Vec& u_hat, Rng& rng) const;
    //! Sampled cos theta alone.
    [[nodiscard]] double sample_cos(Rng& rng) const;
    //! Tabulated CDF of cos theta (for tests).
    [[nodiscard]] double cdf_cos(double x) const;

  private:
    bool isotropic_;
    int dim_;
    std::vector<double> theta_;
    std::vector<double> cdf_;
};

/// Energy-exchange parameters with density proportional to the parameter
/// weight of the class (sigma is left at its default).
CollisionParams sample_bl_params(InteractionClass cls, double alpha_a, double alpha_b, int dim,
                                 Rng& rng);

/// Integral of the parameter weight of the class over its domain.
double parameter_weight_norm(InteractionClass cls, double alpha_a, double alpha_b, int dim);

/// F with kernel / b <= F (<a>^gamma + <b>^gamma) for every pair state and
/// parameter value.
double majorant_factor(const PairKernel& kernel, int i, int j, const MixtureSpec& mix);

struct SimConfig {
    double dt = 0.01;
    double t_end = 1.0;
    std::vector<double> output_times;
    std::uint64_t seed = 1;
    std::vector<double> orders{0, 2};
    int refresh_interval = 10;  //!< steps between exact majorant recomputations
    std::vector<std::vector<bool>> enabled;  //!< [i][j], empty means all pairs on
    int threads = 1;
};

struct Invariants {
    std::vector<double> mass;
    double m2 = 0.0;
    double energy = 0.0;
    Vec momentum;
    double momentum_scale = 0.0;  //!< sum of w m |v|
    std::vector<double> temperature;  //!< per species, from velocities
    std::vector<double> internal_temperature;  //!< mean I / (alpha + 1); 0 for monatomic
};

Invariants invariants_of(const Ensemble& ens, const MixtureSpec& mix);

struct PairStats {
    int i = 0, j = 0;
    long long candidates = 0;
    long long accepted = 0;
    long long cap_raises = 0;
    [[nodiscard]] double acceptance() const
    {
        return candidates > 0 ? static_cast<double>(accepted) / static_cast<double>(candidates) : 0.0;
    }
};

struct ConservationReport {
    Invariants initial;
    Invariants final_state;
    bool masses_exact = true;
    double m2_drift_rel = 0.0;        //!< |m2(end) - m2(0)| / m2(0)
    double max_m2_drift_rel = 0.0;    //!< max over output times
    double momentum_drift_rel = 0.0;  //!< |P(end) - P(0)| / momentum scale
    long long collisions = 0;
};

struct RunResult {
    std::vector<double> times;
    std::vector<MomentVector> moments;
    std::vector<Invariants> invariants;
    ConservationReport conservation;
    std::vector<PairStats> pair_stats;
    std::vector<std::string> warnings;
};

/// Space-homogeneous particle solver with majorant-thinned pair selection.
class Simulator {
  public:
    /// Throws ConfigError for an inconsistent configuration or ensemble.
    Simulator(const KernelSpec& spec, const MixtureSpec& mix, SimConfig config, Ensemble ens);
    // Both specs are held by reference and must outlive the simulator.
    Simulator(KernelSpec&&, const MixtureSpec&, SimConfig, Ensemble) = delete;
    Simulator(const KernelSpec&, MixtureSpec&&, SimConfig, Ensemble) = delete;

    /// Advance by `dt`; throws NumericalError on a majorant violation.
    void step(double dt);
    /// Steps to every output time and t_end, recording moments.
    RunResult run();

    [[nodiscard]] const Ensemble& ensemble() const { return ens_; }
    [[nodiscard]] double time() const { return time_; }
    [[nodiscard]] const std::vector<PairStats>& pair_stats() const { return stats_; }
    [[nodiscard]] long long collisions() const { return collisions_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }

  private:
    struct PairData {
        int i = 0, j = 0;
        const PairKernel* kernel = nullptr;
        SigmaSampler sigma;
        double factor = 1.0;      //!< majorant factor F
        double rate_norm = 1.0;   //!< |b| times parameter-weight norm
        double gamma = 0.0;
        double carry = 0.0;
    };

    void refresh_caps();
    void raise_cap(int species, double bsq);
    [[nodiscard]] double cap_sum(const PairData& p) const;
    [[nodiscard]] double pair_count(const PairData& p) const;
    void collide_pair(PairData& p, PairStats& st, double dt);

    const KernelSpec* spec_;
    const MixtureSpec* mix_;
    SimConfig config_;
    Ensemble ens_;
    Rng rng_;
    std::vector<PairData> pairs_;
    std::vector<PairStats> stats_;
    std::vector<double> cap_bsq_;  //!< inflated max squared bracket per species
    std::vector<std::string> warnings_;
    double time_ = 0.0;
    long long steps_ = 0;
    long long collisions_ = 0;
    bool warned_acceptance_ = false, warned_candidates_ = false;
};

enum class InitialKind { maxwellian, heavy_tailed, two_temperature };

/// Initial data. maxwellian: Gaussian velocities at one temperature and
/// Gamma(alpha + 1) internal energies (the collision-invariant equilibrium);
/// two_temperature: the same with per-species temperatures; heavy_tailed:
/// multivariate Student-t velocities and Pareto internal energies, so only
/// moments of order below min(nu, 2 pareto_shape) are finite.
struct InitialCondition {
    InitialKind kind = InitialKind::maxwellian;
    std::vector<double> temperature{1.0};  //!< one value or one per species
    std::vector<double> species_mass;      //!< C0 per species; empty means N_i / N
    double student_nu = 13.0;
    double pareto_shape = 6.5;

    [[nodiscard]] double temperature_of(int i) const;
};

InitialKind parse_initial_kind(const std::string& name);
std::string to_string(InitialKind k);

/// Sample an ensemble with n_particles[i] particles for species i.
Ensemble make_initial_ensemble(const InitialCondition& ic, const MixtureSpec& mix,
                               const std::vector<int>& n_particles, std::uint64_t seed);

}  // namespace polymix
