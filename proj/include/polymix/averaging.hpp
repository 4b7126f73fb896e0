#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polymix/kernels.hpp"

namespace polymix {

/// State-dependent inputs of the contraction factors for one ordered pair.
///
/// center_excess = (m_a + m_b)|V|^2/(2m), relative_excess = E/m and
/// cos_Vu = unit(V) . unit(u). When zero_center is set the direction of V
/// is undefined and unit(V) . sigma is taken as 0.
struct SplitInputs {
    double center_excess = 0.0;
    double relative_excess = 0.0;
    double cos_Vu = 0.0;
    double s = 0.5;  //!< m_a / (m_a + m_b)
    bool zero_center = false;

    static SplitInputs from_states(const ParticleState& a, const ParticleState& b,
                                   const MixtureSpec& mix);
    /// Compactified coordinates: u_center = 1/(1 + center_excess) and
    /// u_relative = 1/(1 + relative_excess), both in (0, 1].
    static SplitInputs from_compact(double u_center, double u_relative, double cos_Vu, double s);
};

/// Which particle's primed bracket the contraction bounds.
enum class PairSide { first, second };

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// Average over the collision parameters of the contraction factor raised to
/// `power`, against b * upper partition envelope * parameter weight.
///
/// The contraction factor is (1 - s_bar(1 - |y|)) for mono-mono,
/// (1 - s_bar R (1 - |y|)) for the mixed classes and, for poly-poly,
/// (1 - q(1 - |y|) - t(1 - r)) on the first particle resp.
/// (1 - p(1 - |y|) - t r) on the second, where y = unit(V) . sigma.
Estimate averaged_contraction(const PairKernel& kernel, double power, const SplitInputs& in,
                              PairSide side, double tol = 1e-9);

/// Monte-Carlo estimator of the same integral with its standard error.
Estimate averaged_contraction_mc(const PairKernel& kernel, double power, const SplitInputs& in,
                                 PairSide side, long n_samples, std::uint64_t seed);

/// Fixed stratified set of compactified states (64 strata plus corners).
/// The same set is used for every power so the estimates stay monotone.
std::vector<SplitInputs> averaging_states(const PairKernel& kernel, double s, int n_strata_side,
                                          std::uint64_t seed);

/// Grid of powers searched for the threshold: 2, 3, 4, 6, 8, ... up to kmax.
std::vector<int> averaging_grid(int kmax = 1024);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_rel_residual = 0.0;
    int points = 0;
};

/// Least-squares line through (log k, log C_k) on k in [k_lo, k_hi].
DecayFit fit_decay(const std::vector<int>& k, const std::vector<double>& c, double k_lo,
                   double k_hi);

struct PairAveraging {
    int i = 0, j = 0;
    InteractionClass cls = InteractionClass::mono_mono;
    double kappa_lb = 0.0, kappa_ub = 0.0;
    std::vector<int> k;
    std::vector<double> C;
    std::vector<double> error;
    bool monotone = true;
    DecayFit fit;
    std::optional<int> k_bar_star;  //!< smallest grid k with C_k < kappa_lb / 2

    [[nodiscard]] double C_at(int power) const;
};

/// Empirical uniform constants: sup over the sampled states, per unordered pair.
struct AveragingReport {
    std::vector<PairAveraging> pairs;
    std::string method = "quadrature";
    int n_states = 0;
    bool threshold_reached = true;
    int k_bar_star = 0;     //!< max over pairs
    double k_star = 0.0;    //!< max(2 + 2 gamma_high, k_bar_star)

    [[nodiscard]] const PairAveraging& pair(int i, int j) const;
};

struct AveragingOptions {
    int kmax = 1024;
    int strata_per_axis = 4;
    double tol = 1e-9;
    std::uint64_t seed = 1;
    int threads = 1;
    double fit_lo = 16.0, fit_hi = 256.0;
};

/// Builds the C_k tables for every pair and locates the thresholds.
AveragingReport estimate_Ck(const KernelSpec& spec, const MixtureSpec& mix,
                            const KernelConstants& constants, const AveragingOptions& opt = {});

/// Average over collision parameters of the sum of the primed brackets to
/// the power k, for a fixed pre-collision pair.
Estimate gain_average(const PairKernel& kernel, double k, const ParticleState& a,
                      const ParticleState& b, const MixtureSpec& mix, double tol = 1e-9);

/// (x+y)^p <= x^p + y^p + 2^(p+1)(x y^(p-1) [y >= x] + x^(p-1) y [x >= y]).
bool p_binomial_check(double x, double y, double p);

/// 2^(k/2 + 1).
double c_tilde(double k);

}  // namespace polymix
