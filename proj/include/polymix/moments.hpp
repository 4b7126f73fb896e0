#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "polymix/averaging.hpp"
#include "polymix/ensemble.hpp"
#include "polymix/kernels.hpp"

namespace polymix {

/// Species and mixture polynomial moments of an ensemble at a set of orders.
struct MomentVector {
    std::vector<double> orders;
    std::vector<std::vector<double>> species;        //!< [i][order index]
    std::vector<std::vector<double>> species_error;  //!< Monte-Carlo standard error
    std::vector<std::vector<double>> ess;            //!< effective sample size
    std::vector<double> mixture;
    std::vector<double> mixture_error;
    std::vector<double> mixture_ess;  //!< effective sample size of the mixture sum
    std::vector<bool> empty_species;

    //! Orders below this effective sample size are refused as unreliable.
    static constexpr double kMinEss = 100.0;

    [[nodiscard]] int n_species() const { return static_cast<int>(species.size()); }
    //! Index of `order`; throws std::out_of_range naming the missing order.
    [[nodiscard]] std::size_t index_of(double order) const;
    [[nodiscard]] double at(int i, double order) const { return species[i][index_of(order)]; }
    [[nodiscard]] double mixture_at(double order) const { return mixture[index_of(order)]; }
    [[nodiscard]] double mixture_error_at(double order) const
    {
        return mixture_error[index_of(order)];
    }
    //! True when every species has enough effective samples at `order`.
    [[nodiscard]] bool reliable(double order) const;
    //! True when the mixture estimator has enough effective samples at `order`.
    [[nodiscard]] bool mixture_reliable(double order) const;
};

/// m_k^i = w_i sum over particles of <state>^k, with compensated summation.
MomentVector moments_of_ensemble(const Ensemble& ens, const MixtureSpec& mix,
                                 std::span<const double> orders);

/// m_lambda <= m_lambda1^tau m_lambda2^(1-tau) for every species, with
/// lambda = tau lambda1 + (1 - tau) lambda2.
bool interpolation_check(const MomentVector& mom, double lambda1, double lambda,
                         double lambda2, double rel_slack = 1e-12);

/// Zeroth and second species moments that the ODI constants depend on.
struct OdiInputs {
    std::vector<double> m0;
    std::vector<double> m2;
    //! Mixture moment of order gamma_high; used for the collision-frequency constant.
    double m_gamma_high = 0.0;

    static OdiInputs from_moments(const MomentVector& mom, const MixtureSpec& mix);
    [[nodiscard]] double m0_total() const;
    [[nodiscard]] double m2_total() const;
    /// Replace every species m2 by the mixture m2. Since species second
    /// moments never exceed the conserved mixture value, the resulting
    /// constants bound the time-dependent ones uniformly in time.
    [[nodiscard]] OdiInputs uniform_in_time() const;
};

struct OdiConstants {
    double k = 0.0;
    int k_bar_star = 0;
    double k_star = 0.0;
    double gamma_low = 0.0, gamma_high = 0.0;
    double m0 = 0.0, m2 = 0.0;

    Matrix A_tilde_ij;  //!< kappa_lb - 2 C at the threshold
    Matrix A_star_ij;   //!< A_tilde L
    Matrix log_K1, log_K2;
    double A_star = 0.0;
    double epsilon = 0.0;
    double log_B_k = 0.0;
    double B_k = 0.0;
    double D_k = 0.0;
    double log_E_k = 0.0;
    double E_k = 0.0;
    double log_B_k_asymptotic = 0.0;
    double K_coll = 0.0;
    std::vector<std::string> flagged_pairs;  //!< pairs skipped by the K2 exponent guard
};

/// Constants of the moment differential inequality at order k >= k_bar_star.
/// Throws ConfigError when k is below the averaging threshold or a species
/// has zero mass.
OdiConstants compute_odi_constants(const OdiInputs& in, const KernelConstants& kc,
                                   const AveragingReport& avg, const MixtureSpec& mix, double k);

/// Least-squares slopes of log B_k and of its large-k asymptotic form over
/// integer k in [k_bar_star, k_bar_star + window].
struct AsymptoticSlope {
    double k_lo = 0.0, k_hi = 0.0;
    double exact = 0.0;
    double asymptotic = 0.0;
    [[nodiscard]] double rel_diff() const { return std::fabs(exact - asymptotic) / std::fabs(exact); }
};

AsymptoticSlope B_k_asymptotic_slope(const OdiInputs& in, const KernelConstants& kc,
                                     const AveragingReport& avg, const MixtureSpec& mix,
                                     int window = 32);

/// E_{k*} + B_{k*} at k* = max(2 + 2 gamma_high, k_bar_star).
double h_frak(const OdiInputs& in, const KernelConstants& kc, const AveragingReport& avg,
              const MixtureSpec& mix);

/// 2 c~_k max(kappa_ub) m2.
double D_k(double k, const KernelConstants& kc, double m2);

/// Generation envelope E_k + m2((k-2)/(gamma_low A_star))^((k-2)/gamma_low) t^(-(k-2)/gamma_low).
double generation_envelope(const OdiConstants& c, double t);
/// max(E_k, m_k(0)).
double propagation_bound(const OdiConstants& c, double mk0);

/// Constants of the envelopes for orders 2 < k < k_bar_star.
struct SubThresholdConstants {
    double k = 0.0;
    int k_bar_star = 0;
    double gamma_low = 0.0;
    double m2 = 0.0;
    double A_star = 0.0;
    double E_next = 0.0;  //!< E at order k_bar_star + 1
    double D_k = 0.0;
    double E_tilde = 0.0;
};

SubThresholdConstants sub_threshold_constants(const OdiInputs& in, const KernelConstants& kc,
                                              const AveragingReport& avg,
                                              const MixtureSpec& mix, double k);
double sub_threshold_generation(const SubThresholdConstants& c, double t);
/// max(E~_k, e m_k(0)).
double sub_threshold_propagation(const SubThresholdConstants& c, double mk0);

/// Solution bound z(t) = E(1 + K t^-beta) for y' <= B - A y^(1+c).
class ComparisonEnvelope {
  public:
    /// Throws std::invalid_argument unless A, B, c > 0.
    ComparisonEnvelope(double A, double B, double c);
    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] double E() const { return E_; }
    [[nodiscard]] double beta() const { return beta_; }
    [[nodiscard]] double K() const { return K_; }

  private:
    double A_, B_, c_, E_, beta_, K_;
};

enum class BoundRegime { above_kstar, any_k };

/// Right side of the bilinear collision-moment estimate for species pair
/// (i, j) with densities f (species i) and g (species j).
double collision_moment_bound(const MomentVector& mom_f, const MomentVector& mom_g, int i, int j,
                              const OdiConstants& c, const KernelConstants& kc,
                              const AveragingReport& avg, const MixtureSpec& mix, double k,
                              BoundRegime regime);

struct OmegaReport {
    bool rejected_config = false;  //!< C_star below h_frak
    bool in_omega = false;
    bool in_omega_tilde = false;
    double h_frak = 0.0;
    std::vector<std::string> reasons;
};

/// Membership of an ensemble's moments in the invariant set; `mom` must
/// contain orders 0, 2, k_star and (2 + gamma_high - gamma_low)^+.
OmegaReport omega_membership(const MomentVector& mom, double h_frak_value, double k_star,
                             const MixtureSpec& mix, std::span<const double> C0, double C2,
                             double C_star, double rel_tol = 1e-9);

struct CauchyConstants {
    double C_H = 0.0;  //!< 6 C_star^(3/2) max kappa_ub
    double C_L = 0.0;  //!< 2 C_star max kappa_ub
};

CauchyConstants cauchy_constants(double C_star, const KernelConstants& kc);

/// K = 2 max(kappa_ub) m_{gamma_high}.
double collision_constant(double m_gamma_high, const KernelConstants& kc);
/// (K/2)(1 + <state>^gamma_high).
double collision_frequency_bound(const ParticleState& s, double m_gamma_high,
                                 const KernelConstants& kc, const MixtureSpec& mix);
/// Collision frequency of `s` against the ensemble, by quadrature of the
/// kernel over the collision parameters for every partner.
double collision_frequency(const ParticleState& s, const Ensemble& ens, const KernelSpec& spec,
                           const MixtureSpec& mix, double tol = 1e-8);

}  // namespace polymix
