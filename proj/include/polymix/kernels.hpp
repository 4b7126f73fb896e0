#pragma once

#include <vector>

#include "polymix/checks.hpp"
#include "polymix/kinematics.hpp"
#include "polymix/quadrature.hpp"
#include "polymix/random.hpp"

namespace polymix {

/// Angular part b(cos theta), cos theta = unit(u) . sigma.
///
/// isotropic: b = value. power: b = coefficient (1 - x)^exponent for
/// x <= cutoff and 0 above (an angular cutoff when cutoff < 1).
struct AngularKernel {
    enum class Type { isotropic, power };
    Type type = Type::isotropic;
    double value = 1.0;
    double coefficient = 1.0;
    double exponent = 0.0;
    double cutoff = 1.0;

    static AngularKernel isotropic(double value) { return {Type::isotropic, value}; }
    static AngularKernel normalized_isotropic(int dim);
    static AngularKernel power(double coefficient, double exponent, double cutoff = 1.0);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] bool is_isotropic() const { return type == Type::isotropic; }
    //! Values of x where b may be discontinuous.
    [[nodiscard]] std::vector<double> breaks() const;
    //! Power n of the substitution theta = pi t^n used for sphere integrals.
    [[nodiscard]] int theta_power(int dim) const;
    //! L1 norm over S^(dim-1); throws QuadratureError if not integrable.
    [[nodiscard]] double l1_norm(int dim, const quad::Options& opt = {}) const;
};

enum class KernelForm { product, model23 };

/// Shape of a partition bound in the energy-exchange parameters.
enum class PartitionType { constant, model23 };

struct PartitionSpec {
    PartitionType type = PartitionType::constant;
    double value = 1.0;
};

/// User-facing description of one pair's kernel.
struct PairKernelSpec {
    KernelForm form = KernelForm::product;
    AngularKernel angular = AngularKernel::isotropic(1.0);
    PartitionSpec lower{};
    PartitionSpec upper{};
};

/// Weight (1-R)^alpha R^((dim-2)/2); equals (1-R)^alpha sqrt(R) in 3 dimensions.
double weight_di(double R, double alpha, int dim = 3);
/// Weight r^ai (1-r)^aj (1-R)^(ai+aj+1) R^((dim-2)/2).
double weight_dij(double r, double R, double alpha_i, double alpha_j, int dim = 3);

/// (E/m)^(gamma/2).
double energy_kernel(double pair_energy, double gamma, const MixtureSpec& mix);

/// Kernel of one ordered species pair, bound to the mixture data it needs.
class PairKernel {
  public:
    PairKernel(const PairKernelSpec& spec, int i, int j, const MixtureSpec& mix);

    [[nodiscard]] InteractionClass cls() const { return cls_; }
    [[nodiscard]] double gamma() const { return gamma_; }
    [[nodiscard]] const AngularKernel& angular() const { return spec_.angular; }
    [[nodiscard]] const PairKernelSpec& spec() const { return spec_; }
    [[nodiscard]] int dim() const { return dim_; }

    //! Lower / upper partition envelopes b~(r, R); r ignored for mixed classes.
    [[nodiscard]] double partition_lb(double r, double R) const;
    [[nodiscard]] double partition_ub(double r, double R) const;
    //! sup over (r, R) of partition_ub.
    [[nodiscard]] double partition_ub_sup() const;
    //! Parameter weight of the class: 1, d_i(R) or d_ij(r, R).
    [[nodiscard]] double weight(double r, double R) const;
    //! Exponents of the Beta-type weights: R^ea (1-R)^eb and r^ra (1-r)^rb.
    [[nodiscard]] double weight_R_lower() const { return (dim_ - 2) / 2.0; }
    [[nodiscard]] double weight_R_upper() const { return weight_R_upper_; }
    [[nodiscard]] double alpha_a() const { return alpha_a_; }
    [[nodiscard]] double alpha_b() const { return alpha_b_; }
    //! Points in R (resp. r at fixed R) where the envelopes have kinks.
    [[nodiscard]] std::vector<double> R_breaks() const;
    [[nodiscard]] std::vector<double> r_breaks(double R) const;

    //! Full kernel value for an ordered pair and collision parameters.
    [[nodiscard]] double eval(const ParticleState& a, const ParticleState& b,
                              const CollisionParams& params, const MixtureSpec& mix) const;

  private:
    PairKernelSpec spec_;
    InteractionClass cls_;
    double gamma_ = 0.0;
    double mass_ratio_ = 1.0;  //!< 2m / mu
    double alpha_a_ = 0.0, alpha_b_ = 0.0;
    double weight_R_upper_ = 0.0;
    double total_mass_ = 1.0;
    int dim_ = 3;

    [[nodiscard]] double envelope(const PartitionSpec& p, double r, double R, bool upper) const;
};

/// Kernels for every ordered species pair.
class KernelSpec {
  public:
    /// `pairs[i][j]` in normalized species order; must be symmetric in the
    /// angular part. Throws ConfigError otherwise.
    static KernelSpec create(const MixtureSpec& mix,
                             const std::vector<std::vector<PairKernelSpec>>& pairs);
    static KernelSpec uniform(const MixtureSpec& mix, const PairKernelSpec& spec);

    [[nodiscard]] const PairKernel& pair(int i, int j) const { return pairs_[i * n_ + j]; }
    [[nodiscard]] int size() const { return n_; }

  private:
    std::vector<PairKernel> pairs_;
    int n_ = 0;
};

/// P x P table of doubles, row-major.
struct Matrix {
    int n = 0;
    std::vector<double> data;
    explicit Matrix(int size = 0) : n{size}, data(static_cast<std::size_t>(size * size), 0.0) {}
    double& operator()(int i, int j) { return data[i * n + j]; }
    double operator()(int i, int j) const { return data[i * n + j]; }
    [[nodiscard]] double max() const;
};

struct KernelConstants {
    Matrix kappa_lb;
    Matrix kappa_ub;
    Matrix L;
    Matrix rho_ub;
    Matrix rho_lb;
    Matrix angular_norm;

    [[nodiscard]] double max_kappa_ub() const { return kappa_ub.max(); }
};

/// (s_bar/2)^(gamma/2) min(1, 2^(1-gamma)).
double lower_bound_constant(double s_bar, double gamma);

KernelConstants compute_kappas(const KernelSpec& spec, const MixtureSpec& mix,
                               double quadrature_tol = 1e-10);

/// Distribution used to draw test states: Gaussian velocities whose scale is
/// itself log-uniform so both slow and very fast particles occur.
ParticleState random_test_state(Rng& rng, int species, const MixtureSpec& mix);
CollisionParams random_test_params(Rng& rng, const MixtureSpec& mix);

/// Both sides of the energy-kernel sandwich against bracket powers, per pair.
std::vector<CheckResult> kernel_bounds_check(const KernelSpec& spec, const MixtureSpec& mix,
                                             long n_samples, std::uint64_t seed);
/// Product bounds relating pair energy and pre/post brackets, per class.
std::vector<CheckResult> bracket_upper_bounds_check(const MixtureSpec& mix, long n_samples,
                                                    std::uint64_t seed);
/// Sandwich of the sum-form kernel between its min/max envelopes.
std::vector<CheckResult> model23_envelope_check(const MixtureSpec& mix, long n_samples,
                                                std::uint64_t seed);

}  // namespace polymix
