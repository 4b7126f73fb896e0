#pragma once

#include <utility>

#include "polymix/mixture.hpp"

namespace polymix {

/// Scattering direction and energy-exchange fractions.
///
/// `R` is the kinetic share of the pair energy, `r` splits the internal share
/// between two polyatomic partners. Classes that do not use a field ignore it.
struct CollisionParams {
    Vec sigma;
    double r = 0.5;
    double R = 1.0;
};

enum class CollisionStatus {
    collided,
    //! Zero relative speed (mono-mono) or zero pair energy: nothing happens.
    null_collision,
};

struct CollisionOutcome {
    CollisionStatus status = CollisionStatus::null_collision;
    ParticleState a_out;
    ParticleState b_out;
    //! Parameters that map the outputs back onto the inputs.
    CollisionParams primed;

    [[nodiscard]] bool is_null() const { return status == CollisionStatus::null_collision; }
};

CollisionOutcome collide_mono_mono(const ParticleState& a, const ParticleState& b,
                                   const Vec& sigma, const MixtureSpec& mix);
CollisionOutcome collide_poly_poly(const ParticleState& a, const ParticleState& b,
                                   const CollisionParams& params, const MixtureSpec& mix);
CollisionOutcome collide_poly_mono(const ParticleState& a_poly, const ParticleState& b_mono,
                                   const Vec& sigma, double R, const MixtureSpec& mix);
CollisionOutcome collide_mono_poly(const ParticleState& a_mono, const ParticleState& b_poly,
                                   const Vec& sigma, double R, const MixtureSpec& mix);

/// Dispatch on the class of (a, b).
CollisionOutcome collide(const ParticleState& a, const ParticleState& b,
                         const CollisionParams& params, const MixtureSpec& mix);

/// Jacobian of the collision transformation with respect to the invariant
/// measure coordinates, in dimension `dim`.
///
/// In three dimensions this is (1-R)sqrt(R)/((1-R')sqrt(R')) for poly-poly,
/// sqrt(R)/sqrt(R') for the mixed classes and 1 for mono-mono; the general
/// form replaces sqrt by the power (dim-2)/2.
/// Throws DegenerateParametrization when R' sits on a singular boundary.
double jacobian(const CollisionParams& in, const CollisionParams& primed, InteractionClass cls,
                int dim = 3);

/// Convex decomposition of the pair bracket energy used to bound the
/// post-collision brackets.
struct EnergySplit {
    InteractionClass cls = InteractionClass::mono_mono;
    double total = 0.0;        //!< sum of squared brackets
    double theta = 0.0;        //!< center-of-mass fraction of `total`
    double sigma_split = 1.0;  //!< kinetic fraction of the relative part
    double s = 0.5;
    double s_bar = 0.5;
    double p = 0.5, q = 0.5;                   //!< mono-mono pair
    double p_t = 0.5, q_t = 0.5, t_t = 0.0;    //!< triple for classes with R
    double lambda = 0.0;
    double cos_center = 0.0;   //!< unit(V) . sigma, 0 when V = 0
    double internal_share_a = 0.0;  //!< fraction of t_t landing on particle a
    bool zero_center_velocity = false;
};

EnergySplit energy_split(const ParticleState& a, const ParticleState& b,
                         const CollisionParams& params, const MixtureSpec& mix);

/// Post-collision squared brackets rebuilt from the split alone.
std::pair<double, double> reconstructed_primed_brackets(const EnergySplit& split);

/// Upper bounds on the post-collision squared brackets (a, b).
std::pair<double, double> primed_bracket_bound(const EnergySplit& split,
                                               const CollisionParams& params);

}  // namespace polymix
