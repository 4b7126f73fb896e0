#pragma once

// Reference computations kept apart from the production code paths. Tests and
// the verification drivers compare the library against these.

#include <functional>
#include <vector>

#include "polymix/kinematics.hpp"

namespace polymix::oracle {

/// |det| of the central-difference Jacobian of the full collision map
/// (velocities, internal energies, sigma, r, R) -> primed counterparts.
/// sigma is handled in tangent-plane charts around the input and output
/// directions, so the determinant is relative to surface measure.
double fd_jacobian(const ParticleState& a, const ParticleState& b, const CollisionParams& p,
                   const MixtureSpec& mix, double rel_step = 1e-6);

/// Euler Beta function B(a, b).
double beta_function(double a, double b);

/// Classical RK4 for a scalar ODE y' = f(y), reporting y at each grid time.
/// Each grid interval is split into substeps no longer than max_step(y).
std::vector<double> rk4_scalar(const std::function<double(double)>& f, double y0,
                               const std::vector<double>& times,
                               const std::function<double(double)>& max_step);

/// Closed form of the mean of <v>^2 for a Maxwellian with temperature T and
/// Gamma(alpha+1, T) internal energies: 1 + d T/(2m) + (alpha+1) T/m.
double maxwellian_bracket_sq_mean(double temperature, int dim, double total_mass,
                                  bool polyatomic, double alpha);

}  // namespace polymix::oracle
