#pragma once

#include <cmath>
#include <vector>

#include "polymix/mixture.hpp"

namespace polymix::test {

/// Two monatomic species (masses 1, 2) and one polyatomic (mass 3, alpha 1).
inline MixtureSpec default_mixture(int dim = 3)
{
    return MixtureSpec::create({{"A", 1.0, SpeciesKind::monatomic, 0.0},
                                {"B", 2.0, SpeciesKind::monatomic, 0.0},
                                {"C", 3.0, SpeciesKind::polyatomic, 1.0}},
                               dim, {{1, 0, 1}, {0, 2, 1}, {1, 1, 1}});
}

/// Single-species mixture of the given kind.
inline MixtureSpec single_species(double mass, bool poly, double alpha = 0.0, double gamma = 1.0,
                                  int dim = 3)
{
    return MixtureSpec::create(
        {{"X", mass, poly ? SpeciesKind::polyatomic : SpeciesKind::monatomic, alpha}}, dim,
        {{gamma}});
}

/// Two species of equal mass, either kind.
inline MixtureSpec pair_mixture(double ma, bool poly_a, double mb, bool poly_b,
                                double alpha_a = 0.0, double alpha_b = 0.0, double gamma = 1.0,
                                int dim = 3)
{
    return MixtureSpec::create(
        {{"P", ma, poly_a ? SpeciesKind::polyatomic : SpeciesKind::monatomic, alpha_a},
         {"Q", mb, poly_b ? SpeciesKind::polyatomic : SpeciesKind::monatomic, alpha_b}},
        dim, {{gamma, gamma}, {gamma, gamma}});
}

inline double rel_diff(double a, double b)
{
    const double s = std::max(std::fabs(a), std::fabs(b));
    return s == 0.0 ? 0.0 : std::fabs(a - b) / s;
}

inline ParticleState state(Vec v, double internal, int species)
{
    return {std::move(v), internal, species};
}

}  // namespace polymix::test
