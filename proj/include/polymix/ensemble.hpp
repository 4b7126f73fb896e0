#pragma once

#include <cstddef>
#include <vector>

#include "polymix/mixture.hpp"

namespace polymix {

/// Weighted particle representation of a mixture: each species carries its
/// own particle list and a common statistical weight.
struct Ensemble {
    std::vector<std::vector<ParticleState>> particles;  //!< [species][n]
    std::vector<double> weight;                         //!< per species

    explicit Ensemble(int n_species = 0)
        : particles(static_cast<std::size_t>(n_species)), weight(static_cast<std::size_t>(n_species), 1.0)
    {
    }

    [[nodiscard]] int n_species() const { return static_cast<int>(particles.size()); }
    [[nodiscard]] std::size_t count(int i) const { return particles[i].size(); }
    [[nodiscard]] std::size_t total_count() const
    {
        std::size_t n = 0;
        for (const auto& p : particles)
            n += p.size();
        return n;
    }
};

}  // namespace polymix
