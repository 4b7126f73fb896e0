#pragma once

#include <span>
#include <string>
#include <vector>

#include "polymix/vec.hpp"

namespace polymix {

enum class SpeciesKind { monatomic, polyatomic };

struct SpeciesSpec {
    std::string name;
    double mass = 1.0;
    SpeciesKind kind = SpeciesKind::monatomic;
    //! Internal-energy exponent; only meaningful for polyatomic species.
    double alpha = 0.0;

    [[nodiscard]] bool is_poly() const { return kind == SpeciesKind::polyatomic; }
};

/// The four ordered interaction classes (first particle, second particle).
enum class InteractionClass { mono_mono, poly_poly, poly_mono, mono_poly };

const char* to_string(InteractionClass c);

/// Species list, dimension and rate matrix of a gas mixture.
///
/// Species are stored monatomic block first. The permutation from the
/// caller's ordering is kept so reports can refer back to input indices.
class MixtureSpec {
  public:
    /// Validate and normalize. `gamma` is indexed in the caller's species
    /// order. Throws ConfigError naming the violated invariant.
    static MixtureSpec create(std::vector<SpeciesSpec> species, int dim,
                              const std::vector<std::vector<double>>& gamma);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int size() const { return static_cast<int>(species_.size()); }
    [[nodiscard]] int n_mono() const { return n_mono_; }
    [[nodiscard]] const SpeciesSpec& species(int i) const { return species_[i]; }
    [[nodiscard]] double mass(int i) const { return species_[i].mass; }
    [[nodiscard]] bool is_poly(int i) const { return species_[i].is_poly(); }
    [[nodiscard]] double alpha(int i) const { return species_[i].alpha; }

    //! Sum of all species masses.
    [[nodiscard]] double total_mass() const { return total_mass_; }

    [[nodiscard]] double gamma(int i, int j) const { return gamma_[i * size() + j]; }
    //! max_j gamma_ij for row i.
    [[nodiscard]] double gamma_row_max(int i) const { return row_max_[i]; }
    //! Smallest row maximum.
    [[nodiscard]] double gamma_low() const { return gamma_low_; }
    //! Largest row maximum.
    [[nodiscard]] double gamma_high() const { return gamma_high_; }

    [[nodiscard]] InteractionClass classify(int i, int j) const;

    //! input_index(i) is the caller's index of normalized species i.
    [[nodiscard]] int input_index(int i) const { return input_order_[i]; }
    [[nodiscard]] int normalized_index(int input_index) const;
    [[nodiscard]] std::span<const int> input_order() const { return input_order_; }

  private:
    MixtureSpec() = default;

    std::vector<SpeciesSpec> species_;
    std::vector<double> gamma_;
    std::vector<double> row_max_;
    std::vector<int> input_order_;
    double total_mass_ = 0.0;
    double gamma_low_ = 0.0;
    double gamma_high_ = 0.0;
    int dim_ = 3;
    int n_mono_ = 0;
};

/// Velocity and internal energy of one particle. `internal` is kept at 0
/// for monatomic species.
struct ParticleState {
    Vec v;
    double internal = 0.0;
    int species = 0;
};

/// Throws ConfigError when the state is inconsistent with its species.
void validate_state(const ParticleState& s, const MixtureSpec& mix);

/// Squared Lebesgue bracket 1 + m_i|v|^2/(2m) + I/m.
double bracket_sq(const ParticleState& s, const MixtureSpec& mix);
inline double bracket(const ParticleState& s, const MixtureSpec& mix);

/// Center-of-mass description of an ordered pair (a, b).
///
/// `V` is the true center of mass of the pair, `W` the center with the two
/// masses interchanged, `u = v_a - v_b`. `energy` is the pair energy in the
/// center-of-mass frame, mu|u|^2/2 plus the internal energies present.
struct PairFrame {
    Vec V;
    Vec W;
    Vec u;
    double mass_a = 0.0;
    double mass_b = 0.0;
    double mu = 0.0;
    double s = 0.5;      //!< m_a / (m_a + m_b)
    double s_bar = 0.5;  //!< min(s, 1 - s)
    double energy = 0.0;
    InteractionClass cls = InteractionClass::mono_mono;
};

PairFrame pair_frame(const ParticleState& a, const ParticleState& b, const MixtureSpec& mix);

/// Sum of squared brackets of the two particles.
double pair_bracket_energy(const ParticleState& a, const ParticleState& b,
                           const MixtureSpec& mix);

/// The same quantity from center-of-mass variables:
/// 2 + (m_a + m_b)|V|^2/(2m) + E/m.
double pair_bracket_energy(const PairFrame& f, const MixtureSpec& mix);

inline double bracket(const ParticleState& s, const MixtureSpec& mix)
{
    return std::sqrt(bracket_sq(s, mix));
}

}  // namespace polymix
