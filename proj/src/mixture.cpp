#include "polymix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "polymix/errors.hpp"

namespace polymix {

const char* to_string(InteractionClass c)
{
    switch (c) {
    case InteractionClass::mono_mono: return "mono-mono";
    case InteractionClass::poly_poly: return "poly-poly";
    case InteractionClass::poly_mono: return "poly-mono";
    case InteractionClass::mono_poly: return "mono-poly";
    }
    return "?";
}

MixtureSpec MixtureSpec::create(std::vector<SpeciesSpec> species, int dim,
                                const std::vector<std::vector<double>>& gamma)
{
    const auto n = static_cast<int>(species.size());
    if (n == 0)
        throw ConfigError("mixture needs at least one species");
    if (dim < 2 || dim > kMaxDim) {
        std::ostringstream os;
        os << "dimension must lie in [2, " << kMaxDim << "], got " << dim;
        throw ConfigError(os.str());
    }
    for (int i = 0; i < n; ++i) {
        const auto& sp = species[i];
        if (!(sp.mass > 0.0) || !std::isfinite(sp.mass)) {
            std::ostringstream os;
            os << "species " << i + 1 << " ('" << sp.name << "'): mass must be positive";
            throw ConfigError(os.str());
        }
        if (sp.is_poly() && !(sp.alpha > -1.0)) {
            std::ostringstream os;
            os << "species " << i + 1 << " ('" << sp.name
               << "'): polyatomic internal-energy exponent alpha must exceed -1";
            throw ConfigError(os.str());
        }
    }
    if (static_cast<int>(gamma.size()) != n)
        throw ConfigError("rate matrix gamma must be P x P with P = number of species");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(gamma[i].size()) != n)
            throw ConfigError("rate matrix gamma must be P x P with P = number of species");
        for (int j = 0; j < n; ++j) {
            double g = gamma[i][j];
            if (!(g >= 0.0 && g <= 2.0)) {
                std::ostringstream os;
                os << "rate gamma[" << i + 1 << "][" << j + 1 << "] = " << g
                   << " outside [0, 2]";
                throw ConfigError(os.str());
            }
            if (g != gamma[j][i]) {
                std::ostringstream os;
                os << "rate matrix not symmetric: gamma[" << i + 1 << "][" << j + 1
                   << "] != gamma[" << j + 1 << "][" << i + 1 << "]";
                throw ConfigError(os.str());
            }
        }
        double row = *std::max_element(gamma[i].begin(), gamma[i].end());
        if (!(row > 0.0)) {
            std::ostringstream os;
            os << "rate matrix row " << i + 1 << " ('" << species[i].name
               << "') has max_j gamma_ij = 0; every row needs a positive rate";
            throw ConfigError(os.str());
        }
    }

    MixtureSpec mix;
    mix.dim_ = dim;
    mix.input_order_.resize(n);
    std::iota(mix.input_order_.begin(), mix.input_order_.end(), 0);
    std::stable_partition(mix.input_order_.begin(), mix.input_order_.end(),
                          [&](int k) { return !species[k].is_poly(); });
    for (int k : mix.input_order_) {
        auto sp = species[k];
        if (!sp.is_poly())
            sp.alpha = 0.0;
        mix.species_.push_back(sp);
    }
    mix.n_mono_ = static_cast<int>(
        std::count_if(species.begin(), species.end(), [](auto& s) { return !s.is_poly(); }));
    mix.gamma_.resize(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            mix.gamma_[i * n + j] = gamma[mix.input_order_[i]][mix.input_order_[j]];
    mix.row_max_.resize(n);
    for (int i = 0; i < n; ++i) {
        double r = 0.0;
        for (int j = 0; j < n; ++j)
            r = std::max(r, mix.gamma(i, j));
        mix.row_max_[i] = r;
    }
    mix.gamma_low_ = *std::min_element(mix.row_max_.begin(), mix.row_max_.end());
    mix.gamma_high_ = *std::max_element(mix.row_max_.begin(), mix.row_max_.end());
    mix.total_mass_ = 0.0;
    for (auto& sp : mix.species_)
        mix.total_mass_ += sp.mass;
    return mix;
}

InteractionClass MixtureSpec::classify(int i, int j) const
{
    bool pi = is_poly(i), pj = is_poly(j);
    if (pi && pj)
        return InteractionClass::poly_poly;
    if (pi)
        return InteractionClass::poly_mono;
    if (pj)
        return InteractionClass::mono_poly;
    return InteractionClass::mono_mono;
}

int MixtureSpec::normalized_index(int input_index) const
{
    for (int i = 0; i < size(); ++i)
        if (input_order_[i] == input_index)
            return i;
    throw ConfigError("species index out of range");
}

void validate_state(const ParticleState& s, const MixtureSpec& mix)
{
    if (s.species < 0 || s.species >= mix.size())
        throw ConfigError("particle refers to an unknown species");
    if (s.v.dim() != mix.dim())
        throw ConfigError("particle velocity has the wrong dimension");
    for (double x : s.v.values())
        if (!std::isfinite(x))
            throw ConfigError("particle velocity is not finite");
    if (!(s.internal >= 0.0) || !std::isfinite(s.internal))
        throw ConfigError("internal energy must be finite and nonnegative");
    if (!mix.is_poly(s.species) && s.internal != 0.0)
        throw ConfigError("monatomic particle with nonzero internal energy");
}

double bracket_sq(const ParticleState& s, const MixtureSpec& mix)
{
    const double m = mix.total_mass();
    return 1.0 + mix.mass(s.species) * norm_sq(s.v) / (2.0 * m) + s.internal / m;
}

PairFrame pair_frame(const ParticleState& a, const ParticleState& b, const MixtureSpec& mix)
{
    PairFrame f;
    f.cls = mix.classify(a.species, b.species);
    f.mass_a = mix.mass(a.species);
    f.mass_b = mix.mass(b.species);
    const double M = f.mass_a + f.mass_b;
    f.s = f.mass_a / M;
    f.s_bar = std::min(f.s, 1.0 - f.s);
    f.mu = f.mass_a * f.mass_b / M;
    const int d = a.v.dim();
    f.V = Vec(d);
    f.W = Vec(d);
    f.u = Vec(d);
    double u2 = 0.0;
    for (int k = 0; k < d; ++k) {
        const double x = a.v[k], y = b.v[k];
        f.V[k] = f.s * x + (1.0 - f.s) * y;
        f.W[k] = (1.0 - f.s) * x + f.s * y;
        f.u[k] = x - y;
        u2 += f.u[k] * f.u[k];
    }
    f.energy = 0.5 * f.mu * u2 + a.internal + b.internal;
    return f;
}

double pair_bracket_energy(const ParticleState& a, const ParticleState& b,
                           const MixtureSpec& mix)
{
    return bracket_sq(a, mix) + bracket_sq(b, mix);
}

double pair_bracket_energy(const PairFrame& f, const MixtureSpec& mix)
{
    const double m = mix.total_mass();
    return 2.0 + (f.mass_a + f.mass_b) * norm_sq(f.V) / (2.0 * m) + f.energy / m;
}

}  // namespace polymix
