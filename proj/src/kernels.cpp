#include "polymix/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polymix/errors.hpp"

namespace polymix {

AngularKernel AngularKernel::normalized_isotropic(int dim)
{
    return isotropic(1.0 / quad::sphere_area(dim - 1));
}

AngularKernel AngularKernel::power(double coefficient, double exponent, double cutoff)
{
    AngularKernel k;
    k.type = Type::power;
    k.coefficient = coefficient;
    k.exponent = exponent;
    k.cutoff = cutoff;
    return k;
}

double AngularKernel::operator()(double x) const
{
    if (type == Type::isotropic)
        return value;
    if (x > cutoff)
        return 0.0;
    return coefficient * std::pow(std::max(0.0, 1.0 - x), exponent);
}

std::vector<double> AngularKernel::breaks() const
{
    if (type == Type::power && cutoff > -1.0 && cutoff < 1.0)
        return {cutoff};
    return {};
}

int AngularKernel::theta_power(int dim) const
{
    if (type != Type::power || cutoff < 1.0)
        return 1;
    // Near theta = 0 the sphere integrand behaves like theta^(2 e + dim - 2).
    const double p = 2.0 * exponent + dim - 2;
    return p > -1.0 ? quad::endpoint_power(p) : 1;
}

double AngularKernel::l1_norm(int dim, const quad::Options& opt) const
{
    if (type == Type::isotropic)
        return value * quad::sphere_area(dim - 1);
    const double p = 2.0 * exponent + dim - 2;
    if (cutoff >= 1.0 && !(p > -1.0))
        throw QuadratureError("angular kernel is not integrable over the sphere: "
                              "(1 - cos theta)^exponent with cutoff 1 needs exponent > -(d-1)/2");
    auto br = breaks();
    try {
        return quad::integrate_sphere_axial(*this, dim, opt, br, theta_power(dim)).value;
    }
    catch (const QuadratureError&) {
        throw QuadratureError("angular kernel is not integrable over the sphere "
                              "(quadrature did not converge)");
    }
}

double weight_di(double R, double alpha, int dim)
{
    return std::pow(1.0 - R, alpha) * std::pow(R, (dim - 2) / 2.0);
}

double weight_dij(double r, double R, double alpha_i, double alpha_j, int dim)
{
    return std::pow(r, alpha_i) * std::pow(1.0 - r, alpha_j)
           * std::pow(1.0 - R, alpha_i + alpha_j + 1.0) * std::pow(R, (dim - 2) / 2.0);
}

double energy_kernel(double pair_energy, double gamma, const MixtureSpec& mix)
{
    if (gamma == 0.0)
        return 1.0;
    return std::pow(pair_energy / mix.total_mass(), 0.5 * gamma);
}

PairKernel::PairKernel(const PairKernelSpec& spec, int i, int j, const MixtureSpec& mix)
    : spec_{spec}, cls_{mix.classify(i, j)}, gamma_{mix.gamma(i, j)}, dim_{mix.dim()}
{
    const double mi = mix.mass(i), mj = mix.mass(j);
    const double mu = mi * mj / (mi + mj);
    total_mass_ = mix.total_mass();
    mass_ratio_ = 2.0 * total_mass_ / mu;
    alpha_a_ = mix.alpha(i);
    alpha_b_ = mix.alpha(j);
    switch (cls_) {
    case InteractionClass::poly_poly: weight_R_upper_ = alpha_a_ + alpha_b_ + 1.0; break;
    case InteractionClass::poly_mono: weight_R_upper_ = alpha_a_; break;
    case InteractionClass::mono_poly: weight_R_upper_ = alpha_b_; break;
    case InteractionClass::mono_mono: weight_R_upper_ = 0.0; break;
    }
}

double PairKernel::envelope(const PartitionSpec& p, double r, double R, bool upper) const
{
    if (p.type == PartitionType::constant || cls_ == InteractionClass::mono_mono)
        return p.type == PartitionType::constant ? p.value : 1.0;
    const double g2 = 0.5 * gamma_;
    const double kin = mass_ratio_ * R;
    if (cls_ == InteractionClass::poly_poly) {
        const double x = r * (1.0 - R), y = (1.0 - r) * (1.0 - R);
        if (upper)
            return std::pow(3.0, 1.0 - g2) * std::pow(std::max({kin, x, y}), g2);
        return std::pow(std::min({kin, x, y}), g2);
    }
    const double x = 1.0 - R;
    if (upper)
        return std::pow(2.0, 1.0 - g2) * std::pow(std::max(kin, x), g2);
    return std::pow(std::min(kin, x), g2);
}

double PairKernel::partition_lb(double r, double R) const
{
    return envelope(spec_.lower, r, R, false);
}

double PairKernel::partition_ub(double r, double R) const
{
    return envelope(spec_.upper, r, R, true);
}

double PairKernel::partition_ub_sup() const
{
    const auto& p = spec_.upper;
    if (p.type == PartitionType::constant)
        return p.value;
    if (cls_ == InteractionClass::mono_mono)
        return 1.0;
    const double g2 = 0.5 * gamma_;
    const double base = cls_ == InteractionClass::poly_poly ? 3.0 : 2.0;
    return std::pow(base, 1.0 - g2) * std::pow(std::max(mass_ratio_, 1.0), g2);
}

double PairKernel::weight(double r, double R) const
{
    switch (cls_) {
    case InteractionClass::mono_mono: return 1.0;
    case InteractionClass::poly_poly: return weight_dij(r, R, alpha_a_, alpha_b_, dim_);
    case InteractionClass::poly_mono: return weight_di(R, alpha_a_, dim_);
    case InteractionClass::mono_poly: return weight_di(R, alpha_b_, dim_);
    }
    return 0.0;
}

std::vector<double> PairKernel::R_breaks() const
{
    if (cls_ == InteractionClass::mono_mono)
        return {};
    bool kinks = spec_.lower.type == PartitionType::model23
                 || spec_.upper.type == PartitionType::model23;
    if (!kinks)
        return {};
    // kinetic envelope c R meets (1 - R), and for poly-poly also (1 - R)/2
    std::vector<double> b{1.0 / (1.0 + mass_ratio_)};
    if (cls_ == InteractionClass::poly_poly)
        b.push_back(1.0 / (1.0 + 2.0 * mass_ratio_));
    return b;
}

std::vector<double> PairKernel::r_breaks(double R) const
{
    if (cls_ != InteractionClass::poly_poly)
        return {};
    bool kinks = spec_.lower.type == PartitionType::model23
                 || spec_.upper.type == PartitionType::model23;
    if (!kinks || R >= 1.0)
        return {};
    const double c = mass_ratio_ * R / (1.0 - R);
    std::vector<double> b{0.5};
    if (c > 0.0 && c < 1.0) {
        b.push_back(c);
        b.push_back(1.0 - c);
    }
    return b;
}

double PairKernel::eval(const ParticleState& a, const ParticleState& b,
                        const CollisionParams& params, const MixtureSpec& mix) const
{
    const PairFrame f = pair_frame(a, b, mix);
    const double un = norm(f.u);
    const double x = un > 0.0 ? dot(f.u, params.sigma) / un : 1.0;
    const double ang = spec_.angular(x);
    if (spec_.form == KernelForm::product || cls_ == InteractionClass::mono_mono) {
        const double part = partition_ub(params.r, params.R);
        return ang * part * energy_kernel(f.energy, gamma_, mix);
    }
    const double g2 = 0.5 * gamma_;
    const double m = mix.total_mass();
    const double R = params.R;
    auto pw = [g2](double z) { return g2 == 0.0 ? 1.0 : std::pow(z, g2); };
    double sum = pw(R * un * un);
    switch (cls_) {
    case InteractionClass::poly_poly:
        sum += pw(params.r * (1.0 - R) * a.internal / m)
               + pw((1.0 - params.r) * (1.0 - R) * b.internal / m);
        break;
    case InteractionClass::poly_mono: sum += pw((1.0 - R) * a.internal / m); break;
    case InteractionClass::mono_poly: sum += pw((1.0 - R) * b.internal / m); break;
    case InteractionClass::mono_mono: break;
    }
    return ang * sum;
}

namespace {

std::string pair_label(int i, int j, const MixtureSpec& mix)
{
    return "(" + mix.species(i).name + "," + mix.species(j).name + ")";
}

bool same(const AngularKernel& x, const AngularKernel& y)
{
    return x.type == y.type && x.value == y.value && x.coefficient == y.coefficient
           && x.exponent == y.exponent && x.cutoff == y.cutoff;
}

void validate_pair(const PairKernelSpec& s, const std::string& label)
{
    const auto& a = s.angular;
    if (a.type == AngularKernel::Type::isotropic && !(a.value > 0.0))
        throw ConfigError("kernel " + label + ": isotropic angular value must be positive");
    if (a.type == AngularKernel::Type::power) {
        if (!(a.coefficient > 0.0))
            throw ConfigError("kernel " + label + ": power-law coefficient must be positive");
        if (!(a.cutoff > -1.0 && a.cutoff <= 1.0))
            throw ConfigError("kernel " + label + ": angular cutoff must lie in (-1, 1]");
    }
    for (const auto* p : {&s.lower, &s.upper})
        if (p->type == PartitionType::constant && !(p->value > 0.0))
            throw ConfigError("kernel " + label + ": constant partition bound must be positive");
    if (s.lower.type == PartitionType::constant && s.upper.type == PartitionType::constant
        && s.lower.value > s.upper.value)
        throw ConfigError("kernel " + label + ": partition lower bound exceeds upper bound");
    if (s.form == KernelForm::model23
        && (s.lower.type != PartitionType::model23 || s.upper.type != PartitionType::model23))
        throw ConfigError("kernel " + label
                          + ": sum-form kernel requires the model23 partition envelopes");
    if (s.lower.type != s.upper.type)
        throw ConfigError("kernel " + label
                          + ": lower and upper partition bounds must have the same type");
}

}  // namespace

KernelSpec KernelSpec::create(const MixtureSpec& mix,
                              const std::vector<std::vector<PairKernelSpec>>& pairs)
{
    const int n = mix.size();
    if (static_cast<int>(pairs.size()) != n)
        throw ConfigError("kernel table must be P x P");
    KernelSpec ks;
    ks.n_ = n;
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(pairs[i].size()) != n)
            throw ConfigError("kernel table must be P x P");
        for (int j = 0; j < n; ++j) {
            const auto& s = pairs[i][j];
            validate_pair(s, pair_label(i, j, mix));
            const auto& t = pairs[j][i];
            if (!same(s.angular, t.angular) || s.form != t.form)
                throw ConfigError("kernel " + pair_label(i, j, mix)
                                  + ": angular part must be symmetric under species exchange");
            ks.pairs_.emplace_back(s, i, j, mix);
        }
    }
    return ks;
}

KernelSpec KernelSpec::uniform(const MixtureSpec& mix, const PairKernelSpec& spec)
{
    std::vector<std::vector<PairKernelSpec>> t(
        mix.size(), std::vector<PairKernelSpec>(mix.size(), spec));
    return create(mix, t);
}

double Matrix::max() const
{
    return data.empty() ? 0.0 : *std::max_element(data.begin(), data.end());
}

double lower_bound_constant(double s_bar, double gamma)
{
    return std::pow(0.5 * s_bar, 0.5 * gamma) * std::min(1.0, std::pow(2.0, 1.0 - gamma));
}

namespace {

// Integral of a partition envelope against the class weight.
double parameter_integral(const PairKernel& k, bool upper, const quad::Options& opt)
{
    auto env = [&](double r, double R) {
        return upper ? k.partition_ub(r, R) : k.partition_lb(r, R);
    };
    switch (k.cls()) {
    case InteractionClass::mono_mono: return 1.0;
    case InteractionClass::poly_mono:
    case InteractionClass::mono_poly: {
        auto br = k.R_breaks();
        return quad::integrate_beta([&](double R) { return env(0.5, R); }, k.weight_R_lower(),
                                    k.weight_R_upper(), opt, br)
            .value;
    }
    case InteractionClass::poly_poly: {
        quad::Options inner = opt;
        inner.abs_tol = 0.1 * opt.abs_tol;
        auto outer = [&](double R) {
            auto br = k.r_breaks(R);
            return quad::integrate_beta([&](double r) { return env(r, R); }, k.alpha_a(),
                                        k.alpha_b(), inner, br)
                .value;
        };
        auto br = k.R_breaks();
        return quad::integrate_beta(outer, k.weight_R_lower(), k.weight_R_upper(), opt, br)
            .value;
    }
    }
    return 0.0;
}

}  // namespace

KernelConstants compute_kappas(const KernelSpec& spec, const MixtureSpec& mix,
                               double quadrature_tol)
{
    const int n = mix.size();
    KernelConstants kc{Matrix(n), Matrix(n), Matrix(n), Matrix(n), Matrix(n), Matrix(n)};
    quad::Options opt;
    opt.abs_tol = quadrature_tol;
    opt.rel_tol = quadrature_tol;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const auto& k = spec.pair(i, j);
            const double b = k.angular().l1_norm(mix.dim(), opt);
            kc.angular_norm(i, j) = b;
            kc.rho_ub(i, j) = parameter_integral(k, true, opt);
            kc.rho_lb(i, j) = parameter_integral(k, false, opt);
            kc.kappa_ub(i, j) = b * kc.rho_ub(i, j);
            kc.kappa_lb(i, j) = b * kc.rho_lb(i, j);
            const double mi = mix.mass(i), mj = mix.mass(j);
            const double s_bar = std::min(mi, mj) / (mi + mj);
            kc.L(i, j) = lower_bound_constant(s_bar, mix.gamma(i, j));
        }
    return kc;
}

ParticleState random_test_state(Rng& rng, int species, const MixtureSpec& mix)
{
    ParticleState s;
    s.species = species;
    const double scale = log_uniform(rng, 1e-2, 1e2);
    s.v = normal_vec(rng, mix.dim(), scale);
    if (mix.is_poly(species))
        s.internal = mix.total_mass() * log_uniform(rng, 1e-4, 1e4) * uniform01(rng);
    return s;
}

CollisionParams random_test_params(Rng& rng, const MixtureSpec& mix)
{
    return {uniform_sphere(rng, mix.dim()), uniform01(rng), uniform01(rng)};
}

std::vector<CheckResult> kernel_bounds_check(const KernelSpec& spec, const MixtureSpec& mix,
                                             long n_samples, std::uint64_t seed)
{
    std::vector<CheckResult> out;
    const int n = mix.size();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Rng rng = make_stream(seed, static_cast<std::uint64_t>(i * n + j));
            const double gamma = spec.pair(i, j).gamma();
            const double mi = mix.mass(i), mj = mix.mass(j);
            const double L = lower_bound_constant(std::min(mi, mj) / (mi + mj), gamma);
            double worst_low = -INFINITY, worst_high = -INFINITY;
            for (long s = 0; s < n_samples; ++s) {
                auto a = random_test_state(rng, i, mix);
                auto b = random_test_state(rng, j, mix);
                const double Bt = energy_kernel(pair_frame(a, b, mix).energy, gamma, mix);
                const double ga = std::pow(bracket(a, mix), gamma);
                const double gb = std::pow(bracket(b, mix), gamma);
                const double scale = ga + gb;
                // lower bound in both orientations
                worst_low = std::max(worst_low, (L * ga - gb - Bt) / scale);
                worst_low = std::max(worst_low, (L * gb - ga - Bt) / scale);
                worst_high = std::max(worst_high, (Bt - ga - gb) / scale);
            }
            const std::string label = pair_label(i, j, mix) + " "
                                      + to_string(mix.classify(i, j));
            out.push_back(check_le("energy kernel lower bound " + label, worst_low, 1e-12,
                                   n_samples, "max (L<a>^g - <b>^g - B)/(<a>^g + <b>^g)"));
            out.push_back(check_le("energy kernel upper bound " + label, worst_high, 1e-12,
                                   n_samples, "max (B - <a>^g - <b>^g)/(<a>^g + <b>^g)"));
        }
    return out;
}

std::vector<CheckResult> bracket_upper_bounds_check(const MixtureSpec& mix, long n_samples,
                                                    std::uint64_t seed)
{
    std::vector<CheckResult> out;
    const int n = mix.size();
    const double m = mix.total_mass();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rng rng = make_stream(seed, static_cast<std::uint64_t>(1000 + i * n + j));
            double worst_energy = -INFINITY, worst_pre = -INFINITY;
            for (long s = 0; s < n_samples; ++s) {
                auto a = random_test_state(rng, i, mix);
                auto b = random_test_state(rng, j, mix);
                auto p = random_test_params(rng, mix);
                const double ba2 = bracket_sq(a, mix), bb2 = bracket_sq(b, mix);
                const double e = pair_frame(a, b, mix).energy / m;
                worst_energy = std::max(worst_energy, (e - ba2 * bb2) / (ba2 * bb2));
                auto o = collide(a, b, p, mix);
                if (o.is_null())
                    continue;
                const double prod = bracket(o.a_out, mix) * bracket(o.b_out, mix);
                const double pre = std::max(std::sqrt(ba2), std::sqrt(bb2));
                worst_pre = std::max(worst_pre, (pre - prod) / prod);
            }
            const std::string label = pair_label(i, j, mix) + " "
                                      + to_string(mix.classify(i, j));
            out.push_back(check_le("pair energy vs bracket product " + label, worst_energy,
                                   1e-12, n_samples, "max (E/m - <a>^2<b>^2)/(<a>^2<b>^2)"));
            out.push_back(check_le("pre bracket vs post bracket product " + label, worst_pre,
                                   1e-12, n_samples, "max (max(<a>,<b>) - <a'><b'>)/(<a'><b'>)"));
        }
    return out;
}

std::vector<CheckResult> model23_envelope_check(const MixtureSpec& mix, long n_samples,
                                                std::uint64_t seed)
{
    std::vector<CheckResult> out;
    const int n = mix.size();
    PairKernelSpec s23;
    s23.form = KernelForm::model23;
    s23.lower.type = PartitionType::model23;
    s23.upper.type = PartitionType::model23;
    std::vector<SpeciesSpec> species;
    for (int i = 0; i < n; ++i)
        species.push_back(mix.species(i));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto cls = mix.classify(i, j);
            if (cls == InteractionClass::mono_mono)
                continue;
            for (double gamma : {mix.gamma(i, j), 0.0, 0.5, 1.0, 2.0}) {
                // Same species, with the rate of this pair replaced by gamma.
                std::vector<std::vector<double>> g(n, std::vector<double>(n, 1.0));
                g[i][j] = g[j][i] = gamma;
                const auto mix_g = MixtureSpec::create(species, mix.dim(), g);
                const PairKernel k(s23, i, j, mix_g);
                Rng rng = make_stream(seed, static_cast<std::uint64_t>(2000 + 10 * (i * n + j))
                                                + static_cast<std::uint64_t>(4 * gamma));
                double worst_low = -INFINITY, worst_high = -INFINITY;
                for (long s = 0; s < n_samples; ++s) {
                    auto a = random_test_state(rng, i, mix_g);
                    auto b = random_test_state(rng, j, mix_g);
                    auto p = random_test_params(rng, mix_g);
                    const double value = k.eval(a, b, p, mix_g);
                    const double ang = k.angular()(1.0);
                    const double Bt = energy_kernel(pair_frame(a, b, mix_g).energy, gamma, mix_g);
                    const double lo = ang * k.partition_lb(p.r, p.R) * Bt;
                    const double hi = ang * k.partition_ub(p.r, p.R) * Bt;
                    worst_low = std::max(worst_low, (lo - value) / value);
                    worst_high = std::max(worst_high, (value - hi) / value);
                }
                std::ostringstream label;
                label << pair_label(i, j, mix) << " " << to_string(cls) << " gamma=" << gamma;
                out.push_back(check_le("sum-form envelope lower " + label.str(), worst_low,
                                       1e-12, n_samples, "max (lb b B - B)/B"));
                out.push_back(check_le("sum-form envelope upper " + label.str(), worst_high,
                                       1e-12, n_samples, "max (B - ub b B)/B"));
            }
        }
    return out;
}

}  // namespace polymix
