#include "polymix/dsmc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "polymix/errors.hpp"

namespace polymix {
namespace {

constexpr double kCapInflation = 1.05;

Vec orthogonal_unit(const Vec& u_hat, Rng& rng)
{
    for (;;) {
        Vec w = normal_vec(rng, u_hat.dim());
        w -= dot(w, u_hat) * u_hat;
        const double n = norm(w);
        if (n > 1e-12)
            return w * (1.0 / n);
    }
}

double species_alpha(const MixtureSpec& mix, int i) { return mix.is_poly(i) ? mix.alpha(i) : 0.0; }

}  // namespace

SigmaSampler::SigmaSampler(const AngularKernel& b, int dim, int knots)
    : isotropic_{b.is_isotropic()}, dim_{dim}
{
    if (isotropic_)
        return;
    const int p = b.theta_power(dim);
    const auto br = b.breaks();
    quad::Options opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-14;
    auto density = [&](double t) {
        const double th = std::numbers::pi * std::pow(t, p);
        const double jac = std::numbers::pi * p * std::pow(t, p - 1);
        return b(std::cos(th)) * std::pow(std::sin(th), dim - 2) * jac;
    };
    theta_.resize(knots);
    cdf_.assign(knots, 0.0);
    for (int n = 0; n < knots; ++n)
        theta_[n] = static_cast<double>(n) / (knots - 1);
    for (int n = 1; n < knots; ++n) {
        std::vector<double> seg_breaks;
        for (double x : br) {
            const double t = std::pow(std::acos(x) / std::numbers::pi, 1.0 / p);
            if (t > theta_[n - 1] && t < theta_[n])
                seg_breaks.push_back(t);
        }
        cdf_[n] = cdf_[n - 1]
                  + quad::integrate(density, theta_[n - 1], theta_[n], opt, seg_breaks).value;
    }
    if (!(cdf_.back() > 0.0))
        throw ConfigError("angular kernel has zero mass");
    for (double& c : cdf_)
        c /= cdf_.back();
    // Stored as substituted coordinate t; theta = pi t^p.
    for (double& t : theta_)
        t = std::numbers::pi * std::pow(t, p);
}

double SigmaSampler::sample_cos(Rng& rng) const
{
    if (isotropic_) {
        // cos theta of a uniform point on S^(d-1).
        Vec v = uniform_sphere(rng, dim_);
        return v[0];
    }
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t hi = std::clamp<std::size_t>(it - cdf_.begin(), 1, cdf_.size() - 1);
    const std::size_t lo = hi - 1;
    const double span = cdf_[hi] - cdf_[lo];
    const double f = span > 0.0 ? (u - cdf_[lo]) / span : 0.5;
    return std::cos(theta_[lo] + f * (theta_[hi] - theta_[lo]));
}

double SigmaSampler::cdf_cos(double x) const
{
    if (isotropic_) {
        // Fraction of the sphere with e . sigma <= x.
        quad::Options opt;
        const double w = 1.0 / quad::sphere_area(dim_ - 1);
        auto g = [x](double y) { return y <= x ? 1.0 : 0.0; };
        const double brk[] = {x};
        return w * quad::integrate_sphere_axial(g, dim_, opt, brk).value;
    }
    // cos is decreasing in theta: P(cos <= x) = 1 - CDF(acos x).
    const double th = std::acos(std::clamp(x, -1.0, 1.0));
    const auto it = std::upper_bound(theta_.begin(), theta_.end(), th);
    const std::size_t hi = std::clamp<std::size_t>(it - theta_.begin(), 1, theta_.size() - 1);
    const std::size_t lo = hi - 1;
    const double f = (th - theta_[lo]) / (theta_[hi] - theta_[lo]);
    return 1.0 - (cdf_[lo] + f * (cdf_[hi] - cdf_[lo]));
}

Vec SigmaSampler::sample(const Vec& u_hat, Rng& rng) const
{
    if (isotropic_)
        return uniform_sphere(rng, dim_);
    const double c = sample_cos(rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    return normalized(c * u_hat + s * orthogonal_unit(u_hat, rng));
}

CollisionParams sample_bl_params(InteractionClass cls, double alpha_a, double alpha_b, int dim,
                                 Rng& rng)
{
    CollisionParams p;
    p.sigma = Vec::unit(dim, 0);
    const double lead = 0.5 * dim;
    switch (cls) {
    case InteractionClass::mono_mono: break;
    case InteractionClass::poly_poly:
        p.R = beta_variate(rng, lead, alpha_a + alpha_b + 2.0);
        p.r = beta_variate(rng, alpha_a + 1.0, alpha_b + 1.0);
        break;
    case InteractionClass::poly_mono: p.R = beta_variate(rng, lead, alpha_a + 1.0); break;
    case InteractionClass::mono_poly: p.R = beta_variate(rng, lead, alpha_b + 1.0); break;
    }
    return p;
}

double parameter_weight_norm(InteractionClass cls, double alpha_a, double alpha_b, int dim)
{
    const double lead = 0.5 * dim;
    switch (cls) {
    case InteractionClass::mono_mono: return 1.0;
    case InteractionClass::poly_poly:
        return std::beta(lead, alpha_a + alpha_b + 2.0) * std::beta(alpha_a + 1.0, alpha_b + 1.0);
    case InteractionClass::poly_mono: return std::beta(lead, alpha_a + 1.0);
    case InteractionClass::mono_poly: return std::beta(lead, alpha_b + 1.0);
    }
    return 1.0;
}

double majorant_factor(const PairKernel& kernel, int i, int j, const MixtureSpec& mix)
{
    const auto cls = kernel.cls();
    if (kernel.spec().form == KernelForm::product || cls == InteractionClass::mono_mono)
        return kernel.partition_ub_sup();
    // Sum of n terms z^g with g = gamma/2 <= 1 is at most n^(1-g) (sum z)^g, and
    // sum z <= max(2m/mu, 1) E/m.
    const double g = 0.5 * kernel.gamma();
    const double n = cls == InteractionClass::poly_poly ? 3.0 : 2.0;
    const double mi = mix.mass(i), mj = mix.mass(j);
    const double mu = mi * mj / (mi + mj);
    return std::pow(n, 1.0 - g) * std::pow(std::max(2.0 * mix.total_mass() / mu, 1.0), g);
}

Invariants invariants_of(const Ensemble& ens, const MixtureSpec& mix)
{
    const int d = mix.dim();
    Invariants inv;
    inv.momentum = Vec(d);
    const double m = mix.total_mass();
    for (int i = 0; i < ens.n_species(); ++i) {
        const double w = ens.weight[i], mi = mix.mass(i);
        const auto& ps = ens.particles[i];
        inv.mass.push_back(w * static_cast<double>(ps.size()));
        double m2 = 0.0, en = 0.0, scale = 0.0, internal = 0.0;
        Vec p(d), mean(d);
        for (const auto& s : ps) {
            const double v2 = dot(s.v, s.v);
            m2 += 1.0 + mi * v2 / (2.0 * m) + s.internal / m;
            en += 0.5 * mi * v2 + s.internal;
            scale += mi * norm(s.v);
            internal += s.internal;
            p += s.v;
        }
        double thermal = 0.0;
        if (!ps.empty()) {
            mean = p * (1.0 / static_cast<double>(ps.size()));
            for (const auto& s : ps) {
                const Vec dv = s.v - mean;
                thermal += dot(dv, dv);
            }
            thermal *= mi / (d * static_cast<double>(ps.size()));
        }
        inv.m2 += w * m2;
        inv.energy += w * en;
        inv.momentum_scale += w * scale;
        inv.momentum += (w * mi) * p;
        inv.temperature.push_back(thermal);
        inv.internal_temperature.push_back(
            mix.is_poly(i) && !ps.empty()
                ? internal / (static_cast<double>(ps.size()) * (mix.alpha(i) + 1.0))
                : 0.0);
    }
    return inv;
}

Simulator::Simulator(const KernelSpec& spec, const MixtureSpec& mix, SimConfig config, Ensemble ens)
    : spec_{&spec}, mix_{&mix}, config_{std::move(config)}, ens_{std::move(ens)},
      rng_{make_stream(config_.seed, 0)}
{
    const int P = mix.size();
    if (ens_.n_species() != P)
        throw ConfigError("ensemble species count does not match the mixture");
    if (!(config_.dt > 0.0))
        throw ConfigError("time step must be positive");
    if (!config_.enabled.empty()) {
        if (static_cast<int>(config_.enabled.size()) != P)
            throw ConfigError("collision toggles must be a species x species table");
        for (const auto& row : config_.enabled)
            if (static_cast<int>(row.size()) != P)
                throw ConfigError("collision toggles must be a species x species table");
    }
    for (int i = 0; i < P; ++i) {
        if (!(ens_.weight[i] > 0.0))
            throw ConfigError("species weights must be positive");
        for (const auto& s : ens_.particles[i]) {
            if (s.species != i)
                throw ConfigError("particle stored under the wrong species");
            validate_state(s, mix);
        }
    }
    const int d = mix.dim();
    for (int i = 0; i < P; ++i)
        for (int j = i; j < P; ++j) {
            const bool on = config_.enabled.empty() || (config_.enabled[i][j] && config_.enabled[j][i]);
            if (!on)
                continue;
            const PairKernel& k = spec.pair(i, j);
            const double b_norm = k.angular().l1_norm(d);
            pairs_.push_back(PairData{
                i, j, &k, SigmaSampler(k.angular(), d), majorant_factor(k, i, j, mix),
                b_norm * parameter_weight_norm(k.cls(), species_alpha(mix, i),
                                               species_alpha(mix, j), d),
                k.gamma(), 0.0});
            stats_.push_back(PairStats{i, j});
        }
    refresh_caps();
}

void Simulator::refresh_caps()
{
    cap_bsq_.assign(mix_->size(), 1.0);
    for (int i = 0; i < mix_->size(); ++i) {
        double mx = 1.0;
        for (const auto& s : ens_.particles[i])
            mx = std::max(mx, bracket_sq(s, *mix_));
        cap_bsq_[i] = kCapInflation * mx;
    }
}

void Simulator::raise_cap(int species, double bsq)
{
    cap_bsq_[species] = std::max(cap_bsq_[species], kCapInflation * bsq);
}

double Simulator::cap_sum(const PairData& p) const
{
    const double g = 0.5 * p.gamma;
    return std::pow(cap_bsq_[p.i], g) + std::pow(cap_bsq_[p.j], g);
}

double Simulator::pair_count(const PairData& p) const
{
    const double ni = static_cast<double>(ens_.count(p.i));
    const double nj = static_cast<double>(ens_.count(p.j));
    return p.i == p.j ? 0.5 * ni * (ni - 1.0) : ni * nj;
}

void Simulator::collide_pair(PairData& p, PairStats& st, double dt)
{
    auto& pa = ens_.particles[p.i];
    auto& pb = ens_.particles[p.j];
    if (pa.empty() || pb.empty() || (p.i == p.j && pa.size() < 2))
        return;
    const MixtureSpec& mix = *mix_;
    const double wi = ens_.weight[p.i], wj = ens_.weight[p.j];
    const double w_max = std::max(wi, wj);
    double majorant = p.factor * cap_sum(p);
    const double expect = pair_count(p) * w_max * p.rate_norm * majorant * dt + p.carry;
    long long n = static_cast<long long>(std::floor(expect));
    p.carry = expect - static_cast<double>(n);
    const auto cls = p.kernel->cls();
    const double alpha_a = species_alpha(mix, p.i), alpha_b = species_alpha(mix, p.j);
    const double g = 0.5 * p.gamma;
    const int d = mix.dim();
    std::uniform_int_distribution<std::size_t> pick_a(0, pa.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_b(0, pb.size() - (p.i == p.j ? 2 : 1));

    for (long long c = 0; c < n; ++c) {
        const std::size_t ia = pick_a(rng_);
        std::size_t ib = pick_b(rng_);
        if (p.i == p.j && ib >= ia)
            ++ib;
        ParticleState& a = pa[ia];
        ParticleState& b = pb[ib];
        const Vec u = a.v - b.v;
        const double un = norm(u);
        const Vec u_hat = un > 0.0 ? u * (1.0 / un) : Vec::unit(d, 0);
        CollisionParams prm = sample_bl_params(cls, alpha_a, alpha_b, d, rng_);
        prm.sigma = p.sigma.sample(u_hat, rng_);
        const double x = un > 0.0 ? dot(u_hat, prm.sigma) : 1.0;
        const double bx = p.kernel->angular()(x);
        ++st.candidates;
        if (!(bx > 0.0))
            continue;
        const double rate = p.kernel->eval(a, b, prm, mix) / bx;
        const double bsq_a = bracket_sq(a, mix), bsq_b = bracket_sq(b, mix);
        const double pointwise = p.factor * (std::pow(bsq_a, g) + std::pow(bsq_b, g));
        if (rate > pointwise * (1.0 + 1e-9))
            throw NumericalError("majorant violation for pair (" + mix.species(p.i).name + ","
                                 + mix.species(p.j).name + "): kernel " + std::to_string(rate)
                                 + " exceeds bound " + std::to_string(pointwise));
        if (uniform01(rng_) * majorant >= rate)
            continue;
        auto out = collide(a, b, prm, mix);
        ++st.accepted;
        if (out.is_null())
            continue;
        if (wi == wj) {
            a = out.a_out;
            b = out.b_out;
        }
        else {
            // The lighter-weight side always updates, the heavier with
            // probability w_small / w_large.
            const bool a_heavy = wi > wj;
            const double keep = std::min(wi, wj) / w_max;
            const bool update_heavy = uniform01(rng_) < keep;
            if (!a_heavy || update_heavy)
                a = out.a_out;
            if (a_heavy || update_heavy)
                b = out.b_out;
        }
        ++collisions_;
        const double na = bracket_sq(a, mix), nb = bracket_sq(b, mix);
        if (na > cap_bsq_[p.i] || nb > cap_bsq_[p.j]) {
            if (na > cap_bsq_[p.i])
                raise_cap(p.i, na);
            if (nb > cap_bsq_[p.j])
                raise_cap(p.j, nb);
            ++st.cap_raises;
            // Rescale the rest of this interval's candidates to the new majorant.
            const double fresh = p.factor * cap_sum(p);
            const double rest = static_cast<double>(n - c - 1) * fresh / majorant + p.carry;
            majorant = fresh;
            const long long extra = static_cast<long long>(std::floor(rest));
            p.carry = rest - static_cast<double>(extra);
            n = c + 1 + extra;
        }
    }
}

void Simulator::step(double dt)
{
    if (steps_ > 0 && config_.refresh_interval > 0 && steps_ % config_.refresh_interval == 0)
        refresh_caps();
    long long before = 0;
    for (const auto& s : stats_)
        before += s.candidates;
    for (std::size_t n = 0; n < pairs_.size(); ++n)
        collide_pair(pairs_[n], stats_[n], dt);
    long long after = 0;
    for (const auto& s : stats_)
        after += s.candidates;
    time_ += dt;
    ++steps_;
    const double per_particle = 2.0 * static_cast<double>(after - before)
                                / static_cast<double>(std::max<std::size_t>(1, ens_.total_count()));
    if (per_particle > 1.0 && !warned_candidates_) {
        warned_candidates_ = true;
        warnings_.push_back("more than one candidate per particle per step ("
                            + std::to_string(per_particle) + "); consider a smaller dt");
    }
    if (!warned_acceptance_)
        for (const auto& s : stats_)
            if (s.candidates >= 10000 && s.acceptance() < 0.01) {
                warned_acceptance_ = true;
                warnings_.push_back("acceptance rate below 1% for pair (" + mix_->species(s.i).name
                                    + "," + mix_->species(s.j).name + ")");
                break;
            }
}

RunResult Simulator::run()
{
    RunResult res;
    std::vector<double> outs = config_.output_times;
    std::sort(outs.begin(), outs.end());
    if (outs.empty() || outs.back() < config_.t_end)
        outs.push_back(config_.t_end);
    const Invariants initial = invariants_of(ens_, *mix_);
    auto record = [&] {
        res.times.push_back(time_);
        res.moments.push_back(moments_of_ensemble(ens_, *mix_, config_.orders));
        res.invariants.push_back(invariants_of(ens_, *mix_));
    };
    double max_drift = 0.0;
    for (double target : outs) {
        if (target > config_.t_end)
            break;
        while (time_ < target - 1e-12 * config_.dt) {
            const double h = std::min(config_.dt, target - time_);
            step(h);
        }
        time_ = std::max(time_, target);
        record();
        max_drift = std::max(max_drift,
                             std::fabs(res.invariants.back().m2 - initial.m2) / initial.m2);
    }
    auto& cr = res.conservation;
    cr.initial = initial;
    cr.final_state = res.invariants.back();
    cr.masses_exact = cr.initial.mass == cr.final_state.mass;
    cr.m2_drift_rel = std::fabs(cr.final_state.m2 - initial.m2) / initial.m2;
    cr.max_m2_drift_rel = max_drift;
    cr.momentum_drift_rel = norm(cr.final_state.momentum - initial.momentum)
                            / std::max(initial.momentum_scale, 1e-300);
    cr.collisions = collisions_;
    res.pair_stats = stats_;
    res.warnings = warnings_;
    return res;
}

double InitialCondition::temperature_of(int i) const
{
    if (temperature.empty())
        throw ConfigError("initial condition needs a temperature");
    if (temperature.size() == 1)
        return temperature[0];
    return temperature.at(static_cast<std::size_t>(i));
}

InitialKind parse_initial_kind(const std::string& name)
{
    if (name == "maxwellian")
        return InitialKind::maxwellian;
    if (name == "heavy_tailed")
        return InitialKind::heavy_tailed;
    if (name == "two_temperature")
        return InitialKind::two_temperature;
    throw ConfigError("unknown initial condition '" + name + "'");
}

std::string to_string(InitialKind k)
{
    switch (k) {
    case InitialKind::maxwellian: return "maxwellian";
    case InitialKind::heavy_tailed: return "heavy_tailed";
    case InitialKind::two_temperature: return "two_temperature";
    }
    return "?";
}

Ensemble make_initial_ensemble(const InitialCondition& ic, const MixtureSpec& mix,
                               const std::vector<int>& n_particles, std::uint64_t seed)
{
    const int P = mix.size();
    const int d = mix.dim();
    if (static_cast<int>(n_particles.size()) != P)
        throw ConfigError("n_particles must list one count per species");
    if (!ic.species_mass.empty() && static_cast<int>(ic.species_mass.size()) != P)
        throw ConfigError("species_mass must list one value per species");
    if (ic.kind == InitialKind::two_temperature && static_cast<int>(ic.temperature.size()) != P)
        throw ConfigError("two_temperature initial data needs one temperature per species");
    long long total = 0;
    for (int n : n_particles) {
        if (n < 1)
            throw ConfigError("every species needs at least one particle");
        total += n;
    }
    Ensemble ens(P);
    for (int i = 0; i < P; ++i) {
        Rng rng = make_stream(seed, 1000 + static_cast<std::uint64_t>(i));
        const double T = ic.temperature_of(i);
        if (!(T > 0.0))
            throw ConfigError("temperatures must be positive");
        const double mi = mix.mass(i);
        const double target_mass = ic.species_mass.empty()
                                       ? static_cast<double>(n_particles[i]) / static_cast<double>(total)
                                       : ic.species_mass[i];
        ens.weight[i] = target_mass / n_particles[i];
        auto& ps = ens.particles[i];
        ps.reserve(n_particles[i]);
        for (int n = 0; n < n_particles[i]; ++n) {
            ParticleState s;
            s.species = i;
            if (ic.kind == InitialKind::heavy_tailed) {
                const double nu = ic.student_nu;
                const double chi = std::chi_squared_distribution<double>(nu)(rng);
                const double scale = std::sqrt(T / mi * (nu - 2.0) / nu * nu / chi);
                s.v = normal_vec(rng, d, scale);
                if (mix.is_poly(i)) {
                    const double a = ic.pareto_shape;
                    const double xm = (mix.alpha(i) + 1.0) * T * (a - 1.0) / a;
                    s.internal = xm * std::pow(1.0 - uniform01(rng), -1.0 / a);
                }
            }
            else {
                s.v = normal_vec(rng, d, std::sqrt(T / mi));
                if (mix.is_poly(i))
                    s.internal = std::gamma_distribution<double>(mix.alpha(i) + 1.0, T)(rng);
            }
            ps.push_back(s);
        }
    }
    // Remove the sampled net momentum.
    Vec p(d);
    double mass = 0.0;
    for (int i = 0; i < P; ++i)
        for (const auto& s : ens.particles[i]) {
            p += (ens.weight[i] * mix.mass(i)) * s.v;
            mass += ens.weight[i] * mix.mass(i);
        }
    const Vec drift = p * (1.0 / mass);
    for (int i = 0; i < P; ++i)
        for (auto& s : ens.particles[i])
            s.v -= drift;
    return ens;
}

}  // namespace polymix
