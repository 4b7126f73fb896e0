#include "polymix/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polymix/errors.hpp"

namespace polymix {
namespace {

void require_unit(const Vec& sigma)
{
    if (std::fabs(norm_sq(sigma) - 1.0) > 1e-10)
        throw std::invalid_argument("scattering direction must be a unit vector");
}

void require_unit_interval(double x, const char* what)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

// a' = V + (1-s) g sigma, b' = V - s g sigma: shared by every class once the
// post-collision relative speed g is known.
void scatter(CollisionOutcome& out, const PairFrame& f, double g, const Vec& sigma)
{
    const double ga = (1.0 - f.s) * g, gb = f.s * g;
    for (int k = 0; k < f.V.dim(); ++k) {
        out.a_out.v[k] = f.V[k] + ga * sigma[k];
        out.b_out.v[k] = f.V[k] - gb * sigma[k];
    }
}

CollisionOutcome start(const ParticleState& a, const ParticleState& b)
{
    CollisionOutcome out;
    out.status = CollisionStatus::collided;
    out.a_out = a;
    out.b_out = b;
    return out;
}

Vec primed_direction(const PairFrame& f, const Vec& fallback)
{
    double n = norm(f.u);
    return n > 0.0 ? f.u * (1.0 / n) : fallback;
}

CollisionOutcome null_outcome(const ParticleState& a, const ParticleState& b,
                              const CollisionParams& params)
{
    CollisionOutcome out;
    out.status = CollisionStatus::null_collision;
    out.a_out = a;
    out.b_out = b;
    out.primed = params;
    return out;
}

// Kinetic share R of the pair energy returns as relative motion along sigma;
// the rest becomes internal energy split (share_a, 1 - share_a).
CollisionOutcome exchange(const ParticleState& a, const ParticleState& b,
                          const CollisionParams& params, double share_a, const MixtureSpec& mix)
{
    require_unit(params.sigma);
    require_unit_interval(params.R, "R");
    const PairFrame f = pair_frame(a, b, mix);
    const double E = f.energy;
    if (!(E > 0.0))
        return null_outcome(a, b, params);
    CollisionOutcome out = start(a, b);
    const double g = std::sqrt(2.0 * params.R * E / f.mu);
    scatter(out, f, g, params.sigma);
    const double internal = (1.0 - params.R) * E;
    out.a_out.internal = mix.is_poly(a.species) ? share_a * internal : 0.0;
    out.b_out.internal = mix.is_poly(b.species) ? (1.0 - share_a) * internal : 0.0;

    out.primed.sigma = primed_direction(f, params.sigma);
    out.primed.R = std::clamp(0.5 * f.mu * norm_sq(f.u) / E, 0.0, 1.0);
    const double i_sum = a.internal + b.internal;
    out.primed.r = i_sum > 0.0 ? a.internal / i_sum : 0.5;
    return out;
}

}  // namespace

CollisionOutcome collide_mono_mono(const ParticleState& a, const ParticleState& b,
                                   const Vec& sigma, const MixtureSpec& mix)
{
    require_unit(sigma);
    const PairFrame f = pair_frame(a, b, mix);
    const double g = norm(f.u);
    CollisionParams given{sigma, 0.5, 1.0};
    if (!(g > 0.0))
        return null_outcome(a, b, given);
    CollisionOutcome out = start(a, b);
    scatter(out, f, g, sigma);
    out.primed = {f.u * (1.0 / g), 0.5, 1.0};
    return out;
}

CollisionOutcome collide_poly_poly(const ParticleState& a, const ParticleState& b,
                                   const CollisionParams& params, const MixtureSpec& mix)
{
    require_unit_interval(params.r, "r");
    return exchange(a, b, params, params.r, mix);
}

CollisionOutcome collide_poly_mono(const ParticleState& a_poly, const ParticleState& b_mono,
                                   const Vec& sigma, double R, const MixtureSpec& mix)
{
    return exchange(a_poly, b_mono, {sigma, 0.5, R}, 1.0, mix);
}

CollisionOutcome collide_mono_poly(const ParticleState& a_mono, const ParticleState& b_poly,
                                   const Vec& sigma, double R, const MixtureSpec& mix)
{
    return exchange(a_mono, b_poly, {sigma, 0.5, R}, 0.0, mix);
}

CollisionOutcome collide(const ParticleState& a, const ParticleState& b,
                         const CollisionParams& params, const MixtureSpec& mix)
{
    switch (mix.classify(a.species, b.species)) {
    case InteractionClass::mono_mono: return collide_mono_mono(a, b, params.sigma, mix);
    case InteractionClass::poly_poly: return collide_poly_poly(a, b, params, mix);
    case InteractionClass::poly_mono:
        return collide_poly_mono(a, b, params.sigma, params.R, mix);
    case InteractionClass::mono_poly:
        return collide_mono_poly(a, b, params.sigma, params.R, mix);
    }
    throw std::logic_error("unknown interaction class");
}

double jacobian(const CollisionParams& in, const CollisionParams& primed, InteractionClass cls,
                int dim)
{
    if (cls == InteractionClass::mono_mono)
        return 1.0;
    const double Rp = primed.R;
    const double R = in.R;
    const double radial = (dim - 2) / 2.0;
    if (!(Rp > 0.0))
        throw DegenerateParametrization("primed kinetic fraction R' = 0");
    double j = std::pow(R / Rp, radial);
    if (cls == InteractionClass::poly_poly) {
        if (!(Rp < 1.0))
            throw DegenerateParametrization("primed kinetic fraction R' = 1");
        j *= (1.0 - R) / (1.0 - Rp);
    }
    return j;
}

EnergySplit energy_split(const ParticleState& a, const ParticleState& b,
                         const CollisionParams& params, const MixtureSpec& mix)
{
    const PairFrame f = pair_frame(a, b, mix);
    const double m = mix.total_mass();
    EnergySplit sp;
    sp.cls = f.cls;
    sp.s = f.s;
    sp.s_bar = f.s_bar;

    // Both pieces are at least 1; their excesses are computed directly to
    // avoid cancellation in lambda.
    const double center_excess = (f.mass_a + f.mass_b) * norm_sq(f.V) / (2.0 * m);
    const double relative_excess = f.energy / m;
    const double center = 1.0 + center_excess;
    const double relative = 1.0 + relative_excess;
    sp.total = center + relative;
    sp.theta = center / sp.total;
    const double one_minus_theta = relative / sp.total;

    const bool has_R = f.cls != InteractionClass::mono_mono;
    const double R = has_R ? params.R : 1.0;
    sp.sigma_split = (1.0 + R * relative_excess) / relative;

    const double s = f.s;
    sp.p_t = s * sp.theta + (1.0 - s) * sp.sigma_split * one_minus_theta;
    sp.q_t = (1.0 - s) * sp.theta + s * sp.sigma_split * one_minus_theta;
    sp.t_t = (1.0 - sp.sigma_split) * one_minus_theta;
    if (!has_R) {
        sp.p = s * sp.theta + (1.0 - s) * one_minus_theta;
        sp.q = (1.0 - s) * sp.theta + s * one_minus_theta;
        sp.p_t = sp.p;
        sp.q_t = sp.q;
        sp.t_t = 0.0;
    }
    else {
        sp.p = sp.p_t;
        sp.q = sp.q_t;
    }

    const double kinetic_excess = std::max(0.0, R * relative_excess);
    sp.lambda = 2.0 * std::sqrt(s * (1.0 - s)) * std::sqrt(kinetic_excess)
                * std::sqrt(std::max(0.0, center_excess));

    const double vn = norm(f.V);
    sp.zero_center_velocity = !(vn > 0.0);
    sp.cos_center = sp.zero_center_velocity ? 0.0 : dot(f.V, params.sigma) / vn;

    switch (f.cls) {
    case InteractionClass::poly_poly: sp.internal_share_a = params.r; break;
    case InteractionClass::poly_mono: sp.internal_share_a = 1.0; break;
    default: sp.internal_share_a = 0.0; break;
    }
    return sp;
}

std::pair<double, double> reconstructed_primed_brackets(const EnergySplit& sp)
{
    const double cross = sp.lambda * sp.cos_center;
    const double a = sp.total * (sp.p_t + sp.internal_share_a * sp.t_t) + cross;
    const double b = sp.total * (sp.q_t + (1.0 - sp.internal_share_a) * sp.t_t) - cross;
    return {a, b};
}

std::pair<double, double> primed_bracket_bound(const EnergySplit& sp,
                                               const CollisionParams& params)
{
    const double off = 1.0 - std::fabs(sp.cos_center);
    switch (sp.cls) {
    case InteractionClass::mono_mono: {
        double bound = (1.0 - sp.s_bar * off) * sp.total;
        return {bound, bound};
    }
    case InteractionClass::poly_poly: {
        double ba = sp.total * (1.0 - sp.q_t * off - sp.t_t * (1.0 - params.r));
        double bb = sp.total * (1.0 - sp.p_t * off - sp.t_t * params.r);
        return {ba, bb};
    }
    case InteractionClass::poly_mono:
    case InteractionClass::mono_poly: {
        double bound = (1.0 - sp.s_bar * params.R * off) * sp.total;
        return {bound, bound};
    }
    }
    return {sp.total, sp.total};
}

}  // namespace polymix
