#include <doctest.h>

#include "fixtures.hpp"
#include "polymix/dsmc.hpp"
#include "polymix/kernels.hpp"
#include "polymix/kinematics.hpp"
#include "polymix/oracles/oracles.hpp"

using namespace polymix;
using namespace polymix::test;

namespace {

double kinetic(const ParticleState& s, const MixtureSpec& mix)
{
    return 0.5 * mix.mass(s.species) * norm_sq(s.v);
}

double total_energy(const ParticleState& a, const ParticleState& b, const MixtureSpec& mix)
{
    return kinetic(a, mix) + a.internal + kinetic(b, mix) + b.internal;
}

Vec momentum(const ParticleState& a, const ParticleState& b, const MixtureSpec& mix)
{
    return mix.mass(a.species) * a.v + mix.mass(b.species) * b.v;
}

double vec_diff(const Vec& a, const Vec& b) { return norm(a - b); }

}  // namespace

TEST_CASE("mono-mono identity and head-on swap")
{
    const auto mix = pair_mixture(1.0, false, 1.0, false);
    const auto a = state({1.0, 0.5, -0.2}, 0, 0);
    const auto b = state({-0.3, 0.1, 0.4}, 0, 1);
    const Vec u_hat = normalized(a.v - b.v);

    const auto same = collide_mono_mono(a, b, u_hat, mix);
    CHECK(vec_diff(same.a_out.v, a.v) < 1e-14);
    CHECK(vec_diff(same.b_out.v, b.v) < 1e-14);

    const auto swap = collide_mono_mono(a, b, -u_hat, mix);
    CHECK(vec_diff(swap.a_out.v, b.v) < 1e-14);
    CHECK(vec_diff(swap.b_out.v, a.v) < 1e-14);
}

TEST_CASE("conservation for random pairs of every class")
{
    const auto mix = default_mixture();
    Rng rng = make_stream(3, 1);
    double worst_e = 0.0, worst_p = 0.0;
    for (int n = 0; n < 40000; ++n) {
        const int i = n % 3, j = (n / 3) % 3;
        const auto a = random_test_state(rng, i, mix);
        const auto b = random_test_state(rng, j, mix);
        const auto out = collide(a, b, random_test_params(rng, mix), mix);
        if (out.is_null())
            continue;
        worst_e = std::max(worst_e, rel_diff(total_energy(a, b, mix),
                                             total_energy(out.a_out, out.b_out, mix)));
        const double scale = mix.mass(i) * norm(a.v) + mix.mass(j) * norm(b.v);
        worst_p = std::max(worst_p, vec_diff(momentum(a, b, mix),
                                             momentum(out.a_out, out.b_out, mix)) / scale);
    }
    CHECK(worst_e <= 1e-12);
    CHECK(worst_p <= 1e-12);
}

TEST_CASE("poly-poly fixed point and endpoint")
{
    const auto mix = pair_mixture(1.0, true, 2.0, true, 0.5, 1.0);
    const auto a = state({0.4, -0.1, 0.3}, 0.7, 0);
    const auto b = state({-0.2, 0.5, 0.1}, 0.2, 1);
    const auto f = pair_frame(a, b, mix);
    CollisionParams fixed;
    fixed.sigma = normalized(f.u);
    fixed.R = 0.5 * f.mu * norm_sq(f.u) / f.energy;
    fixed.r = a.internal / (a.internal + b.internal);
    const auto same = collide_poly_poly(a, b, fixed, mix);
    CHECK(vec_diff(same.a_out.v, a.v) < 1e-13);
    CHECK(vec_diff(same.b_out.v, b.v) < 1e-13);
    CHECK(same.a_out.internal == doctest::Approx(a.internal).epsilon(1e-13));
    CHECK(same.b_out.internal == doctest::Approx(b.internal).epsilon(1e-13));
    CHECK(jacobian(fixed, same.primed, InteractionClass::poly_poly) == doctest::Approx(1.0));

    CollisionParams end{normalized(Vec{1, 2, 3}), 1.0, 0.3};
    const auto out = collide_poly_poly(a, b, end, mix);
    CHECK(out.b_out.internal == doctest::Approx(0.0));
    CHECK(out.a_out.internal == doctest::Approx(0.7 * f.energy));
}

TEST_CASE("poly-mono fixed point and endpoint")
{
    const auto mix = pair_mixture(2.0, true, 1.0, false, 1.0, 0.0);
    const auto a = state({0.4, -0.1, 0.3}, 0.7, 1);
    const auto b = state({-0.2, 0.5, 0.1}, 0.0, 0);
    REQUIRE(mix.is_poly(1));
    const auto f = pair_frame(a, b, mix);
    const double R_fix = 0.5 * f.mu * norm_sq(f.u) / f.energy;
    const auto same = collide_poly_mono(a, b, normalized(f.u), R_fix, mix);
    CHECK(vec_diff(same.a_out.v, a.v) < 1e-13);
    CHECK(vec_diff(same.b_out.v, b.v) < 1e-13);
    CHECK(same.a_out.internal == doctest::Approx(a.internal).epsilon(1e-13));
    CHECK(jacobian({normalized(f.u), 0.5, R_fix}, same.primed, InteractionClass::poly_mono)
          == doctest::Approx(1.0));

    const auto all_kinetic = collide_poly_mono(a, b, normalized(Vec{0, 1, 1}), 1.0, mix);
    CHECK(all_kinetic.a_out.internal == doctest::Approx(0.0));
}

TEST_CASE("mono-poly endpoint and reference interchange")
{
    const auto mix = pair_mixture(1.0, false, 2.5, true, 0.0, 1.0);
    const auto a = state({0.4, -0.1, 0.3}, 0.0, 0);
    const auto b = state({-0.2, 0.5, 0.1}, 0.9, 1);
    const auto f = pair_frame(a, b, mix);

    const auto none_kinetic = collide_mono_poly(a, b, normalized(Vec{1, 0, 0}), 0.0, mix);
    CHECK(vec_diff(none_kinetic.a_out.v, f.V) < 1e-13);
    CHECK(vec_diff(none_kinetic.b_out.v, f.V) < 1e-13);
    CHECK(none_kinetic.b_out.internal == doctest::Approx(f.energy));

    Rng rng = make_stream(5, 2);
    for (int n = 0; n < 200; ++n) {
        const auto x = random_test_state(rng, 0, mix);
        const auto y = random_test_state(rng, 1, mix);
        const Vec sigma = uniform_sphere(rng, 3);
        const double R = uniform01(rng);
        const auto mp = collide_mono_poly(x, y, -sigma, R, mix);
        const auto pm = collide_poly_mono(y, x, sigma, R, mix);
        CHECK(vec_diff(mp.a_out.v, pm.b_out.v) <= 1e-12 * (1.0 + norm(x.v) + norm(y.v)));
        CHECK(vec_diff(mp.b_out.v, pm.a_out.v) <= 1e-12 * (1.0 + norm(x.v) + norm(y.v)));
        CHECK(mp.b_out.internal == doctest::Approx(pm.a_out.internal).epsilon(1e-12));
    }
}

TEST_CASE("collision maps are involutions")
{
    const auto mix = default_mixture();
    Rng rng = make_stream(8, 3);
    double worst = 0.0;
    for (int n = 0; n < 20000; ++n) {
        const int i = n % 3, j = (n / 3) % 3;
        const auto a = random_test_state(rng, i, mix);
        const auto b = random_test_state(rng, j, mix);
        const auto p = random_test_params(rng, mix);
        const auto once = collide(a, b, p, mix);
        if (once.is_null())
            continue;
        const auto twice = collide(once.a_out, once.b_out, once.primed, mix);
        const double scale = norm(a.v) + norm(b.v);
        worst = std::max({worst, vec_diff(twice.a_out.v, a.v) / scale,
                          vec_diff(twice.b_out.v, b.v) / scale,
                          vec_diff(twice.primed.sigma, p.sigma)});
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("analytic Jacobian matches finite differences")
{
    for (int dim : {3, 2}) {
        CAPTURE(dim);
        const auto mix = default_mixture(dim);
        Rng rng = make_stream(21, static_cast<std::uint64_t>(dim));
        double worst = 0.0;
        for (int n = 0; n < 900; ++n) {
            const int i = n % 3, j = (n / 3) % 3;
            ParticleState a{normal_vec(rng, dim), 0.0, i};
            ParticleState b{normal_vec(rng, dim), 0.0, j};
            if (mix.is_poly(i))
                a.internal = log_uniform(rng, 0.1, 3.0);
            if (mix.is_poly(j))
                b.internal = log_uniform(rng, 0.1, 3.0);
            auto p = sample_bl_params(mix.classify(i, j), mix.alpha(i), mix.alpha(j), dim, rng);
            p.sigma = uniform_sphere(rng, dim);
            p.R = std::clamp(p.R, 0.02, 0.98);
            p.r = std::clamp(p.r, 0.02, 0.98);
            const auto out = collide(a, b, p, mix);
            if (out.is_null() || out.primed.R < 0.02 || out.primed.R > 0.98)
                continue;
            const double analytic = jacobian(p, out.primed, mix.classify(i, j), dim);
            const double fd = oracle::fd_jacobian(a, b, p, mix);
            worst = std::max(worst, rel_diff(analytic, fd));
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("energy split examples")
{
    const auto mix = pair_mixture(1.0, false, 1.0, false);
    const auto rest = energy_split(state({0, 0, 0}, 0, 0), state({0, 0, 0}, 0, 1),
                                   {normalized(Vec{0, 0, 1}), 0.5, 1.0}, mix);
    CHECK(rest.theta * rest.total == doctest::Approx(1.0));
    CHECK(rest.lambda == doctest::Approx(0.0));

    const auto s = energy_split(state({0.3, 0.2, 0}, 0, 0), state({-0.1, 0.4, 0.5}, 0, 1),
                                {normalized(Vec{1, -1, 2}), 0.5, 1.0}, mix);
    CHECK(s.p == doctest::Approx(0.5));
    CHECK(s.q == doctest::Approx(0.5));
}

TEST_CASE("primed bracket bound saturation and orthogonal direction")
{
    // Poly-mono with sigma parallel to V: the estimate equals the pair energy.
    const auto pm = pair_mixture(2.0, true, 1.0, false, 1.0, 0.0);
    const auto a = state({1.0, 0.2, 0.0}, 0.5, 1);
    const auto b = state({0.4, -0.3, 0.1}, 0.0, 0);
    const Vec V_hat = normalized(pair_frame(a, b, pm).V);
    const CollisionParams par{V_hat, 0.5, 0.4};
    const auto split = energy_split(a, b, par, pm);
    const auto bound = primed_bracket_bound(split, par);
    CHECK(bound.first == doctest::Approx(split.total));

    // Mono-mono with sigma orthogonal to V: (1 - s_bar) times the pair energy.
    const auto mm = pair_mixture(1.0, false, 3.0, false);
    const auto c = state({1.0, 0.2, 0.0}, 0, 0);
    const auto d = state({0.4, -0.3, 0.1}, 0, 1);
    const auto fr = pair_frame(c, d, mm);
    const auto frame = orthonormal_frame(normalized(fr.V));
    const CollisionParams ortho{frame[1], 0.5, 1.0};
    const auto ms = energy_split(c, d, ortho, mm);
    const auto mb = primed_bracket_bound(ms, ortho);
    CHECK(mb.first == doctest::Approx((1.0 - fr.s_bar) * ms.total));
    CHECK(mb.second == doctest::Approx((1.0 - fr.s_bar) * ms.total));
}

TEST_CASE("reconstructed brackets equal the collision outputs")
{
    const auto mix = default_mixture();
    Rng rng = make_stream(13, 4);
    double worst = 0.0;
    for (int n = 0; n < 30000; ++n) {
        const int i = n % 3, j = (n / 3) % 3;
        const auto a = random_test_state(rng, i, mix);
        const auto b = random_test_state(rng, j, mix);
        const auto p = random_test_params(rng, mix);
        const auto out = collide(a, b, p, mix);
        if (out.is_null())
            continue;
        const auto split = energy_split(a, b, p, mix);
        const auto rec = reconstructed_primed_brackets(split);
        worst = std::max({worst, std::fabs(rec.first - bracket_sq(out.a_out, mix)) / split.total,
                          std::fabs(rec.second - bracket_sq(out.b_out, mix)) / split.total});
        const auto bound = primed_bracket_bound(split, p);
        CHECK(bracket_sq(out.a_out, mix) <= bound.first * (1.0 + 1e-12));
        CHECK(bracket_sq(out.b_out, mix) <= bound.second * (1.0 + 1e-12));
    }
    CHECK(worst <= 1e-10);
}
