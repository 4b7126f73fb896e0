#include <doctest.h>

#include <numbers>

#include "fixtures.hpp"
#include "polymix/kernels.hpp"
#include "polymix/oracles/oracles.hpp"
#include "polymix/quadrature.hpp"

using namespace polymix;
using namespace polymix::test;

TEST_CASE("single-species parameter weight")
{
    CHECK(weight_di(0.0, 1.0) == 0.0);
    CHECK(weight_di(1.0, 1.0) == 0.0);
    CHECK(weight_di(0.25, 1.0) == doctest::Approx(0.375));

    const auto res = quad::integrate([](double R) { return weight_di(R, 0.0); }, 0.0, 1.0);
    CHECK(res.value == doctest::Approx(oracle::beta_function(1.5, 1.0)).epsilon(1e-9));
    CHECK(res.value == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("two-species parameter weight")
{
    CHECK(weight_dij(0.0, 0.5, 1.0, 1.0) == 0.0);
    CHECK(weight_dij(0.5, 0.5, 0.0, 0.0) == doctest::Approx(0.5 * std::sqrt(0.5)));

    const auto outer = quad::integrate(
        [](double R) {
            return quad::integrate([R](double r) { return weight_dij(r, R, 0.0, 0.0); }, 0.0, 1.0)
                .value;
        },
        0.0, 1.0);
    CHECK(outer.value == doctest::Approx(oracle::beta_function(1.5, 2.0)).epsilon(1e-9));
    CHECK(outer.value == doctest::Approx(4.0 / 15.0).epsilon(1e-9));
}

TEST_CASE("energy kernel")
{
    const auto mix = single_species(1.0, false);
    CHECK(energy_kernel(7.3, 0.0, mix) == 1.0);
    CHECK(energy_kernel(4.0, 2.0, mix) == doctest::Approx(4.0));

    // Mono-mono: (mu/(2m))^(gamma/2) |u|^gamma.
    const auto mm = pair_mixture(1.0, false, 3.0, false);
    const auto f = pair_frame(state({0.5, 0.1, -0.4}, 0, 0), state({-0.2, 0.3, 0.6}, 0, 1), mm);
    const double gamma = 1.3;
    CHECK(energy_kernel(f.energy, gamma, mm)
          == doctest::Approx(std::pow(f.mu / (2.0 * mm.total_mass()), gamma / 2)
                             * std::pow(norm(f.u), gamma)));
}

TEST_CASE("kernel constants of isotropic product kernels")
{
    const auto mono = single_species(1.0, false);
    PairKernelSpec normalized;
    normalized.angular = AngularKernel::normalized_isotropic(3);
    const auto kc1 = compute_kappas(KernelSpec::uniform(mono, normalized), mono);
    CHECK(kc1.kappa_ub(0, 0) == doctest::Approx(1.0));
    CHECK(kc1.kappa_lb(0, 0) == doctest::Approx(1.0));

    const auto pm = pair_mixture(1.0, true, 1.0, false, 0.0, 0.0);
    const auto kc2 = compute_kappas(KernelSpec::uniform(pm, PairKernelSpec{}), pm);
    const int poly = pm.is_poly(0) ? 0 : 1;
    CHECK(kc2.kappa_ub(poly, 1 - poly)
          == doctest::Approx(4.0 * std::numbers::pi * 2.0 / 3.0).epsilon(1e-9));

    const auto mix = default_mixture();
    const auto kc = compute_kappas(KernelSpec::uniform(mix, PairKernelSpec{}), mix);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(kc.kappa_lb(i, j) <= kc.kappa_ub(i, j));
}

TEST_CASE("sandwich constant L")
{
    CHECK(lower_bound_constant(0.3, 0.0) == doctest::Approx(1.0));
    CHECK(lower_bound_constant(0.5, 2.0) == doctest::Approx(0.125));
}

TEST_CASE("micro-reversibility of product kernels")
{
    const auto mix = default_mixture();
    const auto spec = KernelSpec::uniform(mix, PairKernelSpec{});
    Rng rng = make_stream(4, 9);
    double worst = 0.0;
    for (int n = 0; n < 20000; ++n) {
        const int i = n % 3, j = (n / 3) % 3;
        const auto a = random_test_state(rng, i, mix);
        const auto b = random_test_state(rng, j, mix);
        const auto p = random_test_params(rng, mix);
        const auto out = collide(a, b, p, mix);
        if (out.is_null())
            continue;
        const auto& k = spec.pair(i, j);
        worst = std::max(worst, rel_diff(k.eval(a, b, p, mix),
                                         k.eval(out.a_out, out.b_out, out.primed, mix)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("bound checks report zero violations")
{
    const auto mix = default_mixture();
    const auto spec = KernelSpec::uniform(mix, PairKernelSpec{});
    for (const auto& c : kernel_bounds_check(spec, mix, 20000, 1))
        CHECK_MESSAGE(c.passed, c.name);
    for (const auto& c : bracket_upper_bounds_check(mix, 20000, 2))
        CHECK_MESSAGE(c.passed, c.name);
    for (const auto& c : model23_envelope_check(mix, 20000, 3))
        CHECK_MESSAGE(c.passed, c.name);
}

TEST_CASE("sum-form kernel endpoint")
{
    const auto mix = pair_mixture(2.0, true, 1.0, false, 1.0, 0.0, 1.5);
    PairKernelSpec spec;
    spec.form = KernelForm::model23;
    spec.angular = AngularKernel::isotropic(0.7);
    spec.lower.type = PartitionType::model23;
    spec.upper.type = PartitionType::model23;
    const int poly = mix.is_poly(0) ? 0 : 1;
    const PairKernel k(spec, poly, 1 - poly, mix);
    const auto a = state({0.3, 0.2, -0.1}, 0.0, poly);
    const auto b = state({-0.5, 0.4, 0.2}, 0.0, 1 - poly);
    const Vec u = a.v - b.v;
    const CollisionParams p{normalized(Vec{1, 1, 0}), 0.5, 1.0};
    CHECK(k.eval(a, b, p, mix) == doctest::Approx(0.7 * std::pow(norm(u), 1.5)));
}
