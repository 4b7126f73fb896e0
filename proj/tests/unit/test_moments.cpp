#include <doctest.h>

#include "fixtures.hpp"
#include "polymix/config.hpp"
#include "polymix/dsmc.hpp"
#include "polymix/moments.hpp"
#include "polymix/oracles/oracles.hpp"

using namespace polymix;
using namespace polymix::test;

namespace {

const std::vector<double> kOrders{0.0, 1.0, 2.0, 3.0, 4.0, 6.0};

}  // namespace

TEST_CASE("moments of a particle at rest equal its weight")
{
    const auto mix = single_species(2.0, true, 1.0);
    Ensemble ens(1);
    ens.particles[0].push_back(state({0, 0, 0}, 0.0, 0));
    ens.weight[0] = 0.37;
    const auto mom = moments_of_ensemble(ens, mix, kOrders);
    for (double k : kOrders)
        CHECK(mom.at(0, k) == doctest::Approx(0.37));
}

TEST_CASE("mixture moments add species moments")
{
    const auto mix = default_mixture();
    Rng rng = make_stream(1, 5);
    Ensemble ens(3);
    for (int i = 0; i < 3; ++i) {
        for (int n = 0; n < 50; ++n)
            ens.particles[i].push_back(random_test_state(rng, i, mix));
        ens.weight[i] = 0.01 * (i + 1);
    }
    const auto mom = moments_of_ensemble(ens, mix, kOrders);
    for (double k : kOrders)
        CHECK(mom.mixture_at(k) == doctest::Approx(mom.at(0, k) + mom.at(1, k) + mom.at(2, k)));
}

TEST_CASE("second moment of a sampled Maxwellian")
{
    const auto mix = default_mixture();
    InitialCondition ic;
    ic.temperature = {0.8};
    const std::vector<int> n{20000, 20000, 20000};
    const auto ens = make_initial_ensemble(ic, mix, n, 31);
    const auto mom = moments_of_ensemble(ens, mix, kOrders);
    for (int i = 0; i < 3; ++i) {
        const double exact = ens.weight[i] * n[i]
                             * oracle::maxwellian_bracket_sq_mean(0.8, 3, mix.total_mass(),
                                                                  mix.is_poly(i), mix.alpha(i));
        CHECK(std::fabs(mom.at(i, 2.0) - exact) <= 3.0 * mom.species_error[i][2] + 1e-15);
    }
}

TEST_CASE("moment interpolation")
{
    const auto mix = default_mixture();
    Ensemble dirac(3);
    for (int i = 0; i < 3; ++i)
        dirac.particles[i].push_back(state({0.3, -0.2, 0.1}, mix.is_poly(i) ? 0.4 : 0.0, i));
    const auto md = moments_of_ensemble(dirac, mix, kOrders);
    CHECK(interpolation_check(md, 1.0, 1.0, 4.0));
    CHECK(interpolation_check(md, 1.0, 3.0, 4.0, 1e-13));

    Rng rng = make_stream(3, 6);
    for (int e = 0; e < 200; ++e) {
        Ensemble ens(3);
        for (int i = 0; i < 3; ++i)
            for (int n = 0; n < 20; ++n)
                ens.particles[i].push_back(random_test_state(rng, i, mix));
        const auto mom = moments_of_ensemble(ens, mix, kOrders);
        for (std::size_t a = 0; a < kOrders.size(); ++a)
            for (std::size_t b = a; b < kOrders.size(); ++b)
                for (std::size_t c = std::max(b, a + 1); c < kOrders.size(); ++c)
                    CHECK(interpolation_check(mom, kOrders[a], kOrders[b], kOrders[c]));
    }
}

TEST_CASE("comparison envelope with unit constants")
{
    const ComparisonEnvelope env(1.0, 1.0, 1.0);
    CHECK(env.E() == doctest::Approx(1.0));
    CHECK(env.beta() == doctest::Approx(1.0));
    CHECK(env.K() == doctest::Approx(1.0));
    for (double t : {0.01, 0.5, 1.0, 7.0, 100.0}) {
        CHECK(env(t) == doctest::Approx(1.0 + 1.0 / t));
        CHECK(std::tanh(t) <= env(t));
    }
    const ComparisonEnvelope small(1.0, 1e-12, 1.0);
    CHECK(small.E() < 1e-5);
    CHECK_THROWS(ComparisonEnvelope(0.0, 1.0, 1.0));
}

TEST_CASE("RK4 solution stays below the envelope")
{
    std::vector<double> times;
    for (int n = 1; n <= 1000; ++n)
        times.push_back(0.1 * n);
    const double A = 2.0, B = 3.0, c = 0.5;
    const ComparisonEnvelope env(A, B, c);
    for (double y0 : {0.0, 10.0 * env.E()}) {
        const auto y = oracle::rk4_scalar([&](double v) { return B - A * std::pow(v, 1.0 + c); },
                                          y0, times, [](double) { return 1e-3; });
        for (std::size_t n = 0; n < times.size(); ++n)
            CHECK(y[n] <= env(times[n]) * (1.0 + 1e-9));
    }
}

TEST_CASE("Cauchy and collision-frequency constants")
{
    const auto mono = single_species(1.0, false);
    PairKernelSpec normalized;
    normalized.angular = AngularKernel::normalized_isotropic(3);
    const auto kc = compute_kappas(KernelSpec::uniform(mono, normalized), mono);
    const auto cc = cauchy_constants(1.0, kc);
    CHECK(cc.C_H == doctest::Approx(6.0));
    CHECK(cc.C_L == doctest::Approx(2.0));
    const auto c4 = cauchy_constants(4.0, kc);
    CHECK(c4.C_H == doctest::Approx(6.0 * 8.0));
    CHECK(c4.C_L / c4.C_H == doctest::Approx(0.5 / 3.0));

    const double K = collision_constant(1.7, kc);
    CHECK(collision_constant(3.4, kc) == doctest::Approx(2.0 * K));
    CHECK(collision_frequency_bound(state({0, 0, 0}, 0, 0), 1.7, kc, mono) == doctest::Approx(K));
}

TEST_CASE("collision frequency stays below its bound")
{
    const Config cfg = parse_config(default_config_json());
    const auto& mix = cfg.mix;
    const auto kc = compute_kappas(cfg.kernels, mix);
    Rng rng = make_stream(12, 7);
    Ensemble ens(3);
    for (int i = 0; i < 3; ++i)
        for (int n = 0; n < 30; ++n)
            ens.particles[i].push_back(random_test_state(rng, i, mix));
    for (int i = 0; i < 3; ++i)
        ens.weight[i] = 1.0 / 90.0;
    const std::vector<double> orders{0.0, 2.0, mix.gamma_high()};
    const auto mom = moments_of_ensemble(ens, mix, orders);
    for (int n = 0; n < 60; ++n) {
        const auto s = random_test_state(rng, n % 3, mix);
        CHECK(collision_frequency(s, ens, cfg.kernels, mix)
              <= collision_frequency_bound(s, mom.mixture_at(mix.gamma_high()), kc, mix)
                     * (1.0 + 1e-9));
    }
}

TEST_CASE("ODI constants and invariant sets")
{
    const Config cfg = parse_config(default_config_json());
    const auto& mix = cfg.mix;
    const auto kc = compute_kappas(cfg.kernels, mix);
    const auto avg = estimate_Ck(cfg.kernels, mix, kc, cfg.averaging);
    REQUIRE(avg.threshold_reached);

    OdiInputs in;
    in.m0 = {0.3, 0.3, 0.4};
    in.m2 = {1.2, 1.5, 2.0};
    in.m_gamma_high = 2.0;
    const auto c = compute_odi_constants(in, kc, avg, mix, 30.0);
    // With one species mass well below the others the minimum sits on it.
    auto light = in;
    light.m0[2] = 1e-4;
    auto halved = light;
    halved.m0[2] *= 0.5;
    CHECK(compute_odi_constants(halved, kc, avg, mix, 30.0).A_star
          == doctest::Approx(0.5 * compute_odi_constants(light, kc, avg, mix, 30.0).A_star));
    CHECK_THROWS_AS(compute_odi_constants(in, kc, avg, mix, 3.0), ConfigError);

    const double h = h_frak(in, kc, avg, mix);
    InitialCondition ic;
    const auto ens = make_initial_ensemble(ic, mix, {200, 200, 200}, 4);
    const double p = std::max(0.0, 2.0 + mix.gamma_high() - mix.gamma_low());
    std::vector<double> orders{0.0, 2.0, avg.k_star, p};
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    const auto mom = moments_of_ensemble(ens, mix, orders);
    const std::vector<double> C0{mom.at(0, 0.0), mom.at(1, 0.0), mom.at(2, 0.0)};

    const auto rejected = omega_membership(mom, h, avg.k_star, mix, C0, mom.mixture_at(2.0), 0.5 * h);
    CHECK(rejected.rejected_config);

    const double C_star = 2.0 * h;
    const auto inside = omega_membership(mom, h, avg.k_star, mix, C0, mom.mixture_at(2.0), C_star);
    if (inside.in_omega)
        CHECK(inside.in_omega_tilde);

    // A fast particle pushes the order-k* moment above C_star.
    double speed = 1.0;
    MomentVector fast_mom;
    do {
        speed *= 10.0;
        Ensemble fast(3);
        for (int i = 0; i < 3; ++i)
            fast.particles[i].push_back(state({speed, 0, 0}, 0.0, i));
        fast_mom = moments_of_ensemble(fast, mix, orders);
    } while (fast_mom.mixture_at(avg.k_star) <= C_star && speed < 1e150);
    const std::vector<double> C0f{fast_mom.at(0, 0.0), fast_mom.at(1, 0.0), fast_mom.at(2, 0.0)};
    const auto outside = omega_membership(fast_mom, h, avg.k_star, mix, C0f,
                                          fast_mom.mixture_at(2.0), C_star);
    CHECK_FALSE(outside.in_omega);
    REQUIRE_FALSE(outside.reasons.empty());
    CHECK(outside.reasons.back().find("k_star") != std::string::npos);
}
