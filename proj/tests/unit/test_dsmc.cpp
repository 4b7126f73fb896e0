#include <doctest.h>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "fixtures.hpp"
#include "polymix/dsmc.hpp"

using namespace polymix;
using namespace polymix::test;

namespace {

/// Chi-square goodness-of-fit p-value of samples against a Beta(a, b) law.
double beta_fit_p_value(const std::vector<double>& x, double a, double b, int bins = 20)
{
    const boost::math::beta_distribution<double> law(a, b);
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double v : x)
        counts[std::min(bins - 1, static_cast<int>(v * bins))] += 1.0;
    double stat = 0.0;
    for (int k = 0; k < bins; ++k) {
        const double p = boost::math::cdf(law, (k + 1.0) / bins) - boost::math::cdf(law, double(k) / bins);
        const double expected = p * static_cast<double>(x.size());
        stat += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(bins - 1.0), stat));
}

double mean(const std::vector<double>& x)
{
    double s = 0.0;
    for (double v : x)
        s += v;
    return s / static_cast<double>(x.size());
}

SimConfig short_run(double t_end)
{
    SimConfig c;
    c.dt = 0.01;
    c.t_end = t_end;
    c.output_times = {0.0, t_end};
    c.orders = {0.0, 2.0};
    c.seed = 17;
    return c;
}

}  // namespace

TEST_CASE("energy-exchange parameters follow their Beta laws")
{
    constexpr int n = 1000000;
    Rng rng = make_stream(42, 0);
    std::vector<double> R_pp(n), R_pm(n), r_pp(n);
    for (int s = 0; s < n; ++s) {
        R_pp[s] = sample_bl_params(InteractionClass::poly_poly, 0.0, 0.0, 3, rng).R;
        R_pm[s] = sample_bl_params(InteractionClass::poly_mono, 0.0, 0.0, 3, rng).R;
        r_pp[s] = sample_bl_params(InteractionClass::poly_poly, 1.0, 1.0, 3, rng).r;
    }
    const double se = 0.3 / std::sqrt(double(n));
    CHECK(std::fabs(mean(R_pp) - 3.0 / 7.0) <= 4.0 * se);
    CHECK(std::fabs(mean(R_pm) - 3.0 / 5.0) <= 4.0 * se);
    CHECK(beta_fit_p_value(R_pp, 1.5, 2.0) > 0.01);
    CHECK(beta_fit_p_value(R_pm, 1.5, 1.0) > 0.01);
    CHECK(beta_fit_p_value(r_pp, 2.0, 2.0) > 0.01);
}

TEST_CASE("parameter weight norms match Beta integrals")
{
    CHECK(parameter_weight_norm(InteractionClass::mono_mono, 0, 0, 3) == doctest::Approx(1.0));
    CHECK(parameter_weight_norm(InteractionClass::poly_mono, 0, 0, 3)
          == doctest::Approx(2.0 / 3.0));
    CHECK(parameter_weight_norm(InteractionClass::poly_poly, 0, 0, 3)
          == doctest::Approx(4.0 / 15.0));
}

TEST_CASE("cold monatomic gas has no accepted collisions")
{
    const auto mix = single_species(1.0, false, 0.0, 1.0);
    Ensemble ens(1);
    for (int n = 0; n < 500; ++n)
        ens.particles[0].push_back(state({0.2, -0.1, 0.3}, 0, 0));
    ens.weight[0] = 1.0 / 500;
    const auto kernels = KernelSpec::uniform(mix, PairKernelSpec{});
    Simulator sim(kernels, mix, short_run(1.0), ens);
    const auto res = sim.run();
    CHECK(res.conservation.collisions == 0);
}

TEST_CASE("disabled kernels leave the ensemble static")
{
    const auto mix = default_mixture();
    InitialCondition ic;
    const auto ens = make_initial_ensemble(ic, mix, {300, 300, 300}, 2);
    auto cfg = short_run(0.5);
    cfg.enabled.assign(3, std::vector<bool>(3, false));
    const auto kernels = KernelSpec::uniform(mix, PairKernelSpec{});
    Simulator sim(kernels, mix, cfg, ens);
    const auto res = sim.run();
    CHECK(res.conservation.collisions == 0);
    for (std::size_t o = 0; o < res.moments.front().orders.size(); ++o)
        CHECK(res.moments.back().mixture[o] == res.moments.front().mixture[o]);
}

TEST_CASE("Maxwell pair acceptance matches the kernel to majorant ratio")
{
    // Species A and B of the default mixture interact with gamma = 0.
    const auto mix = default_mixture();
    REQUIRE(mix.gamma(0, 1) == 0.0);
    InitialCondition ic;
    const auto ens = make_initial_ensemble(ic, mix, {3000, 3000, 3000}, 5);
    const auto kernels = KernelSpec::uniform(mix, PairKernelSpec{});
    Simulator sim(kernels, mix, short_run(1.0), ens);
    const auto res = sim.run();
    const auto it = std::find_if(res.pair_stats.begin(), res.pair_stats.end(), [](const auto& s) {
        return (s.i == 0 && s.j == 1) || (s.i == 1 && s.j == 0);
    });
    REQUIRE(it != res.pair_stats.end());
    const auto& st = *it;
    REQUIRE(st.candidates > 10000);
    const double p = 0.5;
    const double sd = std::sqrt(p * (1 - p) / static_cast<double>(st.candidates));
    CHECK(std::fabs(st.acceptance() - p) <= 3.0 * sd);
}

TEST_CASE("two-temperature gas with a Maxwell cross pair equilibrates at fixed mixture energy")
{
    const auto mix = MixtureSpec::create({{"A", 1.0, SpeciesKind::monatomic, 0.0},
                                          {"B", 1.0, SpeciesKind::monatomic, 0.0}},
                                         3, {{1, 0}, {0, 1}});
    InitialCondition ic;
    ic.kind = InitialKind::two_temperature;
    ic.temperature = {0.5, 1.5};
    const auto ens = make_initial_ensemble(ic, mix, {5000, 5000}, 8);
    auto cfg = short_run(8.0);
    cfg.output_times = {0.0, 8.0};
    const auto kernels = KernelSpec::uniform(mix, PairKernelSpec{});
    Simulator sim(kernels, mix, cfg, ens);
    const auto res = sim.run();
    const auto& first = res.invariants.front();
    const auto& last = res.invariants.back();
    CHECK(first.temperature[1] - first.temperature[0] > 0.8);
    CHECK(std::fabs(last.temperature[1] - last.temperature[0]) < 0.1);
    CHECK(rel_diff(first.m2, last.m2) <= 1e-10);
    for (int i = 0; i < 2; ++i)
        CHECK(first.mass[i] == last.mass[i]);
}

TEST_CASE("single collisions conserve momentum and class energy")
{
    const auto mix = default_mixture();
    const auto spec = KernelSpec::uniform(mix, PairKernelSpec{});
    InitialCondition ic;
    ic.kind = InitialKind::heavy_tailed;
    const auto ens = make_initial_ensemble(ic, mix, {400, 400, 400}, 9);
    Simulator sim(spec, mix, short_run(0.05), ens);
    const auto before = invariants_of(sim.ensemble(), mix);
    sim.step(0.05);
    const auto after = invariants_of(sim.ensemble(), mix);
    CHECK(sim.collisions() > 0);
    CHECK(rel_diff(before.energy, after.energy) <= 1e-12);
    CHECK(norm(before.momentum - after.momentum) <= 1e-12 * before.momentum_scale);
}
