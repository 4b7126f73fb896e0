#include <doctest.h>

#include "fixtures.hpp"
#include "polymix/averaging.hpp"
#include "polymix/config.hpp"

using namespace polymix;
using namespace polymix::test;

namespace {

struct DefaultSetup {
    Config cfg = parse_config(default_config_json());
    KernelConstants kc = compute_kappas(cfg.kernels, cfg.mix);
};

}  // namespace

TEST_CASE("zeroth power of the contraction average is kappa_ub")
{
    const DefaultSetup s;
    const auto& mix = s.cfg.mix;
    Rng rng = make_stream(2, 0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const auto& k = s.cfg.kernels.pair(i, j);
            const auto in = SplitInputs::from_states(random_test_state(rng, i, mix),
                                                     random_test_state(rng, j, mix), mix);
            CHECK(averaged_contraction(k, 0.0, in, PairSide::first).value
                  == doctest::Approx(s.kc.kappa_ub(i, j)).epsilon(1e-8));
        }
}

TEST_CASE("quadrature and Monte-Carlo averages agree")
{
    const DefaultSetup s;
    const auto& mix = s.cfg.mix;
    Rng rng = make_stream(6, 1);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (double power : {1.0, 4.0, 16.0}) {
                const auto& k = s.cfg.kernels.pair(i, j);
                const auto in = SplitInputs::from_states(random_test_state(rng, i, mix),
                                                         random_test_state(rng, j, mix), mix);
                for (auto side : {PairSide::first, PairSide::second}) {
                    const auto q = averaged_contraction(k, power, in, side);
                    const auto mc = averaged_contraction_mc(k, power, in, side, 200000,
                                                            static_cast<std::uint64_t>(i * 9 + j));
                    CAPTURE(i);
                    CAPTURE(j);
                    CAPTURE(power);
                    CHECK(std::fabs(q.value - mc.value) <= 4.0 * mc.error + 1e-12);
                }
            }
}

TEST_CASE("contraction average is nonincreasing in the power")
{
    const DefaultSetup s;
    const auto& mix = s.cfg.mix;
    Rng rng = make_stream(7, 2);
    for (int n = 0; n < 30; ++n) {
        const int i = n % 3, j = (n / 3) % 3;
        const auto& k = s.cfg.kernels.pair(i, j);
        const auto in = SplitInputs::from_states(random_test_state(rng, i, mix),
                                                 random_test_state(rng, j, mix), mix);
        double prev = INFINITY;
        for (double power : {0.0, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0}) {
            const double v = averaged_contraction(k, power, in, PairSide::first).value;
            CHECK(v <= prev * (1.0 + 1e-9));
            prev = v;
        }
    }
}

TEST_CASE("gain average at powers zero and two")
{
    const DefaultSetup s;
    const auto& mix = s.cfg.mix;
    Rng rng = make_stream(9, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const auto a = random_test_state(rng, i, mix);
            const auto b = random_test_state(rng, j, mix);
            const auto& k = s.cfg.kernels.pair(i, j);
            CHECK(gain_average(k, 0.0, a, b, mix).value
                  == doctest::Approx(2.0 * s.kc.kappa_ub(i, j)).epsilon(1e-8));
            CHECK(gain_average(k, 2.0, a, b, mix).value
                  == doctest::Approx(s.kc.kappa_ub(i, j) * pair_bracket_energy(a, b, mix))
                         .epsilon(1e-8));
        }
}

TEST_CASE("threshold order of the default kernels")
{
    const DefaultSetup s;
    const auto avg = estimate_Ck(s.cfg.kernels, s.cfg.mix, s.kc, s.cfg.averaging);
    REQUIRE(avg.threshold_reached);
    CHECK(avg.k_bar_star == 24);
    for (const auto& p : avg.pairs) {
        CHECK(p.monotone);
        CHECK(p.C.front() == doctest::Approx(p.kappa_ub));
        REQUIRE(p.k_bar_star);
        CHECK(p.C_at(*p.k_bar_star) < 0.5 * p.kappa_lb);
    }

    // Scaling the angular kernel scales both sides of the threshold condition.
    auto doubled = s.cfg.raw;
    doubled["kernels"]["default"]["angular"]["value"] = 2.0;
    const Config cfg2 = parse_config(doubled);
    const auto kc2 = compute_kappas(cfg2.kernels, cfg2.mix);
    const auto avg2 = estimate_Ck(cfg2.kernels, cfg2.mix, kc2, cfg2.averaging);
    CHECK(avg2.k_bar_star == avg.k_bar_star);
}

TEST_CASE("p-binomial inequality")
{
    CHECK(p_binomial_check(1.0, 1.0, 2.0));
    CHECK(p_binomial_check(1e-300, 3.0, 5.0));
    Rng rng = make_stream(10, 4);
    long violations = 0;
    for (int n = 0; n < 100000; ++n) {
        const double x = log_uniform(rng, 1e-6, 1e6), y = log_uniform(rng, 1e-6, 1e6);
        const double p = 1.0 + 63.0 * (1.0 - uniform01(rng));
        violations += !p_binomial_check(x, y, p);
    }
    CHECK(violations == 0);
    CHECK(c_tilde(3.0) == doctest::Approx(std::pow(2.0, 2.5)));
}

TEST_CASE("decay fit recovers a known power law")
{
    std::vector<int> k;
    std::vector<double> c;
    for (int x = 16; x <= 256; x *= 2) {
        k.push_back(x);
        c.push_back(3.0 / std::sqrt(x));
    }
    const auto fit = fit_decay(k, c, 16, 256);
    CHECK(fit.slope == doctest::Approx(-0.5));
    CHECK(fit.points == 5);
}
