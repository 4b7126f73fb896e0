#include <doctest.h>

#include "fixtures.hpp"
#include "polymix/errors.hpp"
#include "polymix/kernels.hpp"

using namespace polymix;
using namespace polymix::test;

TEST_CASE("bracket of simple states")
{
    const auto mono = single_species(1.0, false);
    CHECK(bracket(state({0, 0, 0}, 0, 0), mono) == doctest::Approx(1.0));
    CHECK(bracket(state({1, 1, 0}, 0, 0), mono) == doctest::Approx(std::sqrt(2.0)));

    // m_i/(2m)|v|^2 = 1 and I/m = 2 with m_i = m = 2.
    const auto poly = single_species(2.0, true, 1.0);
    CHECK(bracket(state({1, 1, 0}, 4.0, 0), poly) == doctest::Approx(2.0));
}

TEST_CASE("pair frame of symmetric pairs")
{
    const auto mix = pair_mixture(1.5, false, 1.5, false);
    const Vec v{0.3, -0.2, 0.7};
    const auto f = pair_frame(state(v, 0, 0), state(-v, 0, 1), mix);
    CHECK(norm(f.V) == doctest::Approx(0.0));
    CHECK(norm(f.u - 2.0 * v) == doctest::Approx(0.0));
    CHECK(f.energy == doctest::Approx(0.5 * f.mu * norm_sq(2.0 * v)));
    CHECK(f.s == doctest::Approx(0.5));
    CHECK(f.s_bar == doctest::Approx(0.5));

    const auto pp = pair_mixture(1.0, true, 2.0, true, 0.5, 1.5);
    const Vec w{0.1, 0.2, 0.3};
    const auto g = pair_frame(state(w, 0.4, 0), state(w, 1.1, 1), pp);
    CHECK(g.energy == doctest::Approx(1.5));
}

TEST_CASE("pair bracket energy at rest and from center-of-mass variables")
{
    const auto mix = default_mixture();
    CHECK(pair_bracket_energy(state({0, 0, 0}, 0, 0), state({0, 0, 0}, 0, 2), mix)
          == doctest::Approx(2.0));

    Rng rng = make_stream(11, 0);
    double worst = 0.0;
    for (int n = 0; n < 20000; ++n) {
        const int i = n % 3, j = (n / 3) % 3;
        const auto a = random_test_state(rng, i, mix);
        const auto b = random_test_state(rng, j, mix);
        worst = std::max(worst, rel_diff(pair_bracket_energy(a, b, mix),
                                         pair_bracket_energy(pair_frame(a, b, mix), mix)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("mixture validation rejects rows without a positive rate")
{
    CHECK_THROWS_AS(MixtureSpec::create({{"A", 1.0, SpeciesKind::monatomic, 0.0},
                                         {"B", 1.0, SpeciesKind::monatomic, 0.0}},
                                        3, {{1, 0}, {0, 0}}),
                    ConfigError);
    CHECK_THROWS_AS(single_species(-1.0, false), ConfigError);
}

TEST_CASE("species are normalized monatomic first")
{
    const auto mix = MixtureSpec::create({{"P", 3.0, SpeciesKind::polyatomic, 1.0},
                                          {"M", 1.0, SpeciesKind::monatomic, 0.0}},
                                         3, {{1, 2}, {2, 0}});
    CHECK(mix.species(0).name == "M");
    CHECK(mix.input_index(0) == 1);
    CHECK(mix.gamma(0, 0) == 0.0);
    CHECK(mix.gamma(0, 1) == 2.0);
    CHECK(mix.classify(1, 0) == InteractionClass::poly_mono);
}
