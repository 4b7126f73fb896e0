#include <doctest.h>

#include <fstream>

#include "polymix/config.hpp"
#include "polymix/errors.hpp"

using namespace polymix;
using nlohmann::json;

#ifndef POLYMIX_SOURCE_DIR
#error "POLYMIX_SOURCE_DIR must point at the source tree"
#endif

TEST_CASE("config hash ignores key order")
{
    const json a = json::parse(R"({"x": 1, "y": {"p": [1, 2], "q": "s"}})");
    const json b = json::parse(R"({"y": {"q": "s", "p": [1, 2]}, "x": 1})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    const json c = json::parse(R"({"x": 2, "y": {"p": [1, 2], "q": "s"}})");
    CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("shipped default config file equals the built-in default")
{
    std::ifstream in(std::string(POLYMIX_SOURCE_DIR) + "/configs/default.json");
    REQUIRE(in);
    const json file = json::parse(in);
    CHECK(config_hash(file) == config_hash(default_config_json()));
    const Config cfg = load_config(std::string(POLYMIX_SOURCE_DIR) + "/configs/default.json");
    CHECK(cfg.mix.size() == 3);
    CHECK(cfg.mix.dim() == 3);
    CHECK(cfg.mix.gamma_low() > 0.0);
}

TEST_CASE("default config exercises all four interaction classes and a Maxwell pair")
{
    const Config cfg = parse_config(default_config_json());
    bool classes[4] = {false, false, false, false};
    bool maxwell = false;
    for (int i = 0; i < cfg.mix.size(); ++i)
        for (int j = 0; j < cfg.mix.size(); ++j) {
            classes[static_cast<int>(cfg.mix.classify(i, j))] = true;
            maxwell = maxwell || cfg.mix.gamma(i, j) == 0.0;
        }
    for (bool c : classes)
        CHECK(c);
    CHECK(maxwell);
}

TEST_CASE("config errors name the offending field")
{
    json j = default_config_json();
    j["gamma"] = json::parse("[[0, 0, 1], [0, 0, 0], [1, 0, 1]]");
    try {
        (void)parse_config(j);
        FAIL("expected a ConfigError");
    }
    catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("'B'") != std::string::npos);
    }

    json missing = default_config_json();
    missing.erase("species");
    CHECK_THROWS_AS((void)parse_config(missing), ConfigError);

    json wrong = default_config_json();
    wrong["simulation"]["dt"] = "fast";
    CHECK_THROWS_AS((void)parse_config(wrong), ConfigError);

    json version = default_config_json();
    version["schema_version"] = 99;
    CHECK_THROWS_AS((void)parse_config(version), ConfigError);
}

TEST_CASE("seed override reaches every stochastic section")
{
    Config cfg = parse_config(default_config_json());
    override_seed(cfg, 7);
    CHECK(cfg.simulation.sim.seed == 7);
    CHECK(cfg.averaging.seed == 7);
    CHECK(cfg.verification.seed == 7);
}
