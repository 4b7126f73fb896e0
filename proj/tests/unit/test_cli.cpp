#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polymix/cli.hpp"
#include "polymix/config.hpp"

using namespace polymix;

namespace {

struct Invocation {
    int code = 0;
    std::string out, err;
};

Invocation invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "polymix");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("polymix_cli_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("validate accepts the default config")
{
    const auto r = invoke({"validate"});
    CHECK(r.code == cli::ok);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("valid") == true);
    CHECK(j.at("config_hash") == config_hash(default_config_json()));
}

TEST_CASE("validate reports the row without a positive rate")
{
    const auto dir = scratch("validate");
    auto j = default_config_json();
    j["gamma"] = nlohmann::json::parse("[[1, 0, 1], [0, 0, 0], [1, 0, 1]]");
    const auto path = dir / "bad.json";
    std::ofstream(path) << j.dump();
    const auto r = invoke({"validate", "--config", path.string()});
    CHECK(r.code == cli::config_error);
    CHECK(r.err.find("'B'") != std::string::npos);
}

TEST_CASE("unknown flags and missing files are config errors")
{
    CHECK(invoke({"validate", "--bogus"}).code == cli::config_error);
    CHECK(invoke({}).code == cli::config_error);
    CHECK(invoke({"frobnicate"}).code == cli::config_error);
    CHECK(invoke({"validate", "--config", "/nonexistent/cfg.json"}).code == cli::config_error);
    CHECK(invoke({"validate", "--threads", "0"}).code == cli::config_error);
}

TEST_CASE("simulate writes its outputs and a manifest")
{
    const auto dir = scratch("simulate");
    auto j = default_config_json();
    j["simulation"]["n_particles"] = {300, 300, 300};
    j["simulation"]["t_end"] = 0.2;
    j["simulation"]["output_times"] = {0.0, 0.1, 0.2};
    const auto cfg_path = dir / "small.json";
    std::ofstream(cfg_path) << j.dump();
    const auto r = invoke({"simulate", "--config", cfg_path.string(), "--out",
                           (dir / "out").string(), "--seed", "7"});
    REQUIRE(r.code == cli::ok);
    std::ifstream meta_in(dir / "out" / "run_meta.json");
    const auto meta = nlohmann::json::parse(meta_in);
    CHECK(meta.at("seed") == 7);
    CHECK(meta.at("subcommand") == "simulate");
    CHECK(meta.at("config_hash") == config_hash(j));
    std::vector<std::string> names;
    for (const auto& f : meta.at("files"))
        names.push_back(f.at("name"));
    for (const auto* expected : {"moments.csv", "conservation.json", "run_meta.json"}) {
        CHECK(std::find(names.begin(), names.end(), expected) != names.end());
        CHECK(std::filesystem::exists(dir / "out" / expected));
    }
    std::ifstream csv(dir / "out" / "moments.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,species,k,value,stderr");
}

TEST_CASE("output directory falls back to the environment variable")
{
    const auto dir = scratch("env");
    auto j = default_config_json();
    j["simulation"]["n_particles"] = {100, 100, 100};
    j["simulation"]["t_end"] = 0.05;
    j["simulation"]["output_times"] = {0.0, 0.05};
    const auto cfg_path = dir / "tiny.json";
    std::ofstream(cfg_path) << j.dump();
    ::setenv(cli::kOutDirEnv, (dir / "from_env").string().c_str(), 1);
    const auto r = invoke({"simulate", "--config", cfg_path.string()});
    ::unsetenv(cli::kOutDirEnv);
    CHECK(r.code == cli::ok);
    CHECK(std::filesystem::exists(dir / "from_env" / "moments.csv"));
}
