#include "polymix/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polymix/config.hpp"
#include "polymix/errors.hpp"
#include "polymix/report.hpp"
#include "polymix/verify.hpp"

namespace polymix::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<int> kmax;
    std::optional<double> tol;
    std::optional<double> k;
};

std::string utc_timestamp(std::chrono::system_clock::time_point tp)
{
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Config load(const Options& opt)
{
    Config cfg = opt.config.empty() ? parse_config(default_config_json()) : load_config(opt.config);
    if (opt.seed)
        override_seed(cfg, *opt.seed);
    if (opt.threads) {
        if (*opt.threads < 1)
            throw ConfigError("--threads must be >= 1");
        cfg.averaging.threads = *opt.threads;
        cfg.simulation.sim.threads = *opt.threads;
    }
    if (opt.kmax) {
        if (*opt.kmax < 2)
            throw ConfigError("--kmax must be >= 2");
        cfg.averaging.kmax = *opt.kmax;
    }
    if (opt.tol) {
        if (!(*opt.tol > 0.0))
            throw ConfigError("--tol must be > 0");
        cfg.averaging.tol = *opt.tol;
    }
    if (opt.k)
        cfg.moments.k = *opt.k;
    return cfg;
}

/// Output directory plus the list of files written into it.
class OutputDir {
  public:
    explicit OutputDir(const std::string& flag)
    {
        if (!flag.empty())
            root_ = flag;
        else if (const char* env = std::getenv(kOutDirEnv); env && *env)
            root_ = env;
        else
            root_ = "polymix_out";
        fs::create_directories(root_);
    }

    void write(const std::string& name, const std::string& contents)
    {
        const fs::path p = root_ / name;
        std::ofstream os(p, std::ios::binary);
        if (!os)
            throw ConfigError("cannot write " + p.string());
        os << contents;
        files_.push_back({{"name", name}, {"bytes", contents.size()}});
    }

    void write_manifest(const Config& cfg, const std::string& subcommand,
                        std::chrono::system_clock::time_point started)
    {
        json files = files_;
        files.push_back({{"name", "run_meta.json"}});
        const json meta{{"schema_version", kManifestSchemaVersion},
                        {"subcommand", subcommand},
                        {"version", POLYMIX_VERSION},
                        {"config_hash", cfg.hash},
                        {"seed", cfg.simulation.sim.seed},
                        {"seeds",
                         {{"simulation", cfg.simulation.sim.seed},
                          {"averaging", cfg.averaging.seed},
                          {"verification", cfg.verification.seed}}},
                        {"started", utc_timestamp(started)},
                        {"finished", utc_timestamp(std::chrono::system_clock::now())},
                        {"files", files}};
        const fs::path p = root_ / "run_meta.json";
        std::ofstream os(p, std::ios::binary);
        if (!os)
            throw ConfigError("cannot write " + p.string());
        os << meta.dump(2) << '\n';
    }

    [[nodiscard]] const fs::path& root() const { return root_; }

  private:
    fs::path root_;
    json files_ = json::array();
};

void print_checks(const std::vector<verify::SuiteReport>& suites, std::ostream& err)
{
    for (const auto& s : suites)
        for (const auto& c : s.checks)
            err << (c.passed ? "PASS " : "FAIL ") << '[' << s.criterion << "] " << c.name
                << " observed=" << format_number(c.observed)
                << " tolerance=" << format_number(c.tolerance) << '\n';
}

bool all_pass(const std::vector<verify::SuiteReport>& suites)
{
    for (const auto& s : suites)
        if (!s.passed())
            return false;
    return true;
}

int emit_suites(const std::vector<verify::SuiteReport>& suites, const Config& cfg,
                const std::string& subcommand, const std::string& file,
                OutputDir& dir, std::chrono::system_clock::time_point started, std::ostream& out,
                std::ostream& err)
{
    json suites_json = json::array();
    for (const auto& s : suites)
        suites_json.push_back(verify::to_json(s));
    const bool pass = all_pass(suites);
    const json report{{"schema_version", kReportSchemaVersion},
                      {"subcommand", subcommand},
                      {"config_hash", cfg.hash},
                      {"passed", pass},
                      {"suites", suites_json}};
    const std::string text = report.dump(2) + "\n";
    dir.write(file, text);
    dir.write_manifest(cfg, subcommand, started);
    out << text;
    print_checks(suites, err);
    return pass ? ok : check_failure;
}

std::string averaging_csv(const PairAveraging& p)
{
    std::ostringstream os;
    os << "k,C_k,errbar\n";
    for (std::size_t n = 0; n < p.k.size(); ++n)
        os << p.k[n] << ',' << format_number(p.C[n]) << ',' << format_number(p.error[n]) << '\n';
    return os.str();
}

int cmd_validate(const Options& opt, std::ostream& out)
{
    const Config cfg = load(opt);
    json species = json::array();
    for (int i = 0; i < cfg.mix.size(); ++i)
        species.push_back(cfg.mix.species(i).name);
    out << json{{"valid", true},
                {"config_hash", cfg.hash},
                {"species", species},
                {"dimension", cfg.mix.dim()}}
               .dump(2)
        << '\n';
    return ok;
}

int cmd_verify(const Options& opt, const std::string& sub, std::ostream& out, std::ostream& err)
{
    const auto started = std::chrono::system_clock::now();
    const Config cfg = load(opt);
    OutputDir dir(opt.out);
    std::vector<verify::SuiteReport> suites;
    std::string file;
    if (sub == "verify-kinematics") {
        suites.push_back(verify::kinematics(cfg));
        suites.push_back(verify::energy_identities(cfg));
        file = "kinematics.json";
    }
    else if (sub == "verify-kernels") {
        const KernelConstants kc = compute_kappas(cfg.kernels, cfg.mix);
        suites.push_back(verify::kernels(cfg, kc));
        file = "kernels.json";
    }
    else if (sub == "verify-averaging") {
        const KernelConstants kc = compute_kappas(cfg.kernels, cfg.mix);
        AveragingReport avg;
        suites.push_back(verify::averaging(cfg, kc, &avg));
        suites.push_back(verify::p_binomial(cfg));
        for (const auto& p : avg.pairs)
            dir.write("averaging_" + cfg.mix.species(p.i).name + "-" + cfg.mix.species(p.j).name
                          + ".csv",
                      averaging_csv(p));
        file = "averaging.json";
    }
    else {
        suites = verify::all(cfg);
        file = "verify_all.json";
    }
    return emit_suites(suites, cfg, sub, file, dir, started, out, err);
}

int cmd_moments_ode(const Options& opt, std::ostream& out)
{
    const auto started = std::chrono::system_clock::now();
    const Config cfg = load(opt);
    OutputDir dir(opt.out);
    const KernelConstants kc = compute_kappas(cfg.kernels, cfg.mix);
    const AveragingReport avg = estimate_Ck(cfg.kernels, cfg.mix, kc, cfg.averaging);
    const auto summary = verify::moments_ode(cfg, kc, avg, cfg.moments.k);
    const std::string constants = verify::to_json(summary).dump(2) + "\n";
    const std::string envelope = verify::envelope_csv(summary);
    dir.write("odi_constants.json", constants);
    dir.write("envelope.csv", envelope);
    dir.write_manifest(cfg, "moments-ode", started);
    out << constants << '\n' << envelope;
    return ok;
}

int cmd_simulate(const Options& opt, std::ostream& out)
{
    const auto started = std::chrono::system_clock::now();
    const Config cfg = load(opt);
    OutputDir dir(opt.out);
    const auto run = verify::run_simulation(cfg);
    std::ostringstream csv;
    write_moments_csv(csv, run.result, cfg.mix);
    dir.write("moments.csv", csv.str());
    json cons = to_json(run.result.conservation, cfg.mix);
    for (const auto& st : run.result.pair_stats)
        cons["pair_stats"].push_back(to_json(st, cfg.mix));
    cons["warnings"] = run.result.warnings;
    dir.write("conservation.json", cons.dump(2) + "\n");
    dir.write_manifest(cfg, "simulate", started);
    out << json{{"out", dir.root().string()},
                {"collisions", run.result.conservation.collisions},
                {"seconds", run.seconds}}
               .dump()
        << '\n';
    return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Space-homogeneous kinetic mixtures: verification and simulation toolkit",
                 "polymix"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "pipeline config (JSON); built-in default if absent");
        sub->add_option("--out", opt.out,
                        std::string("output directory; defaults to $") + kOutDirEnv
                            + " or ./polymix_out");
        sub->add_option("--seed", opt.seed, "override every seed in the config");
        sub->add_option("--threads", opt.threads, "worker threads");
        sub->add_option("--kmax", opt.kmax, "largest order of the averaging grid");
        sub->add_option("--tol", opt.tol, "quadrature tolerance of the averaging tables");
    };
    const std::vector<std::pair<std::string, std::string>> subs{
        {"validate", "parse and validate the config"},
        {"verify-kinematics", "collision maps and energy identities"},
        {"verify-kernels", "kernel constants and envelope bounds"},
        {"verify-averaging", "averaged contraction constants"},
        {"moments-ode", "moment inequality constants and envelopes"},
        {"simulate", "stochastic particle simulation"},
        {"verify-all", "every verification suite"},
    };
    for (const auto& [name, help] : subs) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub);
        if (name == "moments-ode")
            sub->add_option("--k", opt.k, "moment order; 0 selects k*");
    }

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    }
    catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return config_error;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        if (sub == "validate")
            return cmd_validate(opt, out);
        if (sub == "moments-ode")
            return cmd_moments_ode(opt, out);
        if (sub == "simulate")
            return cmd_simulate(opt, out);
        return cmd_verify(opt, sub, out, err);
    }
    catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    }
    catch (const fs::filesystem_error& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    }
    catch (const std::exception& e) {
        err << "numerical abort: " << e.what() << '\n';
        return numerical_abort;
    }
}

}  // namespace polymix::cli
