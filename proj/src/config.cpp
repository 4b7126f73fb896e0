#include "polymix/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polymix/errors.hpp"

namespace polymix {
namespace {

using nlohmann::json;

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where)
{
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    }
    catch (const json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

const json& require(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(where + " is missing required field '" + key + "'");
    return j.at(key);
}

AngularKernel parse_angular(const json& j, const std::string& where, int dim)
{
    const auto type = get_or<std::string>(j, "type", "isotropic", where);
    if (type == "isotropic")
        return AngularKernel::isotropic(get_or<double>(j, "value", 1.0, where));
    if (type == "normalized_isotropic")
        return AngularKernel::normalized_isotropic(dim);
    if (type == "power")
        return AngularKernel::power(get_or<double>(j, "coefficient", 1.0, where),
                                    get_or<double>(j, "exponent", 0.0, where),
                                    get_or<double>(j, "cutoff", 1.0, where));
    throw ConfigError(where + ".type: unknown angular kernel '" + type + "'");
}

PartitionSpec parse_partition(const json& j, const std::string& where)
{
    PartitionSpec p;
    if (j.is_number()) {
        p.value = j.get<double>();
        return p;
    }
    const auto type = get_or<std::string>(j, "type", "constant", where);
    if (type == "constant")
        p.type = PartitionType::constant;
    else if (type == "model23")
        p.type = PartitionType::model23;
    else
        throw ConfigError(where + ".type: unknown partition envelope '" + type + "'");
    p.value = get_or<double>(j, "value", 1.0, where);
    return p;
}

int species_ref(const json& j, const std::vector<SpeciesSpec>& input, const std::string& where)
{
    if (j.is_number_integer()) {
        const int i = j.get<int>();
        if (i < 0 || i >= static_cast<int>(input.size()))
            throw ConfigError(where + ": species index out of range");
        return i;
    }
    if (j.is_string()) {
        for (std::size_t i = 0; i < input.size(); ++i)
            if (input[i].name == j.get<std::string>())
                return static_cast<int>(i);
        throw ConfigError(where + ": unknown species '" + j.get<std::string>() + "'");
    }
    throw ConfigError(where + ": species must be an index or a name");
}

std::vector<double> number_list(const json& j, const std::string& where)
{
    if (!j.is_array())
        throw ConfigError(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number())
            throw ConfigError(where + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

const char* form_name(KernelForm f) { return f == KernelForm::product ? "product" : "model23"; }

json partition_json(const PartitionSpec& p)
{
    return {{"type", p.type == PartitionType::constant ? "constant" : "model23"}, {"value", p.value}};
}

}  // namespace

PairKernelSpec parse_pair_kernel(const json& j, const std::string& where)
{
    PairKernelSpec k;
    const auto form = get_or<std::string>(j, "form", "product", where);
    if (form == "product")
        k.form = KernelForm::product;
    else if (form == "model23")
        k.form = KernelForm::model23;
    else
        throw ConfigError(where + ".form: unknown kernel form '" + form + "'");
    const int dim = 3;  // replaced by the caller for normalized kernels
    if (j.contains("angular"))
        k.angular = parse_angular(j.at("angular"), where + ".angular", dim);
    if (j.contains("partition")) {
        const auto& p = j.at("partition");
        if (p.contains("lb"))
            k.lower = parse_partition(p.at("lb"), where + ".partition.lb");
        if (p.contains("ub"))
            k.upper = parse_partition(p.at("ub"), where + ".partition.ub");
    }
    return k;
}

json to_json(const PairKernelSpec& k)
{
    json ang;
    if (k.angular.is_isotropic())
        ang = {{"type", "isotropic"}, {"value", k.angular.value}};
    else
        ang = {{"type", "power"},
               {"coefficient", k.angular.coefficient},
               {"exponent", k.angular.exponent},
               {"cutoff", k.angular.cutoff}};
    return {{"form", form_name(k.form)},
            {"angular", ang},
            {"partition", {{"lb", partition_json(k.lower)}, {"ub", partition_json(k.upper)}}}};
}

std::string config_hash(const json& j)
{
    // std::map-backed objects dump with sorted keys, so the hash ignores key order.
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

static Config parse_config_checked(const json& j)
{
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    const int version = get_or<int>(j, "schema_version", kConfigSchemaVersion, "config");
    if (version != kConfigSchemaVersion)
        throw ConfigError("unsupported schema_version " + std::to_string(version));
    const int dim = get_or<int>(j, "dimension", 3, "config");

    std::vector<SpeciesSpec> input;
    const auto& sp = require(j, "species", "config");
    if (!sp.is_array())
        throw ConfigError("config.species must be an array");
    for (std::size_t n = 0; n < sp.size(); ++n) {
        const std::string where = "species[" + std::to_string(n) + "]";
        SpeciesSpec s;
        s.name = get_or<std::string>(sp[n], "name", "S" + std::to_string(n), where);
        s.mass = require(sp[n], "mass", where).get<double>();
        const auto kind = get_or<std::string>(sp[n], "kind", "monatomic", where);
        if (kind == "monatomic")
            s.kind = SpeciesKind::monatomic;
        else if (kind == "polyatomic")
            s.kind = SpeciesKind::polyatomic;
        else
            throw ConfigError(where + ".kind must be 'monatomic' or 'polyatomic'");
        s.alpha = get_or<double>(sp[n], "alpha", 0.0, where);
        input.push_back(s);
    }
    const auto& gj = require(j, "gamma", "config");
    std::vector<std::vector<double>> gamma;
    if (!gj.is_array())
        throw ConfigError("config.gamma must be a matrix");
    for (std::size_t r = 0; r < gj.size(); ++r)
        gamma.push_back(number_list(gj[r], "gamma[" + std::to_string(r) + "]"));

    Config cfg{MixtureSpec::create(input, dim, gamma)};
    const MixtureSpec& mix = cfg.mix;
    const int P = mix.size();

    const json kj = j.value("kernels", json::object());
    auto fix_dim = [&](PairKernelSpec k, const json& src) {
        if (src.contains("angular") && src.at("angular").value("type", "") == "normalized_isotropic")
            k.angular = AngularKernel::normalized_isotropic(dim);
        return k;
    };
    const json def = kj.value("default", json::object());
    const PairKernelSpec base = fix_dim(parse_pair_kernel(def, "kernels.default"), def);
    std::vector<std::vector<PairKernelSpec>> table(P, std::vector<PairKernelSpec>(P, base));
    if (kj.contains("pairs")) {
        const auto& pairs = kj.at("pairs");
        if (!pairs.is_array())
            throw ConfigError("kernels.pairs must be an array");
        for (std::size_t n = 0; n < pairs.size(); ++n) {
            const std::string where = "kernels.pairs[" + std::to_string(n) + "]";
            const auto& pr = require(pairs[n], "pair", where);
            if (!pr.is_array() || pr.size() != 2)
                throw ConfigError(where + ".pair must list two species");
            const int a = mix.normalized_index(species_ref(pr[0], input, where));
            const int b = mix.normalized_index(species_ref(pr[1], input, where));
            const auto k = fix_dim(parse_pair_kernel(pairs[n], where), pairs[n]);
            if (pairs[n].contains("gamma")) {
                const double g = pairs[n].at("gamma").get<double>();
                if (g != mix.gamma(a, b))
                    throw ConfigError(where + ".gamma disagrees with the rate matrix entry");
            }
            table[a][b] = k;
            table[b][a] = k;
        }
    }
    cfg.kernels = KernelSpec::create(mix, table);

    const json av = j.value("averaging", json::object());
    cfg.averaging.kmax = get_or<int>(av, "kmax", 1024, "averaging");
    cfg.averaging.strata_per_axis = get_or<int>(av, "strata_per_axis", 4, "averaging");
    cfg.averaging.tol = get_or<double>(av, "tol", 1e-9, "averaging");
    cfg.averaging.seed = get_or<std::uint64_t>(av, "seed", 1, "averaging");
    cfg.averaging.threads = get_or<int>(av, "threads", 1, "averaging");
    cfg.averaging.fit_lo = get_or<double>(av, "fit_lo", 16.0, "averaging");
    cfg.averaging.fit_hi = get_or<double>(av, "fit_hi", 256.0, "averaging");
    if (cfg.averaging.kmax < 2 || cfg.averaging.strata_per_axis < 1 || !(cfg.averaging.tol > 0.0))
        throw ConfigError("averaging: kmax >= 2, strata_per_axis >= 1 and tol > 0 required");

    const json mo = j.value("moments", json::object());
    cfg.moments.k = get_or<double>(mo, "k", 0.0, "moments");
    if (mo.contains("t_samples"))
        cfg.moments.t_samples = number_list(mo.at("t_samples"), "moments.t_samples");
    else
        cfg.moments.t_samples = {0.01, 0.1, 1.0, 10.0, 100.0};
    cfg.moments.C_star = get_or<double>(mo, "C_star", 0.0, "moments");
    cfg.moments.uniform_in_time = get_or<bool>(mo, "uniform_in_time", true, "moments");

    const json si = j.value("simulation", json::object());
    auto& sim = cfg.simulation;
    if (si.contains("n_particles")) {
        for (double x : number_list(si.at("n_particles"), "simulation.n_particles"))
            sim.n_particles.push_back(static_cast<int>(x));
        if (static_cast<int>(sim.n_particles.size()) != P)
            throw ConfigError("simulation.n_particles must list one count per species");
        // Stored in normalized species order.
        std::vector<int> reordered(P);
        for (int i = 0; i < P; ++i)
            reordered[i] = sim.n_particles[mix.input_index(i)];
        sim.n_particles = reordered;
    }
    else {
        sim.n_particles.assign(P, 1000);
    }
    sim.sim.dt = get_or<double>(si, "dt", 0.01, "simulation");
    sim.sim.t_end = get_or<double>(si, "t_end", 1.0, "simulation");
    if (!(sim.sim.dt > 0.0) || !(sim.sim.t_end > 0.0))
        throw ConfigError("simulation: dt > 0 and t_end > 0 required");
    if (si.contains("output_times"))
        sim.sim.output_times = number_list(si.at("output_times"), "simulation.output_times");
    else
        sim.sim.output_times = {0.0, sim.sim.t_end};
    sim.sim.seed = get_or<std::uint64_t>(si, "seed", 1, "simulation");
    if (si.contains("orders"))
        sim.sim.orders = number_list(si.at("orders"), "simulation.orders");
    for (double need : {0.0, 2.0, mix.gamma_high()})
        if (std::find(sim.sim.orders.begin(), sim.sim.orders.end(), need) == sim.sim.orders.end())
            sim.sim.orders.push_back(need);
    std::sort(sim.sim.orders.begin(), sim.sim.orders.end());
    sim.sim.refresh_interval = get_or<int>(si, "refresh_interval", 10, "simulation");
    sim.sim.threads = get_or<int>(si, "threads", 1, "simulation");
    if (si.contains("collisions_enabled")) {
        const auto& t = si.at("collisions_enabled");
        std::vector<std::vector<bool>> on(P, std::vector<bool>(P, true));
        if (t.is_boolean()) {
            for (auto& row : on)
                std::fill(row.begin(), row.end(), t.get<bool>());
        }
        else {
            if (!t.is_array() || static_cast<int>(t.size()) != P)
                throw ConfigError("simulation.collisions_enabled must be a boolean or P x P table");
            for (int a = 0; a < P; ++a)
                for (int b = 0; b < P; ++b)
                    on[mix.normalized_index(a)][mix.normalized_index(b)] = t[a].at(b).get<bool>();
        }
        sim.sim.enabled = on;
    }
    const json ic = si.value("initial", json::object());
    sim.initial.kind = parse_initial_kind(get_or<std::string>(ic, "kind", "maxwellian", "simulation.initial"));
    if (ic.contains("temperature")) {
        const auto& t = ic.at("temperature");
        std::vector<double> temps = t.is_number() ? std::vector<double>{t.get<double>()}
                                                  : number_list(t, "simulation.initial.temperature");
        if (temps.size() == static_cast<std::size_t>(P)) {
            std::vector<double> reordered(P);
            for (int i = 0; i < P; ++i)
                reordered[i] = temps[mix.input_index(i)];
            temps = reordered;
        }
        sim.initial.temperature = temps;
    }
    if (ic.contains("species_mass")) {
        const auto m = number_list(ic.at("species_mass"), "simulation.initial.species_mass");
        if (static_cast<int>(m.size()) != P)
            throw ConfigError("simulation.initial.species_mass must list one value per species");
        sim.initial.species_mass.resize(P);
        for (int i = 0; i < P; ++i)
            sim.initial.species_mass[i] = m[mix.input_index(i)];
    }
    sim.initial.student_nu = get_or<double>(ic, "nu", 13.0, "simulation.initial");
    sim.initial.pareto_shape = get_or<double>(ic, "pareto_shape", 6.5, "simulation.initial");
    if (!(sim.initial.student_nu > 2.0) || !(sim.initial.pareto_shape > 1.0))
        throw ConfigError("simulation.initial: nu > 2 and pareto_shape > 1 required");

    const json ve = j.value("verification", json::object());
    auto& v = cfg.verification;
    v.kinematics_samples = get_or<long>(ve, "kinematics_samples", v.kinematics_samples, "verification");
    v.energy_samples = get_or<long>(ve, "energy_samples", v.energy_samples, "verification");
    v.kernel_samples = get_or<long>(ve, "kernel_samples", v.kernel_samples, "verification");
    v.gain_pairs = get_or<long>(ve, "gain_pairs", v.gain_pairs, "verification");
    v.binomial_samples = get_or<long>(ve, "binomial_samples", v.binomial_samples, "verification");
    v.comparison_configs = get_or<int>(ve, "comparison_configs", v.comparison_configs, "verification");
    v.seed = get_or<std::uint64_t>(ve, "seed", v.seed, "verification");

    cfg.raw = j;
    cfg.hash = config_hash(j);
    return cfg;
}

Config parse_config(const json& j)
{
    try {
        return parse_config_checked(j);
    }
    catch (const json::exception& e) {
        throw ConfigError(std::string("config has a field of the wrong type: ") + e.what());
    }
}

Config load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    }
    catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json default_config_json()
{
    return json::parse(R"({
  "schema_version": 1,
  "dimension": 3,
  "species": [
    {"name": "A", "mass": 1.0, "kind": "monatomic"},
    {"name": "B", "mass": 2.0, "kind": "monatomic"},
    {"name": "C", "mass": 3.0, "kind": "polyatomic", "alpha": 1.0}
  ],
  "gamma": [[1, 0, 1], [0, 2, 1], [1, 1, 1]],
  "kernels": {
    "default": {
      "form": "product",
      "angular": {"type": "isotropic", "value": 1.0},
      "partition": {"lb": {"type": "constant", "value": 1.0},
                    "ub": {"type": "constant", "value": 1.0}}
    }
  },
  "averaging": {"kmax": 1024, "strata_per_axis": 4, "tol": 1e-9, "seed": 1, "threads": 1},
  "moments": {"k": 0, "t_samples": [0.01, 0.1, 1, 10, 100], "uniform_in_time": true},
  "simulation": {
    "n_particles": [33334, 33333, 33333],
    "dt": 0.005,
    "t_end": 5.0,
    "output_times": [0, 0.05, 0.1, 0.25, 0.5, 1, 2, 3, 4, 5],
    "seed": 7,
    "orders": [0, 1, 2, 3, 4, 6, 8, 12, 24, 26],
    "refresh_interval": 10,
    "initial": {"kind": "heavy_tailed", "temperature": 1.0, "nu": 13, "pareto_shape": 6.5}
  },
  "verification": {
    "kinematics_samples": 1000000, "energy_samples": 1000000, "kernel_samples": 1000000,
    "gain_pairs": 10000, "binomial_samples": 1000000, "comparison_configs": 100,
    "seed": 20240601
  }
})");
}

void override_seed(Config& cfg, std::uint64_t seed)
{
    cfg.averaging.seed = seed;
    cfg.simulation.sim.seed = seed;
    cfg.verification.seed = seed;
}

}  // namespace polymix
