#include "polymix/report.hpp"

#include <charconv>
#include <cmath>

namespace polymix {

std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

void write_moments_csv(std::ostream& os, const RunResult& run, const MixtureSpec& mix)
{
    os << "t,species,k,value,stderr\n";
    for (std::size_t s = 0; s < run.times.size(); ++s) {
        const auto& mom = run.moments[s];
        const std::string t = format_number(run.times[s]);
        for (int i = 0; i < mom.n_species(); ++i)
            for (std::size_t o = 0; o < mom.orders.size(); ++o)
                os << t << ',' << mix.species(i).name << ',' << format_number(mom.orders[o])
                   << ',' << format_number(mom.species[i][o]) << ','
                   << format_number(mom.species_error[i][o]) << '\n';
        for (std::size_t o = 0; o < mom.orders.size(); ++o)
            os << t << ",mixture," << format_number(mom.orders[o]) << ','
               << format_number(mom.mixture[o]) << ',' << format_number(mom.mixture_error[o])
               << '\n';
    }
}

namespace {
nlohmann::json per_species(const std::vector<double>& values, const MixtureSpec& mix)
{
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < values.size(); ++i)
        j[mix.species(static_cast<int>(i)).name] = values[i];
    return j;
}
}  // namespace

nlohmann::json to_json(const Invariants& inv, const MixtureSpec& mix)
{
    nlohmann::json momentum = nlohmann::json::array();
    for (int k = 0; k < inv.momentum.dim(); ++k)
        momentum.push_back(inv.momentum[k]);
    nlohmann::json j{{"mass", per_species(inv.mass, mix)},
                     {"m2", inv.m2},
                     {"energy", inv.energy},
                     {"momentum", momentum},
                     {"momentum_scale", inv.momentum_scale},
                     {"temperature", per_species(inv.temperature, mix)}};
    nlohmann::json internal = nlohmann::json::object();
    for (std::size_t i = 0; i < inv.internal_temperature.size(); ++i)
        if (mix.is_poly(static_cast<int>(i)))
            internal[mix.species(static_cast<int>(i)).name] = inv.internal_temperature[i];
    j["internal_temperature"] = internal;
    return j;
}

nlohmann::json to_json(const ConservationReport& rep, const MixtureSpec& mix)
{
    return {{"schema_version", kReportSchemaVersion},
            {"initial", to_json(rep.initial, mix)},
            {"final", to_json(rep.final_state, mix)},
            {"masses_exact", rep.masses_exact},
            {"m2_drift_rel", rep.m2_drift_rel},
            {"max_m2_drift_rel", rep.max_m2_drift_rel},
            {"momentum_drift_rel", rep.momentum_drift_rel},
            {"collisions", rep.collisions}};
}

nlohmann::json to_json(const PairStats& st, const MixtureSpec& mix)
{
    return {{"pair", {mix.species(st.i).name, mix.species(st.j).name}},
            {"candidates", st.candidates},
            {"accepted", st.accepted},
            {"acceptance", st.acceptance()},
            {"cap_raises", st.cap_raises}};
}

}  // namespace polymix
