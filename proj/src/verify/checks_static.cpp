#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <numbers>

#include "polymix/dsmc.hpp"
#include "polymix/errors.hpp"
#include "polymix/oracles/oracles.hpp"
#include "polymix/verify.hpp"
#include "verify_util.hpp"

namespace polymix::verify {

nlohmann::json to_json(const SuiteReport& r)
{
    return {{"criterion", r.criterion}, {"name", r.name},         {"passed", r.passed()},
            {"seconds", r.seconds},     {"checks", polymix::to_json(r.checks)}, {"data", r.data}};
}

namespace detail {

std::string label(int i, int j, const MixtureSpec& mix)
{
    return mix.species(i).name + "-" + mix.species(j).name;
}

std::vector<std::pair<int, int>> pairs_of_class(const MixtureSpec& mix, InteractionClass cls)
{
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < mix.size(); ++i)
        for (int j = 0; j < mix.size(); ++j)
            if (mix.classify(i, j) == cls)
                out.emplace_back(i, j);
    return out;
}

nlohmann::json matrix_json(const Matrix& m, const MixtureSpec& mix)
{
    nlohmann::json j = nlohmann::json::object();
    for (int a = 0; a < m.n; ++a)
        for (int b = 0; b < m.n; ++b)
            j[label(a, b, mix)] = m(a, b);
    return j;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

using detail::label;
using detail::pairs_of_class;
using detail::seconds_since;

namespace {

constexpr std::array kClasses{InteractionClass::mono_mono, InteractionClass::poly_poly,
                              InteractionClass::poly_mono, InteractionClass::mono_poly};

// States of moderate spread for the finite-difference comparison, where
// step-size error rather than conditioning should dominate.
ParticleState fd_state(Rng& rng, int species, const MixtureSpec& mix)
{
    ParticleState s;
    s.species = species;
    s.v = normal_vec(rng, mix.dim(), log_uniform(rng, 0.3, 3.0));
    if (mix.is_poly(species))
        s.internal = mix.total_mass() * log_uniform(rng, 0.1, 10.0);
    return s;
}

double pair_lab_energy(const ParticleState& a, const ParticleState& b, const MixtureSpec& mix)
{
    return 0.5 * mix.mass(a.species) * norm_sq(a.v) + 0.5 * mix.mass(b.species) * norm_sq(b.v)
           + a.internal + b.internal;
}

struct MapErrors {
    double involution = 0.0;
    double momentum = 0.0;
    double energy = 0.0;
};

MapErrors map_errors(const ParticleState& a, const ParticleState& b, const CollisionParams& p,
                     const CollisionOutcome& o, const MixtureSpec& mix)
{
    MapErrors e;
    const double ma = mix.mass(a.species), mb = mix.mass(b.species);
    const double energy = pair_lab_energy(a, b, mix);
    const double speed = std::max(norm(a.v) + norm(b.v), norm(o.a_out.v) + norm(o.b_out.v));
    const double mom_scale = std::max(ma * norm(a.v) + mb * norm(b.v),
                                      ma * norm(o.a_out.v) + mb * norm(o.b_out.v));

    const Vec dp = (ma * o.a_out.v + mb * o.b_out.v) - (ma * a.v + mb * b.v);
    e.momentum = mom_scale > 0.0 ? norm(dp) / mom_scale : norm(dp);
    e.energy = std::fabs(pair_lab_energy(o.a_out, o.b_out, mix) - energy) / energy;

    const auto back = collide(o.a_out, o.b_out, o.primed, mix);
    if (back.is_null())
        return {INFINITY, e.momentum, e.energy};
    double err = std::max(norm(back.a_out.v - a.v), norm(back.b_out.v - b.v)) / speed;
    err = std::max(err, (std::fabs(back.a_out.internal - a.internal)
                         + std::fabs(back.b_out.internal - b.internal))
                            / energy);
    err = std::max(err, norm(back.primed.sigma - p.sigma));
    const auto cls = mix.classify(a.species, b.species);
    if (cls != InteractionClass::mono_mono)
        err = std::max(err, std::fabs(back.primed.R - p.R));
    if (cls == InteractionClass::poly_poly)
        err = std::max(err, std::fabs(back.primed.r - p.r));
    e.involution = err;
    return e;
}

// Coordinates whose marginal histograms are compared before and after the map.
struct Marginal {
    std::string name;
    double lo, hi;
};

std::vector<Marginal> marginals_for(InteractionClass cls, int d)
{
    std::vector<Marginal> m{{"v_a[0]", -3.0, 3.0},
                            {"v_b[1]", -3.0, 3.0},
                            {"|v_a - v_b|", 0.0, 6.0 * std::sqrt(static_cast<double>(d))},
                            {"sigma[0]", -1.0, 1.0}};
    if (cls == InteractionClass::poly_poly || cls == InteractionClass::poly_mono)
        m.push_back({"I_a", 0.0, 5.0});
    if (cls == InteractionClass::poly_poly || cls == InteractionClass::mono_poly)
        m.push_back({"I_b", 0.0, 5.0});
    if (cls != InteractionClass::mono_mono)
        m.push_back({"R", 0.0, 1.0});
    if (cls == InteractionClass::poly_poly)
        m.push_back({"r", 0.0, 1.0});
    return m;
}

std::vector<double> coordinates(InteractionClass cls, const ParticleState& a,
                                const ParticleState& b, const CollisionParams& p)
{
    std::vector<double> x{a.v[0], b.v[1], norm(a.v - b.v), p.sigma[0]};
    if (cls == InteractionClass::poly_poly || cls == InteractionClass::poly_mono)
        x.push_back(a.internal);
    if (cls == InteractionClass::poly_poly || cls == InteractionClass::mono_poly)
        x.push_back(b.internal);
    if (cls != InteractionClass::mono_mono)
        x.push_back(p.R);
    if (cls == InteractionClass::poly_poly)
        x.push_back(p.r);
    return x;
}

bool in_window(const ParticleState& s)
{
    for (int k = 0; k < s.v.dim(); ++k)
        if (std::fabs(s.v[k]) > 3.0)
            return false;
    return s.internal <= 5.0;
}

// Paired sign-flip statistic: under invariance (x, x') and (x', x) have the
// same law on {x, x' in window}, so the bin-count difference vector D has
// mean zero and covariance estimated by the sum of outer products of the
// per-sample differences. D^T S^+ D is asymptotically chi-square.
struct PairedHistogram {
    int bins;
    Eigen::VectorXd diff;
    Eigen::MatrixXd cov;
    explicit PairedHistogram(int n) : bins{n}, diff{Eigen::VectorXd::Zero(n)}, cov{Eigen::MatrixXd::Zero(n, n)} {}

    void add(int before, int after)
    {
        if (before == after)
            return;
        diff[before] += 1.0;
        diff[after] -= 1.0;
        cov(before, before) += 1.0;
        cov(after, after) += 1.0;
        cov(before, after) -= 1.0;
        cov(after, before) -= 1.0;
    }

    // Returns (statistic, degrees of freedom).
    [[nodiscard]] std::pair<double, int> statistic() const
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        const auto& ev = es.eigenvalues();
        const double cut = 1e-9 * std::max(1.0, ev.maxCoeff());
        double stat = 0.0;
        int rank = 0;
        for (int k = 0; k < bins; ++k)
            if (ev[k] > cut) {
                const double proj = es.eigenvectors().col(k).dot(diff);
                stat += proj * proj / ev[k];
                ++rank;
            }
        return {stat, rank};
    }
};

int bin_of(double x, const Marginal& m, int bins)
{
    const int b = static_cast<int>(std::floor((x - m.lo) / (m.hi - m.lo) * bins));
    return std::clamp(b, 0, bins - 1);
}

// Two-sided Gaussian 3 sigma tail probability.
constexpr double kThreeSigmaP = 0.0026997960632601866;

}  // namespace

std::vector<CheckResult> measure_invariance(const MixtureSpec& mix, int i, int j, long n,
                                            std::uint64_t seed, nlohmann::json* data)
{
    const int d = mix.dim();
    const auto cls = mix.classify(i, j);
    const auto marg = marginals_for(cls, d);
    constexpr int kBins = 20;
    std::vector<PairedHistogram> hist(marg.size(), PairedHistogram(kBins));
    Rng rng = make_stream(seed, 500 + static_cast<std::uint64_t>(i * mix.size() + j));

    auto draw_state = [&](int species) {
        ParticleState s;
        s.species = species;
        s.v = Vec(d);
        for (int k = 0; k < d; ++k)
            s.v[k] = uniform(rng, -3.0, 3.0);
        if (mix.is_poly(species))
            s.internal = 5.0 * std::pow(uniform01(rng), 1.0 / (mix.alpha(species) + 1.0));
        return s;
    };

    long kept = 0;
    for (long s = 0; s < n; ++s) {
        const auto a = draw_state(i);
        const auto b = draw_state(j);
        auto p = sample_bl_params(cls, mix.alpha(i), mix.alpha(j), d, rng);
        p.sigma = uniform_sphere(rng, d);
        const auto o = collide(a, b, p, mix);
        if (o.is_null() || !in_window(o.a_out) || !in_window(o.b_out))
            continue;
        ++kept;
        const auto x = coordinates(cls, a, b, p);
        const auto y = coordinates(cls, o.a_out, o.b_out, o.primed);
        for (std::size_t m = 0; m < marg.size(); ++m)
            hist[m].add(bin_of(x[m], marg[m], kBins), bin_of(y[m], marg[m], kBins));
    }

    std::vector<CheckResult> out;
    nlohmann::json rows = nlohmann::json::array();
    double worst_p = 1.0;
    std::string worst;
    for (std::size_t m = 0; m < marg.size(); ++m) {
        const auto [stat, dof] = hist[m].statistic();
        double pval = 1.0;
        if (dof > 0)
            pval = boost::math::cdf(boost::math::complement(
                boost::math::chi_squared_distribution<double>(dof), stat));
        rows.push_back({{"marginal", marg[m].name}, {"statistic", stat}, {"dof", dof},
                        {"p_value", pval}});
        if (pval < worst_p) {
            worst_p = pval;
            worst = marg[m].name;
        }
    }
    if (data)
        (*data)[label(i, j, mix)] = {{"kept", kept}, {"marginals", rows}};
    out.push_back(check_ge("measure invariance " + label(i, j, mix) + " " + to_string(cls),
                           worst_p, kThreeSigmaP, kept,
                           "min p-value over 20-bin marginals (worst: " + worst + ")"));
    return out;
}

SuiteReport kinematics(const Config& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    const MixtureSpec& mix = cfg.mix;
    const long n = cfg.verification.kinematics_samples;
    SuiteReport rep;
    rep.criterion = 1;
    rep.name = "kinematics";

    for (auto cls : kClasses) {
        const auto pairs = pairs_of_class(mix, cls);
        const std::string cname = to_string(cls);
        if (pairs.empty()) {
            rep.data["skipped_classes"].push_back(cname);
            continue;
        }
        Rng rng = make_stream(cfg.verification.seed, 10 + static_cast<std::uint64_t>(cls));
        MapErrors worst;
        long nulls = 0;
        for (long s = 0; s < n; ++s) {
            const auto [i, j] = pairs[static_cast<std::size_t>(s) % pairs.size()];
            const auto a = random_test_state(rng, i, mix);
            const auto b = random_test_state(rng, j, mix);
            const auto p = random_test_params(rng, mix);
            const auto o = collide(a, b, p, mix);
            if (o.is_null()) {
                ++nulls;
                continue;
            }
            const auto e = map_errors(a, b, p, o, mix);
            worst.involution = std::max(worst.involution, e.involution);
            worst.momentum = std::max(worst.momentum, e.momentum);
            worst.energy = std::max(worst.energy, e.energy);
        }
        rep.checks.push_back(check_le("involution round trip " + cname, worst.involution, 1e-10,
                                      n, "max relative error of states and parameters"));
        rep.checks.push_back(check_le("momentum conservation " + cname, worst.momentum, 1e-10, n,
                                      "max |dP| / sum m|v|"));
        rep.checks.push_back(check_le("energy conservation " + cname, worst.energy, 1e-10, n,
                                      "max |dE| / E"));

        Rng frng = make_stream(cfg.verification.seed, 20 + static_cast<std::uint64_t>(cls));
        double worst_jac = 0.0;
        long degenerate = 0;
        for (long s = 0; s < n; ++s) {
            const auto [i, j] = pairs[static_cast<std::size_t>(s) % pairs.size()];
            const auto a = fd_state(frng, i, mix);
            const auto b = fd_state(frng, j, mix);
            const auto p = random_test_params(frng, mix);
            const auto o = collide(a, b, p, mix);
            if (o.is_null())
                continue;
            try {
                const double exact = jacobian(p, o.primed, cls, mix.dim());
                const double fd = oracle::fd_jacobian(a, b, p, mix);
                worst_jac = std::max(worst_jac, std::fabs(fd - exact) / exact);
            }
            catch (const std::domain_error&) {
                ++degenerate;
            }
        }
        rep.checks.push_back(check_le("jacobian vs finite differences " + cname, worst_jac, 1e-6,
                                      n, "max relative difference; degenerate draws skipped: "
                                             + std::to_string(degenerate)));
        rep.data["null_collisions"][cname] = nulls;

        for (auto [i, j] : pairs) {
            auto c = measure_invariance(mix, i, j, n / static_cast<long>(pairs.size()),
                                        cfg.verification.seed, &rep.data["measure_invariance"]);
            rep.checks.insert(rep.checks.end(), c.begin(), c.end());
        }
    }
    rep.seconds = seconds_since(t0);
    rep.checks.push_back(check_le("kinematics runtime [s]", rep.seconds, 60.0));
    return rep;
}

SuiteReport energy_identities(const Config& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    const MixtureSpec& mix = cfg.mix;
    const long n = cfg.verification.energy_samples;
    SuiteReport rep;
    rep.criterion = 2;
    rep.name = "energy identities";

    for (auto cls : kClasses) {
        const auto pairs = pairs_of_class(mix, cls);
        if (pairs.empty())
            continue;
        const std::string cname = to_string(cls);
        Rng rng = make_stream(cfg.verification.seed, 30 + static_cast<std::uint64_t>(cls));
        double convex = 0.0, recon = 0.0, estimate = -INFINITY, lambda = -INFINITY,
               share = -INFINITY;
        for (long s = 0; s < n; ++s) {
            const auto [i, j] = pairs[static_cast<std::size_t>(s) % pairs.size()];
            const auto a = random_test_state(rng, i, mix);
            const auto b = random_test_state(rng, j, mix);
            const auto p = random_test_params(rng, mix);
            const auto sp = energy_split(a, b, p, mix);
            const double sum = cls == InteractionClass::mono_mono ? sp.p + sp.q
                                                                   : sp.p_t + sp.q_t + sp.t_t;
            convex = std::max(convex, std::fabs(sum - 1.0));
            lambda = std::max(lambda, (sp.lambda - std::min(sp.p_t, sp.q_t) * sp.total) / sp.total);
            share = std::max(share, sp.s_bar - std::min(sp.p_t, sp.q_t) - sp.t_t);

            const auto o = collide(a, b, p, mix);
            if (o.is_null())
                continue;
            const double aa = bracket_sq(o.a_out, mix), bb = bracket_sq(o.b_out, mix);
            const auto [ra, rb] = reconstructed_primed_brackets(sp);
            recon = std::max(recon, std::max(std::fabs(ra - aa), std::fabs(rb - bb)) / sp.total);
            const auto [ua, ub] = primed_bracket_bound(sp, p);
            estimate = std::max(estimate, std::max(aa - ua, bb - ub) / sp.total);
        }
        rep.checks.push_back(check_le("convex weights sum to one " + cname, convex, 1e-14, n,
                                      "max |sum - 1|"));
        rep.checks.push_back(check_le("primed bracket reconstruction " + cname, recon, 1e-10, n,
                                      "max |rebuilt - actual| / pair bracket energy"));
        rep.checks.push_back(check_le("primed bracket estimate " + cname, estimate, 1e-12, n,
                                      "max (actual - bound) / pair bracket energy"));
        rep.checks.push_back(check_le("cross term bound " + cname, lambda, 1e-12, n,
                                      "max (lambda - min(p, q) E) / E"));
        rep.checks.push_back(check_le("weight lower bound " + cname, share, 1e-12, n,
                                      "max (s_bar - min(p, q) - t)"));
    }
    rep.seconds = seconds_since(t0);
    return rep;
}

SuiteReport kernels(const Config& cfg, const KernelConstants& kc)
{
    const auto t0 = std::chrono::steady_clock::now();
    const MixtureSpec& mix = cfg.mix;
    const KernelSpec& spec = cfg.kernels;
    const long n = cfg.verification.kernel_samples;
    const std::uint64_t seed = cfg.verification.seed;
    SuiteReport rep;
    rep.criterion = 3;
    rep.name = "kernel bounds";

    for (auto&& part : {kernel_bounds_check(spec, mix, n, seed),
                        bracket_upper_bounds_check(mix, n, seed),
                        model23_envelope_check(mix, n, seed)})
        rep.checks.insert(rep.checks.end(), part.begin(), part.end());

    const int P = mix.size();
    const int d = mix.dim();
    const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) {
            const PairKernel& k = spec.pair(i, j);
            const bool exact_full = k.spec().form == KernelForm::product
                                    && k.spec().upper.type == PartitionType::constant;
            Rng rng = make_stream(seed, 40 + static_cast<std::uint64_t>(i * P + j));
            double worst_energy = 0.0, worst_full = 0.0;
            const long n_rev = n / (P * P) + 1;
            for (long s = 0; s < n_rev; ++s) {
                const auto a = random_test_state(rng, i, mix);
                const auto b = random_test_state(rng, j, mix);
                const auto p = random_test_params(rng, mix);
                const auto o = collide(a, b, p, mix);
                if (o.is_null())
                    continue;
                const double e0 = energy_kernel(pair_frame(a, b, mix).energy, k.gamma(), mix);
                const double e1 = energy_kernel(pair_frame(o.a_out, o.b_out, mix).energy,
                                                k.gamma(), mix);
                worst_energy = std::max(worst_energy, std::fabs(e1 - e0) / e0);
                if (exact_full) {
                    const double k0 = k.eval(a, b, p, mix);
                    const double k1 = k.eval(o.a_out, o.b_out, o.primed, mix);
                    if (k0 > 0.0)
                        worst_full = std::max(worst_full, std::fabs(k1 - k0) / k0);
                }
            }
            const std::string lab = label(i, j, mix);
            rep.checks.push_back(check_le("energy kernel micro-reversibility " + lab,
                                          worst_energy, 1e-10, n_rev, "max relative change"));
            if (exact_full)
                rep.checks.push_back(check_le("kernel micro-reversibility " + lab, worst_full,
                                              1e-10, n_rev, "max relative change"));

            // Independent Monte-Carlo integral of b * partition_ub * weight.
            if (j < i)
                continue;
            const long n_mc = 10 * n;
            Rng mrng = make_stream(seed, 60 + static_cast<std::uint64_t>(i * P + j));
            double sum = 0.0, sum_sq = 0.0;
            Vec axis(d);
            axis[0] = 1.0;
            for (long s = 0; s < n_mc; ++s) {
                const Vec sig = uniform_sphere(mrng, d);
                const double r = uniform01(mrng), R = uniform01(mrng);
                const double f = k.angular()(dot(axis, sig))
                                 * (mix.classify(i, j) == InteractionClass::mono_mono
                                        ? 1.0
                                        : k.partition_ub(r, R) * k.weight(r, R));
                sum += f;
                sum_sq += f * f;
            }
            const double mean = sum / static_cast<double>(n_mc);
            const double var = std::max(0.0, sum_sq / static_cast<double>(n_mc) - mean * mean);
            const double est = sphere * mean;
            const double se = sphere * std::sqrt(var / static_cast<double>(n_mc));
            const double z = se > 0.0 ? std::fabs(est - kc.kappa_ub(i, j)) / se
                                       : std::fabs(est - kc.kappa_ub(i, j));
            rep.checks.push_back(check_le("kappa_ub Monte-Carlo agreement " + lab, z, 3.0, n_mc,
                                          "|MC - quadrature| / standard error"));
            rep.data["kappa_mc"][lab] = {{"estimate", est}, {"stderr", se}};
        }

    rep.data["kappa_lb"] = detail::matrix_json(kc.kappa_lb, mix);
    rep.data["kappa_ub"] = detail::matrix_json(kc.kappa_ub, mix);
    rep.data["L"] = detail::matrix_json(kc.L, mix);
    rep.data["rho_ub"] = detail::matrix_json(kc.rho_ub, mix);
    rep.seconds = seconds_since(t0);
    return rep;
}

SuiteReport averaging(const Config& cfg, const KernelConstants& kc, AveragingReport* report)
{
    const auto t0 = std::chrono::steady_clock::now();
    const MixtureSpec& mix = cfg.mix;
    SuiteReport rep;
    rep.criterion = 4;
    rep.name = "averaging";

    AveragingReport avg = estimate_Ck(cfg.kernels, mix, kc, cfg.averaging);
    const double table_seconds = seconds_since(t0);

    for (const auto& pa : avg.pairs) {
        const std::string lab = label(pa.i, pa.j, mix);
        rep.checks.push_back(check_true("C_k nonincreasing " + lab, pa.monotone,
                                        std::to_string(pa.k.size()) + " grid points"));
        rep.checks.push_back(check_le("decay slope vs -1/2 " + lab, std::fabs(pa.fit.slope + 0.5),
                                      0.1, pa.fit.points,
                                      "|slope + 0.5| of log C_k vs log k on [16, 256]; slope "
                                          + std::to_string(pa.fit.slope)));
        nlohmann::json row{{"class", to_string(pa.cls)},
                           {"kappa_lb", pa.kappa_lb},
                           {"kappa_ub", pa.kappa_ub},
                           {"k", pa.k},
                           {"C", pa.C},
                           {"error", pa.error},
                           {"fit_slope", pa.fit.slope},
                           {"fit_max_rel_residual", pa.fit.max_rel_residual}};
        row["k_bar_star"] = pa.k_bar_star ? nlohmann::json(*pa.k_bar_star) : nlohmann::json();
        rep.data["pairs"][lab] = row;
    }
    rep.checks.push_back(check_le("threshold k_bar_star reached",
                                  avg.threshold_reached ? avg.k_bar_star : INFINITY,
                                  cfg.averaging.kmax, 0, "smallest grid k with C_k < kappa_lb/2"));
    rep.data["k_bar_star"] = avg.k_bar_star;
    rep.data["k_star"] = avg.k_star;
    rep.data["n_states"] = avg.n_states;
    rep.data["method"] = avg.method;

    // Gain average against 2 C_k times the pair bracket energy to k/2.
    const long n_pairs = cfg.verification.gain_pairs;
    const std::array ks{4, 8, 16};
    const int P = mix.size();
    Rng rng = make_stream(cfg.verification.seed, 70);
    std::vector<std::pair<int, int>> unordered;
    for (int i = 0; i < P; ++i)
        for (int j = i; j < P; ++j)
            unordered.emplace_back(i, j);
    for (int k : ks) {
        double worst = 0.0;
        for (long s = 0; s < n_pairs; ++s) {
            const auto [i, j] = unordered[static_cast<std::size_t>(s) % unordered.size()];
            const auto a = random_test_state(rng, i, mix);
            const auto b = random_test_state(rng, j, mix);
            const double E = pair_bracket_energy(a, b, mix);
            const auto g = gain_average(cfg.kernels.pair(i, j), k, a, b, mix, cfg.averaging.tol);
            const double bound = 2.0 * avg.pair(i, j).C_at(k) * std::pow(E, 0.5 * k);
            worst = std::max(worst, g.value / bound);
        }
        rep.checks.push_back(check_le("gain average bound k=" + std::to_string(k), worst, 1.0,
                                      n_pairs, "max G+ / (2 C_k E^(k/2))"));
    }
    rep.seconds = seconds_since(t0);
    rep.data["table_seconds"] = table_seconds;
    rep.checks.push_back(check_le("averaging runtime [s]", rep.seconds, 600.0));
    if (report)
        *report = std::move(avg);
    return rep;
}

SuiteReport p_binomial(const Config& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    SuiteReport rep;
    rep.criterion = 5;
    rep.name = "p-binomial";
    const long n = cfg.verification.binomial_samples;
    Rng rng = make_stream(cfg.verification.seed, 80);
    long violations = 0;
    for (long s = 0; s < n; ++s) {
        const double x = log_uniform(rng, 1e-6, 1e6);
        const double y = log_uniform(rng, 1e-6, 1e6);
        const double p = 64.0 - 63.0 * uniform01(rng);
        if (!p_binomial_check(x, y, p))
            ++violations;
    }
    rep.checks.push_back(check_le("p-binomial violations", static_cast<double>(violations), 0.0,
                                  n, "x, y log-uniform in [1e-6, 1e6], p in (1, 64]"));
    rep.seconds = seconds_since(t0);
    return rep;
}

SuiteReport comparison(const Config& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    SuiteReport rep;
    rep.criterion = 6;
    rep.name = "comparison envelope";

    constexpr int kGrid = 10000;
    std::vector<double> times(kGrid);
    for (int g = 0; g < kGrid; ++g)
        times[g] = 100.0 * (g + 1) / kGrid;

    Rng rng = make_stream(cfg.verification.seed, 90);
    double worst = -INFINITY;
    long crossings = 0;
    const int n_cfg = cfg.verification.comparison_configs;
    for (int c = 0; c < n_cfg; ++c) {
        const double A = log_uniform(rng, 0.1, 10.0);
        const double B = log_uniform(rng, 0.1, 10.0);
        const double ce = log_uniform(rng, 0.05, 5.0);
        const ComparisonEnvelope env(A, B, ce);
        const double y0 = c % 3 == 0 ? 0.0 : (c % 3 == 1 ? 10.0 * env.E() : 10.0 * env.E() * uniform01(rng));
        auto f = [&](double y) { return B - A * std::pow(std::max(y, 0.0), 1.0 + ce); };
        auto h = [&](double y) {
            const double lip = A * (1.0 + ce) * std::pow(std::max(y, env.E()), ce);
            return std::min(1e-2, 0.05 / lip);
        };
        const auto ys = oracle::rk4_scalar(f, y0, times, h);
        for (int g = 0; g < kGrid; ++g) {
            const double z = env(times[g]);
            const double excess = (ys[g] - z) / z;
            worst = std::max(worst, excess);
            if (excess > 1e-9)
                ++crossings;
        }
    }
    rep.checks.push_back(check_le("RK4 solution below envelope", worst, 1e-9,
                                  static_cast<long>(n_cfg) * kGrid,
                                  "max (y - z)/z; crossings: " + std::to_string(crossings)));

    const ComparisonEnvelope unit(1.0, 1.0, 1.0);
    rep.checks.push_back(check_le("unit constants E, beta, K",
                                  std::max({std::fabs(unit.E() - 1.0), std::fabs(unit.beta() - 1.0),
                                            std::fabs(unit.K() - 1.0)}),
                                  1e-15));
    auto f = [](double y) { return 1.0 - y * y; };
    const auto ys = oracle::rk4_scalar(f, 0.0, times, [](double) { return 1e-3; });
    double tanh_err = 0.0, tanh_excess = -INFINITY;
    for (int g = 0; g < kGrid; ++g) {
        tanh_err = std::max(tanh_err, std::fabs(ys[g] - std::tanh(times[g])));
        tanh_excess = std::max(tanh_excess, std::tanh(times[g]) - unit(times[g]));
    }
    rep.checks.push_back(check_le("RK4 vs tanh", tanh_err, 1e-9, kGrid, "max |y - tanh t|"));
    rep.checks.push_back(check_le("tanh below 1 + 1/t", tanh_excess, 1e-9, kGrid,
                                  "max tanh t - (1 + 1/t)"));
    rep.seconds = seconds_since(t0);
    return rep;
}

}  // namespace polymix::verify
