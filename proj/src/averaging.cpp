#include "polymix/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>


namespace polymix {
namespace {

constexpr double kInnerAbsTol = 1e-300;

quad::Options rel_options(double tol)
{
    quad::Options o;
    o.abs_tol = kInnerAbsTol;
    o.rel_tol = tol;
    return o;
}

// Linear coefficients (A, B) of the contraction factor A + B|y|.
struct Affine {
    double A = 1.0;
    double B = 0.0;
};

Affine contraction(InteractionClass cls, const SplitInputs& in, PairSide side, double r,
                   double R)
{
    const double s_bar = std::min(in.s, 1.0 - in.s);
    switch (cls) {
    case InteractionClass::mono_mono: return {1.0 - s_bar, s_bar};
    case InteractionClass::poly_mono:
    case InteractionClass::mono_poly: return {1.0 - s_bar * R, s_bar * R};
    case InteractionClass::poly_poly: break;
    }
    const double c = in.center_excess, e = in.relative_excess, s = in.s;
    const double total = 2.0 + c + e;
    const double p = (s * (1.0 + c) + (1.0 - s) * (1.0 + R * e)) / total;
    const double q = ((1.0 - s) * (1.0 + c) + s * (1.0 + R * e)) / total;
    const double t = (1.0 - R) * e / total;
    if (side == PairSide::first)
        return {std::max(0.0, 1.0 - q - t * (1.0 - r)), q};
    return {std::max(0.0, 1.0 - p - t * r), p};
}

// Mean of (A + B y)^k over y in [0, 1], stable for small B.
double power_mean_unit(double A, double B, double k)
{
    const double top = A + B;
    if (top <= 0.0)
        return k == 0.0 ? 1.0 : 0.0;
    if (k == 0.0)
        return 1.0;
    const double ratio = B / top;
    if (ratio <= 0.0)
        return std::pow(top, k);
    if (ratio >= 1.0)
        return std::pow(top, k) / (k + 1.0);
    const double frac = -std::expm1((k + 1.0) * std::log1p(-ratio));
    return std::pow(top, k) * frac / ((k + 1.0) * ratio);
}

// Integral over the sphere of (A + B|y|)^k b(unit(u) . sigma).
struct SphereAverager {
    const AngularKernel& b;
    int dim;
    double b_norm;
    double cos_Vu;
    bool zero_center;
    quad::Options opt;

    [[nodiscard]] Estimate operator()(Affine f, double k) const
    {
        if (zero_center || f.B == 0.0)
            return {b_norm * std::pow(f.A, k), 0.0};
        if (b.is_isotropic() && dim == 3)
            return {b_norm * power_mean_unit(f.A, f.B, k), 0.0};
        auto g = [&](double y) { return std::pow(f.A + f.B * std::fabs(y), k); };
        const std::array<double, 1> kink{0.0};
        if (b.is_isotropic()) {
            auto r = quad::integrate_sphere_axial(g, dim, opt, kink);
            return {b.value * r.value, b.value * r.error};
        }
        auto h = [&](double x, double y) { return b(x) * g(y); };
        auto br = b.breaks();
        auto r = quad::integrate_sphere_pair(h, cos_Vu, dim, opt, br, b.theta_power(dim));
        return {r.value, r.error};
    }
};

// Sigma with unit(u) . sigma = x and unit(V) . sigma = y, built in a frame
// adapted to (u, V); the brackets only see y.
struct SigmaBuilder {
    std::array<Vec, kMaxDim> frame;
    double cos_beta = 1.0, sin_beta = 0.0;

    SigmaBuilder(const Vec& u_hat, const Vec& V_hat) : frame{orthonormal_frame(u_hat, V_hat)}
    {
        cos_beta = std::clamp(dot(u_hat, V_hat), -1.0, 1.0);
        sin_beta = std::sqrt(std::max(0.0, 1.0 - cos_beta * cos_beta));
    }

    [[nodiscard]] Vec operator()(double x, double y) const
    {
        const int d = frame[0].dim();
        double c2 = 0.0;
        if (sin_beta > 1e-12)
            c2 = (y - x * cos_beta) / sin_beta;
        else
            c2 = std::sqrt(std::max(0.0, 1.0 - x * x));
        Vec s = x * frame[0] + c2 * frame[1];
        const double rest = std::sqrt(std::max(0.0, 1.0 - x * x - c2 * c2));
        if (d > 2)
            s += rest * frame[2];
        return normalized(s);
    }
};

}  // namespace

SplitInputs SplitInputs::from_states(const ParticleState& a, const ParticleState& b,
                                     const MixtureSpec& mix)
{
    const PairFrame f = pair_frame(a, b, mix);
    SplitInputs in;
    const double m = mix.total_mass();
    in.center_excess = (f.mass_a + f.mass_b) * norm_sq(f.V) / (2.0 * m);
    in.relative_excess = f.energy / m;
    in.s = f.s;
    const double vn = norm(f.V), un = norm(f.u);
    in.zero_center = !(vn > 0.0);
    in.cos_Vu = (vn > 0.0 && un > 0.0) ? dot(f.V, f.u) / (vn * un) : 0.0;
    return in;
}

SplitInputs SplitInputs::from_compact(double u_center, double u_relative, double cos_Vu,
                                      double s)
{
    if (!(u_center > 0.0 && u_center <= 1.0 && u_relative > 0.0 && u_relative <= 1.0))
        throw std::invalid_argument("compact coordinates must lie in (0, 1]");
    SplitInputs in;
    in.center_excess = 1.0 / u_center - 1.0;
    in.relative_excess = 1.0 / u_relative - 1.0;
    in.cos_Vu = std::clamp(cos_Vu, -1.0, 1.0);
    in.s = s;
    return in;
}

Estimate averaged_contraction(const PairKernel& kernel, double power, const SplitInputs& in,
                              PairSide side, double tol)
{
    if (power < 0.0)
        throw std::invalid_argument("contraction power must be nonnegative");
    const int d = kernel.dim();
    const quad::Options opt = rel_options(tol);
    const SphereAverager sphere{kernel.angular(), d, kernel.angular().l1_norm(d, opt),
                                in.cos_Vu, in.zero_center, opt};
    const auto cls = kernel.cls();
    if (cls == InteractionClass::mono_mono)
        return sphere(contraction(cls, in, side, 0.5, 1.0), power);

    double err = 0.0;
    auto at = [&](double r, double R) {
        auto e = sphere(contraction(cls, in, side, r, R), power);
        err = std::max(err, e.error);
        return e.value * kernel.partition_ub(r, R);
    };
    quad::Result res;
    const auto R_br = kernel.R_breaks();
    if (cls == InteractionClass::poly_poly) {
        auto outer = [&](double R) {
            const auto r_br = kernel.r_breaks(R);
            return quad::integrate_beta([&](double r) { return at(r, R); }, kernel.alpha_a(),
                                        kernel.alpha_b(), opt, r_br)
                .value;
        };
        res = quad::integrate_beta(outer, kernel.weight_R_lower(), kernel.weight_R_upper(), opt,
                                   R_br);
    }
    else {
        res = quad::integrate_beta([&](double R) { return at(0.5, R); }, kernel.weight_R_lower(),
                                   kernel.weight_R_upper(), opt, R_br);
    }
    return {res.value, res.error + err * kernel.partition_ub_sup()};
}

Estimate averaged_contraction_mc(const PairKernel& kernel, double power, const SplitInputs& in,
                                 PairSide side, long n_samples, std::uint64_t seed)
{
    const int d = kernel.dim();
    Rng rng = make_stream(seed, 0x61766731ULL);
    const auto cls = kernel.cls();
    // Unit vectors realizing cos_Vu; the factor only sees y = V_hat . sigma.
    Vec u_hat = Vec::unit(d, 0);
    Vec V_hat = in.cos_Vu * u_hat;
    if (d > 1)
        V_hat[1] = std::sqrt(std::max(0.0, 1.0 - in.cos_Vu * in.cos_Vu));
    const double area = quad::sphere_area(d - 1);
    const double ea = kernel.weight_R_lower(), eb = kernel.weight_R_upper();
    const double norm_R = std::beta(ea + 1.0, eb + 1.0);
    const double norm_r = std::beta(kernel.alpha_a() + 1.0, kernel.alpha_b() + 1.0);
    double mean = 0.0, m2 = 0.0;
    for (long n = 0; n < n_samples; ++n) {
        const Vec sigma = uniform_sphere(rng, d);
        double r = 0.5, R = 1.0, scale = area;
        if (cls != InteractionClass::mono_mono) {
            R = beta_variate(rng, ea + 1.0, eb + 1.0);
            scale *= norm_R;
        }
        if (cls == InteractionClass::poly_poly) {
            r = beta_variate(rng, kernel.alpha_a() + 1.0, kernel.alpha_b() + 1.0);
            scale *= norm_r;
        }
        const double y = in.zero_center ? 0.0 : dot(V_hat, sigma);
        const Affine f = contraction(cls, in, side, r, R);
        double x = scale * kernel.angular()(dot(u_hat, sigma))
                   * std::pow(f.A + f.B * std::fabs(y), power);
        if (cls != InteractionClass::mono_mono)
            x *= kernel.partition_ub(r, R);
        // Welford update
        const double delta = x - mean;
        mean += delta / static_cast<double>(n + 1);
        m2 += delta * (x - mean);
    }
    const double var = n_samples > 1 ? m2 / static_cast<double>(n_samples - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n_samples))};
}

std::vector<SplitInputs> averaging_states(const PairKernel& kernel, double s, int n_side,
                                          std::uint64_t seed)
{
    std::vector<SplitInputs> out;
    Rng rng = make_stream(seed, 0x73747261ULL);
    const bool pp = kernel.cls() == InteractionClass::poly_poly;
    const int n = std::max(1, n_side);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                auto cell = [&](int idx) { return (idx + uniform01(rng)) / n; };
                double u1 = std::max(cell(a), 1e-9);
                double u2 = std::max(cell(b), 1e-9);
                const double cv = cell(c);
                if (!pp) {
                    // Factor is independent of the energy variables.
                    u1 = 0.5;
                    u2 = 0.5;
                }
                out.push_back(SplitInputs::from_compact(u1, u2, cv, s));
            }
    // Limits where the contraction is weakest: V nearly parallel to u or
    // orthogonal to it, with extreme energy partitions.
    const double eps = 1e-9;
    for (double u1 : {eps, 1.0 - eps})
        for (double u2 : {eps, 1.0 - eps})
            for (double cv : {0.0, 1.0})
                out.push_back(SplitInputs::from_compact(u1, u2, cv, s));
    return out;
}

std::vector<int> averaging_grid(int kmax)
{
    std::vector<int> g{2, 3};
    for (int base = 4; base <= kmax; base *= 2) {
        g.push_back(base);
        if (base + base / 2 <= kmax)
            g.push_back(base + base / 2);
    }
    return g;
}

DecayFit fit_decay(const std::vector<int>& k, const std::vector<double>& c, double k_lo,
                   double k_hi)
{
    std::vector<double> xs, ys;
    for (std::size_t n = 0; n < k.size(); ++n)
        if (k[n] >= k_lo && k[n] <= k_hi && c[n] > 0.0) {
            xs.push_back(std::log(static_cast<double>(k[n])));
            ys.push_back(std::log(c[n]));
        }
    DecayFit fit;
    fit.points = static_cast<int>(xs.size());
    if (xs.size() < 2)
        return fit;
    const double nx = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t n = 0; n < xs.size(); ++n) {
        mx += xs[n];
        my += ys[n];
    }
    mx /= nx;
    my /= nx;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t n = 0; n < xs.size(); ++n) {
        sxx += (xs[n] - mx) * (xs[n] - mx);
        sxy += (xs[n] - mx) * (ys[n] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t n = 0; n < xs.size(); ++n) {
        const double pred = std::exp(fit.intercept + fit.slope * xs[n]);
        fit.max_rel_residual = std::max(fit.max_rel_residual,
                                        std::fabs(std::exp(ys[n]) / pred - 1.0));
    }
    return fit;
}

double PairAveraging::C_at(int power) const
{
    // Largest grid power not above `power`: C is nonincreasing, so this is
    // a valid (conservative) value.
    double value = -1.0;
    for (std::size_t n = 0; n < k.size(); ++n)
        if (k[n] <= power)
            value = C[n];
    if (value < 0.0)
        return kappa_ub;
    return value;
}

const PairAveraging& AveragingReport::pair(int i, int j) const
{
    if (i > j)
        std::swap(i, j);
    for (const auto& p : pairs)
        if (p.i == i && p.j == j)
            return p;
    throw std::out_of_range("no averaging data for the requested pair");
}

AveragingReport estimate_Ck(const KernelSpec& spec, const MixtureSpec& mix,
                            const KernelConstants& constants, const AveragingOptions& opt)
{
    AveragingReport rep;
    const auto grid = averaging_grid(opt.kmax);
    const int n = mix.size();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const PairKernel& kernel = spec.pair(i, j);
            PairAveraging pa;
            pa.i = i;
            pa.j = j;
            pa.cls = kernel.cls();
            pa.kappa_lb = constants.kappa_lb(i, j);
            pa.kappa_ub = constants.kappa_ub(i, j);
            pa.k.push_back(0);
            for (int k : grid)
                pa.k.push_back(k);
            const double s = mix.mass(i) / (mix.mass(i) + mix.mass(j));
            const auto states = averaging_states(kernel, s, opt.strata_per_axis,
                                                 opt.seed + static_cast<std::uint64_t>(i * n + j));
            rep.n_states = static_cast<int>(states.size());
            const bool two_sided = pa.cls == InteractionClass::poly_poly;

            // values[state][power]
            std::vector<std::vector<Estimate>> values(states.size());
            auto work = [&](std::size_t begin, std::size_t step) {
                for (std::size_t st = begin; st < states.size(); st += step) {
                    auto& row = values[st];
                    row.reserve(pa.k.size());
                    for (int k : pa.k) {
                        auto e = averaged_contraction(kernel, k, states[st], PairSide::first,
                                                      opt.tol);
                        if (two_sided) {
                            auto e2 = averaged_contraction(kernel, k, states[st],
                                                           PairSide::second, opt.tol);
                            if (e2.value > e.value)
                                e = e2;
                        }
                        row.push_back(e);
                    }
                }
            };
            const auto n_threads = static_cast<std::size_t>(std::max(1, opt.threads));
            if (n_threads == 1) {
                work(0, 1);
            }
            else {
                std::vector<std::jthread> pool;
                for (std::size_t t = 0; t < n_threads; ++t)
                    pool.emplace_back(work, t, n_threads);
            }

            for (std::size_t kk = 0; kk < pa.k.size(); ++kk) {
                Estimate best{-1.0, 0.0};
                for (const auto& row : values)
                    if (row[kk].value > best.value)
                        best = row[kk];
                pa.C.push_back(best.value);
                pa.error.push_back(best.error);
            }
            for (std::size_t kk = 1; kk < pa.C.size(); ++kk)
                if (pa.C[kk] > pa.C[kk - 1] + pa.error[kk] + pa.error[kk - 1])
                    pa.monotone = false;
            pa.fit = fit_decay(pa.k, pa.C, opt.fit_lo, opt.fit_hi);
            for (std::size_t kk = 0; kk < pa.k.size(); ++kk)
                if (pa.C[kk] < 0.5 * pa.kappa_lb) {
                    pa.k_bar_star = pa.k[kk];
                    break;
                }
            if (pa.k_bar_star)
                rep.k_bar_star = std::max(rep.k_bar_star, *pa.k_bar_star);
            else
                rep.threshold_reached = false;
            rep.pairs.push_back(std::move(pa));
        }
    rep.k_star = std::max(2.0 + 2.0 * mix.gamma_high(), static_cast<double>(rep.k_bar_star));
    return rep;
}

Estimate gain_average(const PairKernel& kernel, double k, const ParticleState& a,
                      const ParticleState& b, const MixtureSpec& mix, double tol)
{
    const int d = mix.dim();
    const quad::Options opt = rel_options(tol);
    const PairFrame f = pair_frame(a, b, mix);
    const double un = norm(f.u), vn = norm(f.V);
    const Vec u_hat = un > 0.0 ? f.u * (1.0 / un) : Vec::unit(d, 0);
    const Vec V_hat = vn > 0.0 ? f.V * (1.0 / vn) : u_hat;
    const SigmaBuilder build(u_hat, V_hat);
    const Vec V_perp = orthonormal_frame(V_hat)[1];
    const double pre_a = std::pow(bracket(a, mix), k), pre_b = std::pow(bracket(b, mix), k);
    const auto& ang = kernel.angular();

    auto brackets = [&](const Vec& sigma, double r, double R) {
        auto out = collide(a, b, CollisionParams{sigma, r, R}, mix);
        if (out.is_null())
            return pre_a + pre_b;
        return std::pow(bracket(out.a_out, mix), k) + std::pow(bracket(out.b_out, mix), k);
    };
    auto sphere = [&](double r, double R) {
        if (ang.is_isotropic()) {
            // Only y = V_hat . sigma matters; sweep sigma in the (V_hat, e) plane.
            auto g = [&](double y) {
                Vec s = y * V_hat + std::sqrt(std::max(0.0, 1.0 - y * y)) * V_perp;
                return brackets(normalized(s), r, R);
            };
            return ang.value * quad::integrate_sphere_axial(g, d, opt).value;
        }
        auto h = [&](double x, double y) { return ang(x) * brackets(build(x, y), r, R); };
        auto br = ang.breaks();
        return quad::integrate_sphere_pair(h, build.cos_beta, d, opt, br, ang.theta_power(d))
            .value;
    };
    const auto cls = kernel.cls();
    if (cls == InteractionClass::mono_mono)
        return {sphere(0.5, 1.0), 0.0};
    auto at = [&](double r, double R) { return sphere(r, R) * kernel.partition_ub(r, R); };
    const auto R_br = kernel.R_breaks();
    quad::Result res;
    if (cls == InteractionClass::poly_poly) {
        auto outer = [&](double R) {
            const auto r_br = kernel.r_breaks(R);
            return quad::integrate_beta([&](double r) { return at(r, R); }, kernel.alpha_a(),
                                        kernel.alpha_b(), opt, r_br)
                .value;
        };
        res = quad::integrate_beta(outer, kernel.weight_R_lower(), kernel.weight_R_upper(), opt,
                                   R_br);
    }
    else {
        res = quad::integrate_beta([&](double R) { return at(0.5, R); }, kernel.weight_R_lower(),
                                   kernel.weight_R_upper(), opt, R_br);
    }
    return {res.value, res.error};
}

bool p_binomial_check(double x, double y, double p)
{
    if (!(x > 0.0 && y > 0.0 && p > 1.0))
        throw std::invalid_argument("p-binomial inequality needs x, y > 0 and p > 1");
    // Divide by max(x, y)^p; z = min/max in (0, 1].
    const double big = std::max(x, y);
    const double z = std::min(x, y) / big;
    const double lhs = std::expm1(p * std::log1p(z));  // (1 + z)^p - 1
    const double rhs = std::pow(z, p) + std::pow(2.0, p + 1.0) * z;
    return lhs <= rhs;
}

double c_tilde(double k) { return std::pow(2.0, 0.5 * k + 1.0); }

}  // namespace polymix
