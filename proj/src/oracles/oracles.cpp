#include "polymix/oracles/oracles.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace polymix::oracle {
namespace {

// Stack-allocated up to the largest layout: 3 d + 3 coordinates.
constexpr int kMaxCoords = 3 * kMaxDim + 3;
using Coords = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxCoords, 1>;
using CoordMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxCoords, kMaxCoords>;

struct Layout {
    int d = 3;
    bool internal_a = false, internal_b = false, has_r = false, has_R = false;
    [[nodiscard]] int size() const
    {
        return 2 * d + internal_a + internal_b + (d - 1) + has_r + has_R;
    }
};

Layout layout_for(InteractionClass c, int d)
{
    Layout l;
    l.d = d;
    l.internal_a = c == InteractionClass::poly_poly || c == InteractionClass::poly_mono;
    l.internal_b = c == InteractionClass::poly_poly || c == InteractionClass::mono_poly;
    l.has_r = c == InteractionClass::poly_poly;
    l.has_R = c != InteractionClass::mono_mono;
    return l;
}

// Tangent basis at a unit vector.
std::vector<Vec> tangent_basis(const Vec& n)
{
    auto frame = orthonormal_frame(n);
    return {frame.begin() + 1, frame.begin() + n.dim()};
}

Coords pack(const Layout& l, const ParticleState& a, const ParticleState& b,
                     const Vec& sigma, const std::vector<Vec>& chart, double r, double R)
{
    Coords x(l.size());
    int k = 0;
    for (int i = 0; i < l.d; ++i)
        x[k++] = a.v[i];
    for (int i = 0; i < l.d; ++i)
        x[k++] = b.v[i];
    if (l.internal_a)
        x[k++] = a.internal;
    if (l.internal_b)
        x[k++] = b.internal;
    for (const auto& e : chart)
        x[k++] = dot(e, sigma);
    if (l.has_r)
        x[k++] = r;
    if (l.has_R)
        x[k++] = R;
    return x;
}

}  // namespace

double fd_jacobian(const ParticleState& a, const ParticleState& b, const CollisionParams& p,
                   const MixtureSpec& mix, double rel_step)
{
    const int d = mix.dim();
    const auto cls = mix.classify(a.species, b.species);
    const Layout l = layout_for(cls, d);
    const auto in_chart = tangent_basis(p.sigma);
    const auto base = collide(a, b, p, mix);
    if (base.is_null())
        throw std::domain_error("finite-difference Jacobian of a null collision");
    const auto out_chart = tangent_basis(base.primed.sigma);

    // Each step is relative to the scale its coordinate enters the map with.
    const PairFrame f = pair_frame(a, b, mix);
    const double h_vel = rel_step * norm(f.u);
    const double h_int = rel_step * f.energy;

    auto evaluate = [&](const Coords& x) {
        ParticleState a2 = a, b2 = b;
        int k = 0;
        for (int i = 0; i < d; ++i)
            a2.v[i] = x[k++];
        for (int i = 0; i < d; ++i)
            b2.v[i] = x[k++];
        if (l.internal_a)
            a2.internal = x[k++];
        if (l.internal_b)
            b2.internal = x[k++];
        Vec s = p.sigma;
        for (const auto& e : in_chart)
            s += x[k++] * e;
        CollisionParams q = p;
        q.sigma = normalized(s);
        if (l.has_r)
            q.r = x[k++];
        if (l.has_R)
            q.R = x[k++];
        auto o = collide(a2, b2, q, mix);
        return pack(l, o.a_out, o.b_out, o.primed.sigma, out_chart, o.primed.r, o.primed.R);
    };

    // Chart coordinates of the input sigma are zero at the base point.
    Coords x0 = pack(l, a, b, p.sigma, in_chart, p.r, p.R);
    for (int k = 2 * d + l.internal_a + l.internal_b, e = 0; e < d - 1; ++e)
        x0[k + e] = 0.0;

    // Second-order one-sided stencils where a centered one would leave the
    // domain of a bounded coordinate.
    enum class Stencil { central, forward, backward };
    const int n = l.size();
    std::vector<double> steps;
    std::vector<Stencil> stencil;
    auto add = [&](double h, Stencil st) {
        steps.push_back(h);
        stencil.push_back(st);
    };
    auto nonnegative = [&](double x, double h) {
        add(h, x - h < 0.0 ? Stencil::forward : Stencil::central);
    };
    auto unit_interval = [&](double x, double h) {
        add(h, x - h < 0.0 ? Stencil::forward : (x + h > 1.0 ? Stencil::backward : Stencil::central));
    };
    for (int i = 0; i < 2 * d; ++i)
        add(h_vel, Stencil::central);
    if (l.internal_a)
        nonnegative(a.internal, h_int);
    if (l.internal_b)
        nonnegative(b.internal, h_int);
    for (int i = 0; i < d - 1; ++i)
        add(rel_step, Stencil::central);
    if (l.has_r)
        unit_interval(p.r, rel_step);
    // The kinetic share enters through a power of R, singular at R = 0.
    if (l.has_R)
        unit_interval(p.R, rel_step * p.R);
    for (double h : steps)
        if (!(h > 0.0))
            throw std::domain_error("finite-difference Jacobian needs R > 0 and E > 0");

    CoordMatrix J(n, n);
    for (int c = 0; c < n; ++c) {
        const double h = steps[c];
        auto at = [&](double offset) {
            Coords x = x0;
            x[c] += offset;
            return evaluate(x);
        };
        switch (stencil[c]) {
        case Stencil::central: J.col(c) = (at(h) - at(-h)) / (2.0 * h); break;
        case Stencil::forward:
            J.col(c) = (-3.0 * at(0.0) + 4.0 * at(h) - at(2.0 * h)) / (2.0 * h);
            break;
        case Stencil::backward:
            J.col(c) = (3.0 * at(0.0) - 4.0 * at(-h) + at(-2.0 * h)) / (2.0 * h);
            break;
        }
    }
    return std::fabs(Eigen::PartialPivLU<CoordMatrix>(J).determinant());
}

double beta_function(double a, double b)
{
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

std::vector<double> rk4_scalar(const std::function<double(double)>& f, double y0,
                               const std::vector<double>& times,
                               const std::function<double(double)>& max_step)
{
    std::vector<double> out;
    out.reserve(times.size());
    double t = 0.0, y = y0;
    for (double target : times) {
        while (t < target) {
            double h = std::min(target - t, max_step(y));
            const double k1 = f(y);
            const double k2 = f(y + 0.5 * h * k1);
            const double k3 = f(y + 0.5 * h * k2);
            const double k4 = f(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t = (target - t <= h) ? target : t + h;
        }
        out.push_back(y);
    }
    return out;
}

double maxwellian_bracket_sq_mean(double temperature, int dim, double total_mass,
                                  bool polyatomic, double alpha)
{
    double v = 1.0 + dim * temperature / (2.0 * total_mass);
    if (polyatomic)
        v += (alpha + 1.0) * temperature / total_mass;
    return v;
}

}  // namespace polymix::oracle
