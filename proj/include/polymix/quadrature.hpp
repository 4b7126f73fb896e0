#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "polymix/errors.hpp"

namespace polymix::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
};

namespace detail {

// 7-point Gauss-Legendre rule embedded in the 15-point Kronrod extension.
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = fc * kronrod_weights[7];
    double g = fc * gauss_weights[3];
    for (int i = 0; i < 7; ++i) {
        const double x = h * kronrod_nodes[i];
        const double s = f(c - x) + f(c + x);
        k += kronrod_weights[i] * s;
        if (i % 2 == 1)
            g += gauss_weights[i / 2] * s;
    }
    return {a, b, k * h, std::fabs((k - g) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b].
/// `breaks` are interior points where the integrand may be non-smooth.
/// Throws QuadratureError when the tolerance cannot be met.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {},
                 std::span<const double> breaks = {})
{
    Result res;
    if (a == b)
        return res;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::priority_queue<detail::Segment> heap;
    double total = 0.0, err = 0.0;
    double left = a;
    std::vector<double> pts(breaks.begin(), breaks.end());
    std::sort(pts.begin(), pts.end());
    pts.push_back(b);
    for (double p : pts) {
        if (!(p > left) || p > b)
            continue;
        auto s = detail::gk15(f, left, p);
        res.evaluations += 15;
        total += s.value;
        err += s.error;
        heap.push(s);
        left = p;
    }
    int intervals = static_cast<int>(heap.size());
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::fabs(total))) {
        if (intervals >= opt.max_intervals)
            throw QuadratureError("adaptive quadrature did not converge");
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval at machine resolution; accept its contribution.
            err -= worst.error;
            worst.error = 0.0;
            heap.push(worst);
            continue;
        }
        auto l = detail::gk15(f, worst.a, mid);
        auto r = detail::gk15(f, mid, worst.b);
        res.evaluations += 30;
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++intervals;
    }
    // Re-sum to shed accumulated rounding from the running updates.
    total = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    res.value = sign * total;
    res.error = err;
    return res;
}

/// Integer power n for the substitution x = t^n that regularizes x^e dx
/// near x = 0 (e > -1).
inline int endpoint_power(double e)
{
    if (e >= 0.0 && e == std::floor(e))
        return 1;
    return std::max(2, static_cast<int>(std::ceil(1.0 / (e + 1.0) - 1e-12)));
}

/// Integral over [0, 1] of g(x) x^ea (1-x)^eb with endpoint substitutions
/// x = t^n at 0 and 1 - x = t^n at 1, split at 1/2.
/// `breaks` are points in (0, 1) where g may be non-smooth.
template <class G>
Result integrate_beta(G&& g, double ea, double eb, const Options& opt = {},
                      std::span<const double> breaks = {})
{
    const int na = endpoint_power(ea);
    const int nb = endpoint_power(eb);
    auto lower = [&](double t) {
        if (t <= 0.0)
            return 0.0;
        const double x = std::pow(t, na);
        // x^ea dx = n t^(n ea + n - 1) dt
        return g(x) * std::pow(1.0 - x, eb) * na * std::pow(t, na * ea + na - 1);
    };
    auto upper = [&](double t) {
        if (t <= 0.0)
            return 0.0;
        const double y = std::pow(t, nb);
        return g(1.0 - y) * std::pow(1.0 - y, ea) * nb * std::pow(t, nb * eb + nb - 1);
    };
    std::vector<double> lb, ub;
    for (double x : breaks) {
        if (x > 0.0 && x < 0.5)
            lb.push_back(std::pow(x, 1.0 / na));
        else if (x > 0.5 && x < 1.0)
            ub.push_back(std::pow(1.0 - x, 1.0 / nb));
    }
    Options half = opt;
    half.abs_tol = 0.5 * opt.abs_tol;
    auto r1 = integrate(lower, 0.0, std::pow(0.5, 1.0 / na), half, lb);
    auto r2 = integrate(upper, 0.0, std::pow(0.5, 1.0 / nb), half, ub);
    return {r1.value + r2.value, r1.error + r2.error, r1.evaluations + r2.evaluations};
}

/// Surface area of the unit sphere S^n in R^(n+1).
inline double sphere_area(int n)
{
    const double h = 0.5 * (n + 1);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// Integral over S^(d-1) of G(e . sigma) for a fixed unit e.
/// `cos_breaks` lists values of e . sigma where G may be non-smooth;
/// `theta_power` as for integrate_sphere_pair.
template <class G>
Result integrate_sphere_axial(G&& g, int d, const Options& opt = {},
                              std::span<const double> cos_breaks = {}, int theta_power = 1)
{
    const double area = sphere_area(d - 2);
    const int n = std::max(1, theta_power);
    auto inner = [&](double t) {
        const double th = std::numbers::pi * std::pow(t, n);
        const double jac = std::numbers::pi * n * std::pow(t, n - 1);
        return g(std::cos(th)) * std::pow(std::sin(th), d - 2) * jac;
    };
    std::vector<double> t_breaks;
    for (double c : cos_breaks)
        if (c > -1.0 && c < 1.0)
            t_breaks.push_back(std::pow(std::acos(c) / std::numbers::pi, 1.0 / n));
    Options o = opt;
    o.abs_tol = opt.abs_tol / area;
    auto r = integrate(inner, 0.0, 1.0, o, t_breaks);
    return {area * r.value, area * r.error, r.evaluations};
}

/// Integral over S^(d-1) of F(x, y) with x = e . sigma and y = e' . sigma,
/// where e, e' are unit vectors with e . e' = cos_beta.
/// `x_breaks` lists values of x where F may be non-smooth; the kink of
/// |y| at y = 0 is split out automatically for d >= 3.
///
/// `theta_power` n > 1 substitutes theta = pi t^n to absorb an integrable
/// singularity of F at x = 1.
template <class F>
Result integrate_sphere_pair(F&& f, double cos_beta, int d, const Options& opt = {},
                             std::span<const double> x_breaks = {}, int theta_power = 1)
{
    cos_beta = std::clamp(cos_beta, -1.0, 1.0);
    const double sin_beta = std::sqrt(std::max(0.0, 1.0 - cos_beta * cos_beta));
    const int n = std::max(1, theta_power);
    auto theta_of = [n](double t) { return std::numbers::pi * std::pow(t, n); };
    auto dtheta = [n](double t) { return std::numbers::pi * n * std::pow(t, n - 1); };
    std::vector<double> t_breaks;
    for (double c : x_breaks)
        if (c > -1.0 && c < 1.0)
            t_breaks.push_back(std::pow(std::acos(c) / std::numbers::pi, 1.0 / n));
    Result out;
    if (d == 2) {
        auto branch = [&](double sgn) {
            auto h = [&](double t) {
                const double th = theta_of(t);
                const double x = std::cos(th), s = std::sin(th);
                return f(x, x * cos_beta + sgn * s * sin_beta) * dtheta(t);
            };
            return integrate(h, 0.0, 1.0, opt, t_breaks);
        };
        auto r1 = branch(1.0), r2 = branch(-1.0);
        return {r1.value + r2.value, r1.error + r2.error, r1.evaluations + r2.evaluations};
    }
    const double area = sphere_area(d - 3);
    Options inner_opt = opt;
    inner_opt.abs_tol = 0.1 * opt.abs_tol / (area * std::numbers::pi);
    long evals = 0;
    auto outer = [&](double t) {
        const double th = theta_of(t);
        const double x = std::cos(th), s = std::sin(th);
        auto h = [&](double ph) {
            return f(x, x * cos_beta + s * sin_beta * std::cos(ph))
                   * std::pow(std::sin(ph), d - 3);
        };
        // The y-kink at y = 0 falls where cos(ph) = -x cos_beta / (s sin_beta).
        std::array<double, 1> brk{};
        std::span<const double> bs;
        if (s * sin_beta > 0.0) {
            const double c = -x * cos_beta / (s * sin_beta);
            if (c > -1.0 && c < 1.0) {
                brk[0] = std::acos(c);
                bs = brk;
            }
        }
        auto r = integrate(h, 0.0, std::numbers::pi, inner_opt, bs);
        evals += r.evaluations;
        return r.value * std::pow(s, d - 2) * dtheta(t);
    };
    Options o = opt;
    o.abs_tol = opt.abs_tol / area;
    auto r = integrate(outer, 0.0, 1.0, o, t_breaks);
    out.value = area * r.value;
    out.error = area * r.error;
    out.evaluations = evals;
    return out;
}

}  // namespace polymix::quad
