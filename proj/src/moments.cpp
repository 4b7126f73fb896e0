#include "polymix/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "polymix/errors.hpp"

namespace polymix {
namespace {

// Neumaier compensated sum.
class CompensatedSum {
  public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double log_sum_exp(const std::vector<double>& v)
{
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : v)
        hi = std::max(hi, x);
    if (!std::isfinite(hi))
        return hi;
    double s = 0.0;
    for (double x : v)
        s += std::exp(x - hi);
    return hi + std::log(s);
}

std::string pair_name(int i, int j, const MixtureSpec& mix)
{
    return "(" + mix.species(i).name + "," + mix.species(j).name + ")";
}

struct LogTerms {
    double k1 = 0.0;
    double k2 = -std::numeric_limits<double>::infinity();
    bool k2_valid = true;
};

// Logarithms of the two contributions to B_k for ordered pair (i, j) given
// the zeroth and second moments of the two densities.
LogTerms log_B_terms(double k, double gi, double gj, double log_eps, double A_tilde, double Ck,
                     double m0i, double m2i, double m0j, double m2j)
{
    LogTerms t;
    const double km2 = k - 2.0;
    t.k1 = -(km2 / gi) * log_eps + std::log(gi / (km2 + gi))
           + ((km2 + gi) / gi) * std::log(A_tilde) + std::log(m2i)
           - (km2 / gi) * std::log(m0j) + ((km2 + gi) / gi) * std::log(m2j);
    const double D = 2.0 + gj - gi;
    if (!(D > 0.0)) {
        t.k2_valid = false;
        return t;
    }
    t.k2 = -((km2 + gi) + (k + gj) * gi / km2) / D * log_eps
           + (2.0 + gj) * (km2 + gi) / (D * km2) * std::log((2.0 + gj) / (k + gj))
           + (k + gj) * (km2 + gi) / (km2 * D)
                 * (std::log(8.0 * Ck) + 0.5 * k * std::numbers::ln2)
           + std::log(m0j) - (km2 + gi) / D * std::log(m0i) + (k + gj) / D * std::log(m2i);
    return t;
}

double C_at_order(const AveragingReport& avg, int i, int j, double k)
{
    return avg.pair(i, j).C_at(static_cast<int>(std::floor(k)));
}

}  // namespace

std::size_t MomentVector::index_of(double order) const
{
    for (std::size_t n = 0; n < orders.size(); ++n)
        if (std::fabs(orders[n] - order) <= 1e-12 * std::max(1.0, std::fabs(order)))
            return n;
    throw std::out_of_range("moment of order " + std::to_string(order) + " not available");
}

bool MomentVector::mixture_reliable(double order) const
{
    return mixture_ess[index_of(order)] >= kMinEss;
}

bool MomentVector::reliable(double order) const
{
    const std::size_t n = index_of(order);
    for (int i = 0; i < n_species(); ++i)
        if (!empty_species[i] && ess[i][n] < kMinEss)
            return false;
    return true;
}

MomentVector moments_of_ensemble(const Ensemble& ens, const MixtureSpec& mix,
                                 std::span<const double> orders)
{
    if (ens.n_species() != mix.size())
        throw ConfigError("ensemble species count does not match the mixture");
    const int P = mix.size();
    const std::size_t K = orders.size();
    MomentVector mv;
    mv.orders.assign(orders.begin(), orders.end());
    mv.species.assign(P, std::vector<double>(K, 0.0));
    mv.species_error.assign(P, std::vector<double>(K, 0.0));
    mv.ess.assign(P, std::vector<double>(K, 0.0));
    mv.mixture.assign(K, 0.0);
    mv.mixture_error.assign(K, 0.0);
    mv.mixture_ess.assign(K, 0.0);
    mv.empty_species.assign(P, false);

    // Per species log of the weighted first and second power sums, for the
    // effective sample size of the mixture estimator.
    std::vector<std::vector<double>> log_s1(P, std::vector<double>(K, -INFINITY));
    std::vector<std::vector<double>> log_s2(P, std::vector<double>(K, -INFINITY));
    std::vector<double> log_b;
    for (int i = 0; i < P; ++i) {
        const auto& parts = ens.particles[i];
        mv.empty_species[i] = parts.empty();
        if (parts.empty())
            continue;
        log_b.resize(parts.size());
        for (std::size_t p = 0; p < parts.size(); ++p)
            log_b[p] = 0.5 * std::log(bracket_sq(parts[p], mix));
        const double w = ens.weight[i];
        const double N = static_cast<double>(parts.size());
        for (std::size_t n = 0; n < K; ++n) {
            const double k = orders[n];
            // Scale by the largest term so high orders do not overflow the squares.
            double log_hi = -std::numeric_limits<double>::infinity();
            for (double lb : log_b)
                log_hi = std::max(log_hi, k * lb);
            CompensatedSum s1, s2;
            for (double lb : log_b) {
                const double x = std::exp(k * lb - log_hi);
                s1.add(x);
                s2.add(x * x);
            }
            const double sum = s1.value(), sum_sq = s2.value();
            const double scale = std::exp(log_hi);
            const double mean = sum / N;
            const double var = std::max(0.0, sum_sq / N - mean * mean);
            mv.species[i][n] = w * sum * scale;
            mv.species_error[i][n] = w * std::sqrt(N * var) * scale;
            mv.ess[i][n] = sum * sum / sum_sq;
            log_s1[i][n] = std::log(w * sum) + log_hi;
            log_s2[i][n] = 2.0 * (std::log(w) + log_hi) + std::log(sum_sq);
        }
    }
    for (std::size_t n = 0; n < K; ++n) {
        CompensatedSum m;
        double e2 = 0.0;
        for (int i = 0; i < P; ++i) {
            m.add(mv.species[i][n]);
            e2 += mv.species_error[i][n] * mv.species_error[i][n];
        }
        mv.mixture[n] = m.value();
        mv.mixture_error[n] = std::sqrt(e2);
        auto lse = [&](const std::vector<std::vector<double>>& v) {
            double hi = -INFINITY;
            for (int i = 0; i < P; ++i)
                hi = std::max(hi, v[i][n]);
            if (!std::isfinite(hi))
                return hi;
            double acc = 0.0;
            for (int i = 0; i < P; ++i)
                acc += std::exp(v[i][n] - hi);
            return hi + std::log(acc);
        };
        const double l1 = lse(log_s1), l2 = lse(log_s2);
        mv.mixture_ess[n] = std::isfinite(l1) ? std::exp(2.0 * l1 - l2) : 0.0;
    }
    return mv;
}

bool interpolation_check(const MomentVector& mom, double lambda1, double lambda, double lambda2,
                         double rel_slack)
{
    if (!(lambda1 <= lambda && lambda <= lambda2) || lambda1 == lambda2)
        throw std::invalid_argument("interpolation needs lambda1 <= lambda <= lambda2");
    const double tau = (lambda2 - lambda) / (lambda2 - lambda1);
    for (int i = 0; i < mom.n_species(); ++i) {
        if (mom.empty_species[i])
            continue;
        const double lhs = mom.at(i, lambda);
        const double rhs = std::pow(mom.at(i, lambda1), tau) * std::pow(mom.at(i, lambda2), 1 - tau);
        if (lhs > rhs * (1.0 + rel_slack))
            return false;
    }
    return true;
}

OdiInputs OdiInputs::from_moments(const MomentVector& mom, const MixtureSpec& mix)
{
    OdiInputs in;
    const std::size_t n0 = mom.index_of(0.0), n2 = mom.index_of(2.0);
    for (int i = 0; i < mom.n_species(); ++i) {
        in.m0.push_back(mom.species[i][n0]);
        in.m2.push_back(mom.species[i][n2]);
    }
    try {
        in.m_gamma_high = mom.mixture_at(mix.gamma_high());
    }
    catch (const std::out_of_range&) {
        in.m_gamma_high = 0.0;
    }
    return in;
}

double OdiInputs::m0_total() const
{
    double s = 0.0;
    for (double x : m0)
        s += x;
    return s;
}

double OdiInputs::m2_total() const
{
    double s = 0.0;
    for (double x : m2)
        s += x;
    return s;
}

OdiInputs OdiInputs::uniform_in_time() const
{
    OdiInputs out = *this;
    const double total = m2_total();
    std::fill(out.m2.begin(), out.m2.end(), total);
    return out;
}

double D_k(double k, const KernelConstants& kc, double m2)
{
    return 2.0 * c_tilde(k) * kc.max_kappa_ub() * m2;
}

OdiConstants compute_odi_constants(const OdiInputs& in, const KernelConstants& kc,
                                   const AveragingReport& avg, const MixtureSpec& mix, double k)
{
    const int P = mix.size();
    if (!avg.threshold_reached)
        throw ConfigError("averaging threshold was not reached; ODI constants undefined");
    if (k < avg.k_bar_star)
        throw ConfigError("order " + std::to_string(k) + " is below averaging threshold "
                          + std::to_string(avg.k_bar_star));
    if (!(k > 2.0))
        throw ConfigError("ODI constants need order k > 2");
    if (static_cast<int>(in.m0.size()) != P || static_cast<int>(in.m2.size()) != P)
        throw ConfigError("moment inputs do not match the species count");
    for (int i = 0; i < P; ++i)
        if (!(in.m0[i] > 0.0 && in.m2[i] > 0.0))
            throw ConfigError("species " + mix.species(i).name + " has no mass");

    OdiConstants c;
    c.k = k;
    c.k_bar_star = avg.k_bar_star;
    c.k_star = avg.k_star;
    c.gamma_low = mix.gamma_low();
    c.gamma_high = mix.gamma_high();
    c.m0 = in.m0_total();
    c.m2 = in.m2_total();
    c.A_tilde_ij = Matrix(P);
    c.A_star_ij = Matrix(P);
    c.log_K1 = Matrix(P);
    c.log_K2 = Matrix(P);

    double min_term = std::numeric_limits<double>::infinity();
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) {
            const double at = kc.kappa_lb(i, j) - 2.0 * C_at_order(avg, i, j, avg.k_bar_star);
            if (!(at > 0.0))
                throw NumericalError("non-positive absorption constant for pair "
                                     + pair_name(i, j, mix));
            c.A_tilde_ij(i, j) = at;
            c.A_star_ij(i, j) = at * kc.L(i, j);
            min_term = std::min(min_term, c.A_star_ij(i, j) * in.m0[j]);
        }
    c.A_star = 0.5 * min_term;
    c.epsilon = c.A_star / (2.0 * c.m0);
    const double log_eps = std::log(c.epsilon);

    std::vector<double> terms;
    double log_asym = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < P; ++i)
        for (int j = 0; j < P; ++j) {
            const double gi = mix.gamma_row_max(i), gj = mix.gamma_row_max(j);
            const double Ck = C_at_order(avg, i, j, k);
            const auto t = log_B_terms(k, gi, gj, log_eps, c.A_tilde_ij(i, j), Ck, in.m0[i],
                                       in.m2[i], in.m0[j], in.m2[j]);
            c.log_K1(i, j) = t.k1;
            c.log_K2(i, j) = t.k2;
            terms.push_back(t.k1);
            if (!t.k2_valid) {
                c.flagged_pairs.push_back(pair_name(i, j, mix));
                continue;
            }
            terms.push_back(t.k2);
            const double D = 2.0 + gj - gi;
            const double la = std::log(in.m0[j])
                              + (k / D)
                                    * std::log(16.0 * Ck * in.m2[i] * c.m0 / (in.m0[i] * c.A_star))
                              + ((2.0 + gj) / D) * std::log((2.0 + gj) / k)
                              + k * k / (2.0 * D) * std::numbers::ln2;
            log_asym = std::max(log_asym, la);
        }
    c.log_B_k = log_sum_exp(terms);
    c.B_k = std::exp(c.log_B_k);
    c.log_B_k_asymptotic = log_asym;
    c.D_k = D_k(k, kc, c.m2);
    const double g = c.gamma_low;
    c.log_E_k = g / (k - 2.0 + g) * std::log(c.m2)
                + (k - 2.0) / (k - 2.0 + g) * (c.log_B_k - std::log(c.A_star));
    c.E_k = std::exp(c.log_E_k);
    c.K_coll = collision_constant(in.m_gamma_high, kc);
    return c;
}

double h_frak(const OdiInputs& in, const KernelConstants& kc, const AveragingReport& avg,
              const MixtureSpec& mix)
{
    const auto c = compute_odi_constants(in, kc, avg, mix, avg.k_star);
    return c.E_k + c.B_k;
}

AsymptoticSlope B_k_asymptotic_slope(const OdiInputs& in, const KernelConstants& kc,
                                     const AveragingReport& avg, const MixtureSpec& mix,
                                     int window)
{
    AsymptoticSlope out;
    out.k_lo = std::max(avg.k_bar_star, 3);
    out.k_hi = out.k_lo + window;
    double sx = 0, sxx = 0, se = 0, sxe = 0, sa = 0, sxa = 0;
    int n = 0;
    for (double k = out.k_lo; k <= out.k_hi; k += 1.0, ++n) {
        const auto c = compute_odi_constants(in, kc, avg, mix, k);
        sx += k;
        sxx += k * k;
        se += c.log_B_k;
        sxe += k * c.log_B_k;
        sa += c.log_B_k_asymptotic;
        sxa += k * c.log_B_k_asymptotic;
    }
    const double den = n * sxx - sx * sx;
    out.exact = (n * sxe - sx * se) / den;
    out.asymptotic = (n * sxa - sx * sa) / den;
    return out;
}

double generation_envelope(const OdiConstants& c, double t)
{
    if (!(t > 0.0))
        throw std::invalid_argument("generation envelope needs t > 0");
    const double e = (c.k - 2.0) / c.gamma_low;
    const double decay = std::exp(e * (std::log((c.k - 2.0) / (c.gamma_low * c.A_star)) - std::log(t)));
    return c.E_k + c.m2 * decay;
}

double propagation_bound(const OdiConstants& c, double mk0) { return std::max(c.E_k, mk0); }

SubThresholdConstants sub_threshold_constants(const OdiInputs& in, const KernelConstants& kc,
                                              const AveragingReport& avg,
                                              const MixtureSpec& mix, double k)
{
    if (!(k > 2.0) || k >= avg.k_bar_star)
        throw ConfigError("sub-threshold envelopes need 2 < k < " + std::to_string(avg.k_bar_star));
    const auto next = compute_odi_constants(in, kc, avg, mix, avg.k_bar_star + 1.0);
    SubThresholdConstants s;
    s.k = k;
    s.k_bar_star = avg.k_bar_star;
    s.gamma_low = mix.gamma_low();
    s.m2 = next.m2;
    s.A_star = next.A_star;
    s.E_next = next.E_k;
    s.D_k = D_k(k, kc, s.m2);
    const double kb = avg.k_bar_star;
    const double e = (k - 2.0) / s.gamma_low;
    const double head = std::exp((kb - k + 1.0) / (kb - 1.0) * std::log(s.m2)
                                 + (k - 2.0) / (kb - 1.0) * next.log_E_k);
    s.E_tilde = head
                + std::exp(std::log(s.m2) / (kb - 1.0)
                           + e * (std::log((kb - 1.0) / (s.gamma_low * s.A_star))
                                  + std::log(s.D_k)));
    return s;
}

double sub_threshold_generation(const SubThresholdConstants& c, double t)
{
    if (!(t > 0.0))
        throw std::invalid_argument("generation envelope needs t > 0");
    const double kb = c.k_bar_star;
    const double e = (c.k - 2.0) / c.gamma_low;
    const double head = std::exp((kb - c.k + 1.0) / (kb - 1.0) * std::log(c.m2)
                                 + (c.k - 2.0) / (kb - 1.0) * std::log(c.E_next));
    return head
           + std::exp(std::log(c.m2) / (kb - 1.0)
                      + e * (std::log((kb - 1.0) / (c.gamma_low * c.A_star)) - std::log(t)));
}

double sub_threshold_propagation(const SubThresholdConstants& c, double mk0)
{
    return std::max(c.E_tilde, std::numbers::e * mk0);
}

ComparisonEnvelope::ComparisonEnvelope(double A, double B, double c) : A_{A}, B_{B}, c_{c}
{
    if (!(A > 0.0 && B > 0.0 && c > 0.0))
        throw std::invalid_argument("comparison envelope needs A, B, c > 0");
    E_ = std::pow(B / A, 1.0 / (1.0 + c));
    beta_ = 1.0 / c;
    K_ = std::pow(c * A, -1.0 / c) / E_;
}

double ComparisonEnvelope::operator()(double t) const
{
    if (!(t > 0.0))
        throw std::invalid_argument("comparison envelope needs t > 0");
    return E_ * (1.0 + K_ * std::pow(t, -beta_));
}

double collision_moment_bound(const MomentVector& mom_f, const MomentVector& mom_g, int i, int j,
                              const OdiConstants& c, const KernelConstants& kc,
                              const AveragingReport& avg, const MixtureSpec& mix, double k,
                              BoundRegime regime)
{
    const double m2f = mom_f.at(i, 2.0), m2g = mom_g.at(j, 2.0);
    if (regime == BoundRegime::any_k)
        return 2.0 * kc.kappa_ub(i, j) * c_tilde(k)
               * (m2f * mom_g.at(j, k) + mom_f.at(i, k) * m2g);

    if (k < avg.k_bar_star)
        throw ConfigError("order " + std::to_string(k) + " is below averaging threshold "
                          + std::to_string(avg.k_bar_star));
    const double gij = mix.gamma(i, j);
    const double gi = mix.gamma_row_max(i), gj = mix.gamma_row_max(j);
    const double m0f = mom_f.at(i, 0.0), m0g = mom_g.at(j, 0.0);
    const double log_eps = std::log(c.epsilon);
    const double Ck = C_at_order(avg, i, j, k);
    auto B = [&](int a, int b, double m0a, double m2a, double m0b, double m2b) {
        const auto t = log_B_terms(k, mix.gamma_row_max(a), mix.gamma_row_max(b), log_eps,
                                   c.A_tilde_ij(a, b), Ck, m0a, m2a, m0b, m2b);
        return std::exp(t.k1) + (t.k2_valid ? std::exp(t.k2) : 0.0);
    };
    double v = -c.A_star_ij(i, j) * m0g * mom_f.at(i, k + gij)
               - c.A_star_ij(j, i) * m0f * mom_g.at(j, k + gij);
    v += 4.0 * c.epsilon * (m0g * mom_f.at(i, k + gi) + m0f * mom_g.at(j, k + gj));
    v += B(i, j, m0f, m2f, m0g, m2g) + B(j, i, m0g, m2g, m0f, m2f);
    return v;
}

OmegaReport omega_membership(const MomentVector& mom, double h_frak_value, double k_star,
                             const MixtureSpec& mix, std::span<const double> C0, double C2,
                             double C_star, double rel_tol)
{
    OmegaReport r;
    r.h_frak = h_frak_value;
    auto close = [rel_tol](double a, double b) {
        return std::fabs(a - b) <= rel_tol * std::max(std::fabs(a), std::fabs(b));
    };
    if (C_star < h_frak_value) {
        r.rejected_config = true;
        r.reasons.push_back("C_star below E_k* + B_k*");
    }
    const int P = mix.size();
    if (static_cast<int>(C0.size()) != P)
        throw ConfigError("mass constants do not match the species count");

    bool omega = !r.rejected_config;
    for (int i = 0; i < P; ++i)
        if (!close(mom.at(i, 0.0), C0[i])) {
            omega = false;
            r.reasons.push_back("mass of " + mix.species(i).name + " differs from C0");
        }
    if (!close(mom.mixture_at(2.0), C2)) {
        omega = false;
        r.reasons.push_back("energy differs from C2");
    }
    if (!(mom.mixture_at(k_star) <= C_star)) {
        omega = false;
        r.reasons.push_back("moment of order k_star exceeds C_star");
    }
    r.in_omega = omega;

    bool tilde = true;
    for (int i = 0; i < P; ++i) {
        const double m0 = mom.at(i, 0.0);
        if (!(m0 > 0.0 && std::isfinite(m0))) {
            tilde = false;
            r.reasons.push_back("mass of " + mix.species(i).name + " not in (0, inf)");
        }
    }
    const double lambda = std::max(0.0, 2.0 + mix.gamma_high() - mix.gamma_low());
    double above = std::numeric_limits<double>::infinity();
    for (double o : mom.orders)
        if (o > lambda)
            above = std::min(above, o);
    if (!std::isfinite(above)) {
        tilde = false;
        r.reasons.push_back("no moment order above " + std::to_string(lambda));
    }
    else if (!std::isfinite(mom.mixture_at(above))) {
        tilde = false;
        r.reasons.push_back("moment above order " + std::to_string(lambda) + " is infinite");
    }
    r.in_omega_tilde = tilde;
    return r;
}

CauchyConstants cauchy_constants(double C_star, const KernelConstants& kc)
{
    const double kmax = kc.max_kappa_ub();
    return {6.0 * std::pow(C_star, 1.5) * kmax, 2.0 * C_star * kmax};
}

double collision_constant(double m_gamma_high, const KernelConstants& kc)
{
    return 2.0 * kc.max_kappa_ub() * m_gamma_high;
}

double collision_frequency_bound(const ParticleState& s, double m_gamma_high,
                                 const KernelConstants& kc, const MixtureSpec& mix)
{
    const double K = collision_constant(m_gamma_high, kc);
    return 0.5 * K * (1.0 + std::pow(bracket(s, mix), mix.gamma_high()));
}

double collision_frequency(const ParticleState& s, const Ensemble& ens, const KernelSpec& spec,
                           const MixtureSpec& mix, double tol)
{
    const int d = mix.dim();
    quad::Options opt;
    opt.rel_tol = tol;
    opt.abs_tol = 0.0;
    const int i = s.species;
    double total = 0.0;
    for (int j = 0; j < ens.n_species(); ++j) {
        const auto& kernel = spec.pair(i, j);
        // Both kernel forms factor as b(unit(u) . sigma) times a function of (r, R).
        PairKernelSpec flat = kernel.spec();
        flat.angular = AngularKernel::isotropic(1.0);
        const PairKernel iso(flat, i, j, mix);
        const double b_norm = kernel.angular().l1_norm(d);
        const Vec sigma = Vec::unit(d, 0);
        const auto R_br = iso.R_breaks();
        CompensatedSum sum;
        for (const auto& partner : ens.particles[j]) {
            auto at = [&](double r, double R) {
                return iso.eval(s, partner, CollisionParams{sigma, r, R}, mix);
            };
            double v = 0.0;
            switch (iso.cls()) {
            case InteractionClass::mono_mono: v = at(0.5, 1.0); break;
            case InteractionClass::poly_poly: {
                auto outer = [&](double R) {
                    return quad::integrate_beta([&](double r) { return at(r, R); },
                                                iso.alpha_a(), iso.alpha_b(), opt, iso.r_breaks(R))
                        .value;
                };
                v = quad::integrate_beta(outer, iso.weight_R_lower(), iso.weight_R_upper(), opt,
                                         R_br)
                        .value;
                break;
            }
            default:
                v = quad::integrate_beta([&](double R) { return at(0.5, R); },
                                         iso.weight_R_lower(), iso.weight_R_upper(), opt, R_br)
                        .value;
            }
            sum.add(v);
        }
        total += ens.weight[j] * b_norm * sum.value();
    }
    return total;
}

}  // namespace polymix
