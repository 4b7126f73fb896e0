#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

namespace polymix {

//! Largest supported velocity-space dimension.
inline constexpr int kMaxDim = 8;

/// Fixed-capacity real vector of runtime dimension (2..kMaxDim).
class Vec {
  public:
    Vec() = default;
    explicit Vec(int dim) : dim_{dim} { assert(dim >= 0 && dim <= kMaxDim); }
    Vec(std::initializer_list<double> xs) : dim_{static_cast<int>(xs.size())}
    {
        assert(dim_ <= kMaxDim);
        std::size_t i = 0;
        for (double x : xs)
            data_[i++] = x;
    }

    static Vec zero(int dim) { return Vec(dim); }
    static Vec unit(int dim, int axis)
    {
        Vec e(dim);
        e[axis] = 1.0;
        return e;
    }

    [[nodiscard]] int dim() const { return dim_; }
    double& operator[](int i) { return data_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return data_[static_cast<std::size_t>(i)]; }

    std::span<double> values() { return {data_.data(), static_cast<std::size_t>(dim_)}; }
    std::span<const double> values() const
    {
        return {data_.data(), static_cast<std::size_t>(dim_)};
    }

    Vec& operator+=(const Vec& o)
    {
        for (int i = 0; i < dim_; ++i)
            data_[i] += o.data_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o)
    {
        for (int i = 0; i < dim_; ++i)
            data_[i] -= o.data_[i];
        return *this;
    }
    Vec& operator*=(double s)
    {
        for (int i = 0; i < dim_; ++i)
            data_[i] *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator-(Vec a) { return a *= -1.0; }

    friend bool operator==(const Vec& a, const Vec& b)
    {
        if (a.dim_ != b.dim_)
            return false;
        for (int i = 0; i < a.dim_; ++i)
            if (a.data_[i] != b.data_[i])
                return false;
        return true;
    }

  private:
    std::array<double, kMaxDim> data_{};
    int dim_ = 0;
};

inline double dot(const Vec& a, const Vec& b)
{
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm_sq(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

inline double max_abs(const Vec& a)
{
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        m = std::fmax(m, std::fabs(a[i]));
    return m;
}

//! Unit vector along a; returns the zero vector when a vanishes.
inline Vec normalized(const Vec& a)
{
    double n = norm(a);
    return n > 0.0 ? a * (1.0 / n) : Vec::zero(a.dim());
}

/// Orthonormal vectors completing `axis` (assumed unit) to a basis.
/// Entry 0 of the result is `axis` itself.
std::array<Vec, kMaxDim> orthonormal_frame(const Vec& axis);

/// Orthonormal frame whose first vector is `first` and whose second lies in
/// span(first, toward); falls back to an arbitrary completion when parallel.
std::array<Vec, kMaxDim> orthonormal_frame(const Vec& first, const Vec& toward);

}  // namespace polymix
