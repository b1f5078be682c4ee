#pragma once

#include <optional>
#include <vector>

#include "sdq/phase_poly.hpp"

namespace sdq {

/// Default truncation order: powers hbar^0..hbar^6 are kept.
inline constexpr int kDefaultTruncation = 6;

/// Truncated formal power series in hbar with PhasePoly coefficients.
class HbarSeries {
public:
    HbarSeries() = default;
    HbarSeries(int M, Basis basis, int order = kDefaultTruncation);
    /// Series whose hbar^0 coefficient is p.
    HbarSeries(const PhasePoly& p, int order = kDefaultTruncation);

    static HbarSeries monomial(const PhasePoly& p, int power, int order = kDefaultTruncation);

    int M() const { return M_; }
    Basis basis() const { return basis_; }
    int order() const { return order_; }

    const PhasePoly& operator[](int k) const { return coeffs_.at(k); }
    PhasePoly& operator[](int k) { return coeffs_.at(k); }
    const std::vector<PhasePoly>& coeffs() const { return coeffs_; }
    const PhasePoly& principal() const { return coeffs_[0]; }

    bool is_zero() const;
    bool is_even() const;
    bool is_odd() const;
    /// Smallest hbar power with a nonzero coefficient.
    std::optional<int> first_nonzero_order() const;

    HbarSeries& operator+=(const HbarSeries& o);
    HbarSeries& operator-=(const HbarSeries& o);
    HbarSeries& operator*=(const GaussianRational& c);
    HbarSeries operator-() const;
    friend HbarSeries operator+(HbarSeries a, const HbarSeries& b) { return a += b; }
    friend HbarSeries operator-(HbarSeries a, const HbarSeries& b) { return a -= b; }
    friend HbarSeries operator*(HbarSeries a, const GaussianRational& c) { return a *= c; }
    friend HbarSeries operator*(const GaussianRational& c, HbarSeries a) { return a *= c; }
    /// Cauchy product of the pointwise (commutative) product, truncated.
    friend HbarSeries operator*(const HbarSeries& a, const HbarSeries& b);
    friend bool operator==(const HbarSeries& a, const HbarSeries& b) = default;

    /// Multiplies by hbar^k, dropping what falls past the truncation order.
    HbarSeries shifted(int k) const;
    HbarSeries truncated(int order) const;
    /// Applies f to each coefficient.
    template <class F>
    HbarSeries map(F&& f) const {
        HbarSeries r = *this;
        for (auto& c : r.coeffs_) c = f(c);
        if (!r.coeffs_.empty()) {
            r.M_ = r.coeffs_[0].M();
            r.basis_ = r.coeffs_[0].basis();
        }
        return r;
    }

    std::complex<double> evaluate(double hbar, std::span<const double> point) const;

private:
    void require_compatible(const HbarSeries& o, const char* op) const;

    int M_ = 1;
    Basis basis_ = Basis::Ambient;
    int order_ = kDefaultTruncation;
    std::vector<PhasePoly> coeffs_;
};

HbarSeries series_add(const HbarSeries& a, const HbarSeries& b);
HbarSeries series_mul(const HbarSeries& a, const HbarSeries& b);
HbarSeries series_scale(const HbarSeries& a, const GaussianRational& c);

}  // namespace sdq
