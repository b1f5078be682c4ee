#include "sdq/hbar_series.hpp"

#include <algorithm>
#include <cmath>

namespace sdq {

HbarSeries::HbarSeries(int M, Basis basis, int order) : M_(M), basis_(basis), order_(order) {
    if (order < 0) throw Error("truncation order must be non-negative");
    coeffs_.assign(order + 1, PhasePoly(M, basis));
}

HbarSeries::HbarSeries(const PhasePoly& p, int order) : HbarSeries(p.M(), p.basis(), order) { coeffs_[0] = p; }

HbarSeries HbarSeries::monomial(const PhasePoly& p, int power, int order) {
    HbarSeries s(p.M(), p.basis(), order);
    if (power <= order) s.coeffs_[power] = p;
    return s;
}

bool HbarSeries::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const PhasePoly& p) { return p.is_zero(); });
}

bool HbarSeries::is_even() const {
    for (int k = 1; k <= order_; k += 2) {
        if (!coeffs_[k].is_zero()) return false;
    }
    return true;
}

bool HbarSeries::is_odd() const {
    for (int k = 0; k <= order_; k += 2) {
        if (!coeffs_[k].is_zero()) return false;
    }
    return true;
}

std::optional<int> HbarSeries::first_nonzero_order() const {
    for (int k = 0; k <= order_; ++k) {
        if (!coeffs_[k].is_zero()) return k;
    }
    return std::nullopt;
}

void HbarSeries::require_compatible(const HbarSeries& o, const char* op) const {
    if (M_ != o.M_ || basis_ != o.basis_ || order_ != o.order_) {
        throw Error(std::string(op) + ": mismatched series (M, basis or truncation differ)");
    }
}

HbarSeries& HbarSeries::operator+=(const HbarSeries& o) {
    require_compatible(o, "series add");
    for (int k = 0; k <= order_; ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
}

HbarSeries& HbarSeries::operator-=(const HbarSeries& o) {
    require_compatible(o, "series subtract");
    for (int k = 0; k <= order_; ++k) coeffs_[k] -= o.coeffs_[k];
    return *this;
}

HbarSeries& HbarSeries::operator*=(const GaussianRational& c) {
    for (auto& p : coeffs_) p *= c;
    return *this;
}

HbarSeries HbarSeries::operator-() const {
    HbarSeries r = *this;
    for (auto& p : r.coeffs_) p = -p;
    return r;
}

HbarSeries operator*(const HbarSeries& a, const HbarSeries& b) {
    a.require_compatible(b, "series multiply");
    HbarSeries r(a.M_, a.basis_, a.order_);
    for (int i = 0; i <= a.order_; ++i) {
        if (a.coeffs_[i].is_zero()) continue;
        for (int j = 0; i + j <= a.order_; ++j) {
            if (b.coeffs_[j].is_zero()) continue;
            r.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
    }
    return r;
}

HbarSeries HbarSeries::shifted(int k) const {
    HbarSeries r(M_, basis_, order_);
    for (int i = 0; i + k <= order_; ++i) {
        if (i + k >= 0) r.coeffs_[i + k] = coeffs_[i];
    }
    return r;
}

HbarSeries HbarSeries::truncated(int order) const {
    HbarSeries r(M_, basis_, order);
    for (int i = 0; i <= std::min(order, order_); ++i) r.coeffs_[i] = coeffs_[i];
    return r;
}

std::complex<double> HbarSeries::evaluate(double hbar, std::span<const double> point) const {
    std::complex<double> sum = 0;
    for (int k = order_; k >= 0; --k) sum = sum * hbar + coeffs_[k].evaluate(point);
    return sum;
}

HbarSeries series_add(const HbarSeries& a, const HbarSeries& b) { return a + b; }
HbarSeries series_mul(const HbarSeries& a, const HbarSeries& b) { return a * b; }
HbarSeries series_scale(const HbarSeries& a, const GaussianRational& c) { return a * c; }

}  // namespace sdq
