#include "sdq/phase_poly.hpp"

#include <algorithm>
#include <numeric>

namespace sdq {

std::string basis_name(Basis b) {
    switch (b) {
        case Basis::Ambient: return "ambient";
        case Basis::Chart: return "chart";
        case Basis::Ladder: return "ladder";
        case Basis::Action: return "action";
    }
    return "?";
}

Basis basis_from_name(const std::string& s) {
    if (s == "ambient") return Basis::Ambient;
    if (s == "chart") return Basis::Chart;
    if (s == "ladder") return Basis::Ladder;
    if (s == "action") return Basis::Action;
    throw Error("unknown basis '" + s + "'");
}

unsigned total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), 0u); }

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    // Among equal degree, a monomial with a larger exponent on an earlier variable is "bigger".
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

PhasePoly::PhasePoly(int M, Basis basis) : M_(M), basis_(basis) {
    if (M < 1) throw Error("dimension count M must be positive");
}

PhasePoly PhasePoly::constant(int M, Basis basis, const GaussianRational& c) {
    PhasePoly p(M, basis);
    p.add_term(Monomial(p.nvars(), 0), c);
    return p;
}

PhasePoly PhasePoly::variable(int M, Basis basis, int var) {
    PhasePoly p(M, basis);
    if (var < 0 || var >= p.nvars()) throw Error("variable index out of range");
    Monomial m(p.nvars(), 0);
    m[var] = 1;
    p.add_term(m, GaussianRational(1));
    return p;
}

PhasePoly PhasePoly::monomial(int M, Basis basis, Monomial exps, const GaussianRational& c) {
    PhasePoly p(M, basis);
    if (static_cast<int>(exps.size()) != p.nvars()) throw Error("monomial length does not match basis");
    p.add_term(exps, c);
    return p;
}

int PhasePoly::degree() const {
    if (terms_.empty()) return -1;
    return static_cast<int>(total_degree(terms_.rbegin()->first));
}

bool PhasePoly::is_real() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_real(); });
}

GaussianRational PhasePoly::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? GaussianRational() : it->second;
}

GaussianRational PhasePoly::constant_term() const { return coefficient(Monomial(nvars(), 0)); }

void PhasePoly::add_term(const Monomial& m, const GaussianRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void PhasePoly::require_compatible(const PhasePoly& o, const char* op) const {
    if (M_ != o.M_ || basis_ != o.basis_) {
        throw Error(std::string(op) + ": mismatched polynomials (M=" + std::to_string(M_) + " " +
                    basis_name(basis_) + " vs M=" + std::to_string(o.M_) + " " + basis_name(o.basis_) + ")");
    }
}

PhasePoly& PhasePoly::operator+=(const PhasePoly& o) {
    require_compatible(o, "add");
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

PhasePoly& PhasePoly::operator-=(const PhasePoly& o) {
    require_compatible(o, "subtract");
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

PhasePoly& PhasePoly::operator*=(const GaussianRational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

PhasePoly PhasePoly::operator-() const {
    PhasePoly r = *this;
    for (auto& [m, v] : r.terms_) v = -v;
    return r;
}

PhasePoly operator*(const PhasePoly& a, const PhasePoly& b) {
    a.require_compatible(b, "multiply");
    PhasePoly r(a.M_, a.basis_);
    Monomial m(a.nvars());
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            for (std::size_t v = 0; v < m.size(); ++v) m[v] = ma[v] + mb[v];
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

bool operator==(const PhasePoly& a, const PhasePoly& b) {
    return a.M_ == b.M_ && a.basis_ == b.basis_ && a.terms_ == b.terms_;
}

PhasePoly PhasePoly::pow(unsigned k) const {
    PhasePoly result = constant(M_, basis_, GaussianRational(1));
    PhasePoly base = *this;
    while (k > 0) {
        if (k & 1u) result = result * base;
        k >>= 1u;
        if (k > 0) base = base * base;
    }
    return result;
}

PhasePoly PhasePoly::conj() const {
    PhasePoly r = *this;
    for (auto& [m, v] : r.terms_) v = v.conj();
    return r;
}

PhasePoly PhasePoly::real_part() const {
    PhasePoly r(M_, basis_);
    for (const auto& [m, v] : terms_) r.add_term(m, GaussianRational(v.re()));
    return r;
}

PhasePoly PhasePoly::imag_part() const {
    PhasePoly r(M_, basis_);
    for (const auto& [m, v] : terms_) r.add_term(m, GaussianRational(v.im()));
    return r;
}

PhasePoly PhasePoly::derivative(int var) const {
    PhasePoly r(M_, basis_);
    for (const auto& [m, c] : terms_) {
        if (m[var] == 0) continue;
        Monomial d = m;
        d[var] -= 1;
        r.add_term(d, c * GaussianRational(static_cast<long>(m[var])));
    }
    return r;
}

PhasePoly PhasePoly::derivative(std::span<const Exponent> orders) const {
    PhasePoly r(M_, basis_);
    Monomial d(nvars());
    for (const auto& [m, c] : terms_) {
        mpz_class factor = 1;
        bool vanishes = false;
        for (int v = 0; v < nvars(); ++v) {
            if (m[v] < orders[v]) {
                vanishes = true;
                break;
            }
            for (Exponent j = 0; j < orders[v]; ++j) factor *= (m[v] - j);
            d[v] = m[v] - orders[v];
        }
        if (!vanishes) r.add_term(d, c * GaussianRational(Rational(factor)));
    }
    return r;
}

PhasePoly PhasePoly::substitute(const std::vector<PhasePoly>& subs) const {
    if (static_cast<int>(subs.size()) != nvars()) throw Error("substitute: wrong number of substitutes");
    const int M = subs.front().M();
    const Basis target = subs.front().basis();
    for (const auto& s : subs) {
        if (s.M() != M || s.basis() != target) throw Error("substitute: substitutes disagree in M or basis");
    }
    // Cache powers of each substitute.
    std::vector<std::vector<PhasePoly>> powers(subs.size());
    auto power = [&](std::size_t v, Exponent k) -> const PhasePoly& {
        auto& cache = powers[v];
        if (cache.empty()) cache.push_back(constant(M, target, GaussianRational(1)));
        while (cache.size() <= k) cache.push_back(cache.back() * subs[v]);
        return cache[k];
    };
    PhasePoly r(M, target);
    for (const auto& [m, c] : terms_) {
        PhasePoly term = constant(M, target, c);
        for (std::size_t v = 0; v < m.size(); ++v) {
            if (m[v] > 0) term = term * power(v, m[v]);
        }
        r += term;
    }
    return r;
}

PhasePoly PhasePoly::retag(Basis basis) const {
    PhasePoly r(M_, basis);
    if (r.nvars() != nvars()) throw Error("retag: variable count differs");
    r.terms_ = terms_;
    return r;
}

std::complex<double> PhasePoly::evaluate(std::span<const double> point) const {
    std::vector<std::complex<double>> z(point.begin(), point.end());
    return evaluate(std::span<const std::complex<double>>(z));
}

std::complex<double> PhasePoly::evaluate(std::span<const std::complex<double>> point) const {
    if (static_cast<int>(point.size()) != nvars()) throw Error("evaluate: point has wrong dimension");
    std::complex<double> sum = 0;
    for (const auto& [m, c] : terms_) {
        std::complex<double> t = c.to_complex();
        for (std::size_t v = 0; v < m.size(); ++v) {
            for (Exponent k = 0; k < m[v]; ++k) t *= point[v];
        }
        sum += t;
    }
    return sum;
}

std::string variable_name(int M, Basis basis, int var) {
    switch (basis) {
        case Basis::Ambient: return (var < M ? "x" : "p") + std::to_string(var % M + 1);
        case Basis::Chart: return "z" + std::to_string(var + 1);
        case Basis::Ladder: return (var < M ? "a" : "b") + std::to_string(var % M + 1);
        case Basis::Action: return "I" + std::to_string(var + 1);
    }
    return "?";
}

namespace {

std::string coefficient_text(const GaussianRational& c) {
    if (c.is_real()) return c.re().get_str();
    if (sgn(c.re()) == 0) return c.im().get_str() + "*i";
    return "(" + c.re().get_str() + "+" + c.im().get_str() + "*i)";
}

}  // namespace

std::string PhasePoly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        std::string factors;
        for (int v = 0; v < nvars(); ++v) {
            if (m[v] == 0) continue;
            if (!factors.empty()) factors += "*";
            factors += variable_name(M_, basis_, v);
            if (m[v] > 1) factors += "^" + std::to_string(m[v]);
        }
        GaussianRational coef = c;
        bool negative = coef.is_real() && sgn(coef.re()) < 0;
        if (negative) coef = -coef;
        std::string ctext = coefficient_text(coef);
        std::string term;
        if (factors.empty()) {
            term = ctext;
        } else if (coef == GaussianRational(1)) {
            term = factors;
        } else {
            term = ctext + "*" + factors;
        }
        if (first) {
            out += negative ? "-" + term : term;
        } else {
            out += negative ? " - " + term : " + " + term;
        }
        first = false;
    }
    return out;
}

}  // namespace sdq
