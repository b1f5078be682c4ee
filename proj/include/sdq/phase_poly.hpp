#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdq/gaussian_rational.hpp"

namespace sdq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Variable set a polynomial is written in.
///
/// Ambient: x^1..x^M, p^1..p^M.  Chart: z^1..z^{2M}.  Ladder: a^1..a^M, abar^1..abar^M,
/// with the convention that a stored coefficient c on a monomial of total degree d stands
/// for the real coefficient c * 2^{-d/2} (keeps every stored number rational).
/// Action: I^1..I^M (M variables, used for f, F2 and the frequency matrix).
enum class Basis { Ambient, Chart, Ladder, Action };

std::string basis_name(Basis b);
Basis basis_from_name(const std::string& s);

using Exponent = std::uint32_t;
using Monomial = std::vector<Exponent>;

/// Graded lexicographic order: lower total degree first, then lexicographically by exponent
/// vector with larger leading exponents sorting later.
struct GradedLex {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

unsigned total_degree(const Monomial& m);

class PhasePoly {
public:
    using Terms = std::map<Monomial, GaussianRational, GradedLex>;

    PhasePoly() = default;
    PhasePoly(int M, Basis basis);

    static PhasePoly constant(int M, Basis basis, const GaussianRational& c);
    /// The coordinate function with index `var` (0-based over nvars()).
    static PhasePoly variable(int M, Basis basis, int var);
    static PhasePoly monomial(int M, Basis basis, Monomial exps, const GaussianRational& c);

    int M() const { return M_; }
    Basis basis() const { return basis_; }
    int nvars() const { return basis_ == Basis::Action ? M_ : 2 * M_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    int degree() const;  // -1 for the zero polynomial
    bool is_real() const;

    GaussianRational coefficient(const Monomial& m) const;
    GaussianRational constant_term() const;

    /// Adds c * monomial, dropping the term if the result is zero.
    void add_term(const Monomial& m, const GaussianRational& c);

    PhasePoly& operator+=(const PhasePoly& o);
    PhasePoly& operator-=(const PhasePoly& o);
    PhasePoly& operator*=(const GaussianRational& c);
    PhasePoly operator-() const;

    friend PhasePoly operator+(PhasePoly a, const PhasePoly& b) { return a += b; }
    friend PhasePoly operator-(PhasePoly a, const PhasePoly& b) { return a -= b; }
    friend PhasePoly operator*(const PhasePoly& a, const PhasePoly& b);
    friend PhasePoly operator*(PhasePoly a, const GaussianRational& c) { return a *= c; }
    friend PhasePoly operator*(const GaussianRational& c, PhasePoly a) { return a *= c; }
    friend bool operator==(const PhasePoly& a, const PhasePoly& b);

    PhasePoly pow(unsigned k) const;
    PhasePoly conj() const;
    PhasePoly real_part() const;
    PhasePoly imag_part() const;

    /// d/d(var).
    PhasePoly derivative(int var) const;
    /// Mixed partial derivative with multi-index `orders`.
    PhasePoly derivative(std::span<const Exponent> orders) const;

    /// Substitutes subs[v] for variable v. All substitutes share one (M, basis); the result
    /// lives in that basis.
    PhasePoly substitute(const std::vector<PhasePoly>& subs) const;

    /// Same terms, new basis tag. The variable count must agree.
    PhasePoly retag(Basis basis) const;

    std::complex<double> evaluate(std::span<const double> point) const;
    std::complex<double> evaluate(std::span<const std::complex<double>> point) const;

    /// Human-readable infix text, parseable by the expression parser (ambient and action bases).
    std::string to_string() const;

private:
    void require_compatible(const PhasePoly& o, const char* op) const;

    int M_ = 1;
    Basis basis_ = Basis::Ambient;
    Terms terms_;
};

/// Variable names used by to_string: x1..xM,p1..pM / z1..z2M / a1..aM,b1..bM / I1..IM.
std::string variable_name(int M, Basis basis, int var);

}  // namespace sdq
