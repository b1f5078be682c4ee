#pragma once

#include <array>
#include <span>
#include <vector>

#include "sdq/chart.hpp"
#include "sdq/sdarboux.hpp"

namespace sdq {

/// Torsion-free symplectic connection in Darboux coordinates z, stored as the fully symmetric
/// Gamma_{abc} (chart basis). Christoffel symbols are Gamma^d_{ab} = J^{de} Gamma_{eab}.
struct SymplecticConnection {
    GammaTensor lower;
    bool derived_from_chart = false;

    int M() const { return lower.M(); }
    int dim() const { return lower.dim(); }
    PhasePoly christoffel(int d, int a, int b) const;

    /// Gamma = 0.
    static SymplecticConnection flat(int M);
    /// Throws unless the tensor is fully symmetric and in chart basis.
    static SymplecticConnection from_lower(GammaTensor lower);
};

/// The trivial connection of the domain coordinates written in chart coordinates:
/// Gamma^d_{ab} = (d z^d / d x^k) o x(z) * d_a d_b x^k(z).
SymplecticConnection connection_from_chart(const DarbouxChart& chart);

/// Fully symmetric rank-n array (n <= 3) of chart-basis polynomials.
class SymTensor {
public:
    SymTensor(int M, int rank);
    int M() const { return M_; }
    int dim() const { return 2 * M_; }
    int rank() const { return rank_; }
    const PhasePoly& at(std::span<const int> idx) const { return c_[flat(idx)]; }
    PhasePoly& at(std::span<const int> idx) { return c_[flat(idx)]; }
    const PhasePoly& operator()(int a, int b, int c) const;
    bool is_zero() const;
    bool is_symmetric() const;
    /// Average over all index permutations.
    SymTensor symmetrized() const;
    friend bool operator==(const SymTensor&, const SymTensor&) = default;

private:
    std::size_t flat(std::span<const int> idx) const;
    int M_, rank_;
    std::vector<PhasePoly> c_;
};

/// R_{a1a2a3}^d, symmetrized over (a1,a2,a3).
class RiemannTensor {
public:
    explicit RiemannTensor(int M);
    int M() const { return M_; }
    int dim() const { return 2 * M_; }
    const PhasePoly& operator()(int a1, int a2, int a3, int d) const { return c_[index(a1, a2, a3, d)]; }
    PhasePoly& operator()(int a1, int a2, int a3, int d) { return c_[index(a1, a2, a3, d)]; }
    bool is_zero() const;

private:
    std::size_t index(int a1, int a2, int a3, int d) const {
        const std::size_t n = dim();
        return ((a1 * n + a2) * n + a3) * n + d;
    }
    int M_;
    std::vector<PhasePoly> c_;
};

/// -d_{a3} Gamma^d_{a1a2} + d^d Gamma_{a1a2a3} + Gamma^e_{a1a3} Gamma^d_{e a2} + Gamma^e_{a2a3} Gamma^d_{e a1},
/// symmetrized over (a1,a2,a3), with d^d = J^{de} d_e.
RiemannTensor riemann(const SymplecticConnection& conn);

/// f^(0), ..., f^(n): f^(1) = grad f, f^(2) = nabla nabla f,
/// f^(3) = Sym(nabla nabla nabla f) - c_R Sym(R) . grad f.
std::vector<SymTensor> covariant_jets(const PhasePoly& f, const SymplecticConnection& conn, int n = 3,
                                      const Rational& c_R = 1);

/// {f,g}^nabla_n = f^(n)_{i..} J^{ij}.. g^(n)_{j..}.
PhasePoly covariant_bracket(const SymTensor& f_jet, const SymTensor& g_jet);

/// sum_{n<=3} (1/n!) (i hbar/2)^n {F,G}^nabla_n, Cauchy-combined over the hbar grading. Inputs and
/// output are chart-basis series of order <= 3.
HbarSeries fedosov_star(const HbarSeries& F, const HbarSeries& G, const SymplecticConnection& conn,
                        const Rational& c_R = 1);

HbarSeries fedosov_commutator(const HbarSeries& F, const HbarSeries& G, const SymplecticConnection& conn,
                              const Rational& c_R = 1);

/// Residual Sym(nabla nabla nabla z^d) - R_{a1a2a3}^d + d^d Gamma_{a1a2a3} for every (a1,a2,a3,d).
struct GMagicResidual {
    std::array<int, 4> index{};
    PhasePoly residual;
};
std::vector<GMagicResidual> gmagic_defect(const SymplecticConnection& conn);

/// Z2^d = (1/48) Gamma_{abc} {z^d, Gamma^{abc}} in chart coordinates.
std::vector<PhasePoly> fedosov_z2(const SymplecticConnection& conn);

/// Residuals {Z^i,Z^j}_F - i hbar J^{ij} (i < j) of the Fedosov bracket through hbar^3.
SDarbouxDefect fedosov_sdarboux_defect(const std::vector<HbarSeries>& Z, const SymplecticConnection& conn,
                                       const Rational& c_R = 1);

/// Z^d = z^d + hbar^2 Z2^d as order-3 chart-basis series.
std::vector<HbarSeries> fedosov_sdarboux_set(const SymplecticConnection& conn);

/// The second order rule with covariant brackets, all in chart coordinates z:
/// F2 o I = <H2 - K2 - Omega N2> with N2 = -(1/8){abar,a}^nabla_2 + (1/48) Gamma_{abc}{I,Gamma^{abc}} and
/// K2 = -(1/16){I^j,I^k}^nabla_2 d_jd_k f - (1/24)(I^j -> I^k <- I^l)^nabla d_jd_kd_l f.
/// h and H2 are chart-basis polynomials; f is an action polynomial with H0 = f o I.
std::vector<PhasePoly> fedosov_n2(const SymplecticConnection& conn, int ladder_sign = 1);
std::vector<PhasePoly> fedosov_k2(const std::vector<PhasePoly>& f, const SymplecticConnection& conn);
std::vector<PhasePoly> fedosov_f2(const std::vector<PhasePoly>& f, const std::vector<PhasePoly>& H2,
                                  const SymplecticConnection& conn, int ladder_sign = 1);

}  // namespace sdq
