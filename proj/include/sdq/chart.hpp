#pragma once

#include <array>
#include <string>
#include <vector>

#include "sdq/phase_poly.hpp"

namespace sdq {

/// Polynomial canonical transformation z(x,p) with a polynomial inverse.
///
/// `forward[a]` is z^a written in the domain basis (normally ambient x,p); `inverse[v]` is the
/// v-th domain coordinate written in chart variables z.  The ladder sign s fixes
/// a^i = (z^i + s i z^{i+M}) / sqrt(2); s = +1 is the convention under which the harmonic
/// chart gives the number symbol I - hbar/2.
struct DarbouxChart {
    int M = 1;
    Basis domain = Basis::Ambient;
    std::vector<PhasePoly> forward;
    std::vector<PhasePoly> inverse;
    int ladder_sign = +1;
    std::string name;

    /// z = (x, p).
    static DarbouxChart identity(int M, Basis domain = Basis::Ambient);
    /// z = (x, p + x^2) for M = 1, inverse (z1, z2 - z1^2).
    static DarbouxChart shear();
    /// Composition of two shears: v = p + x^3, z = (x + v^3, v). Both shears have quartic
    /// generators, so the bare coordinates carry a genuine hbar^3 defect.
    static DarbouxChart twist();
    /// M = 2 chart mixing both degrees of freedom: v = (p1 + x1 x2^2, p2 + x1^2 x2),
    /// z = (x1 + v1 v2^2, x2 + v1^2 v2, v1, v2).
    static DarbouxChart coupled();
    /// `first` on the leading degrees of freedom, `second` on the remaining ones.
    static DarbouxChart product(const DarbouxChart& first, const DarbouxChart& second);

    /// Rewrites a domain-basis polynomial in chart variables.
    PhasePoly to_chart(const PhasePoly& f) const;
    /// Rewrites a chart-basis polynomial in domain variables.
    PhasePoly from_chart(const PhasePoly& g) const;
};

struct ChartReport {
    bool valid = true;
    std::vector<std::string> failures;
};

/// Checks {z^a,z^b} = J^{ab}, both compositions, and spot-checks I^i >= 0 on a sample grid.
ChartReport validate_chart(const DarbouxChart& chart, int grid_points = 5, double grid_radius = 2.0);

/// Fully symmetric 3-index array of polynomials, indices in 0..2M-1.
class GammaTensor {
public:
    GammaTensor() = default;
    GammaTensor(int M, Basis basis);

    int M() const { return M_; }
    int dim() const { return 2 * M_; }
    Basis basis() const { return basis_; }
    const PhasePoly& operator()(int a, int b, int c) const { return entries_[index(a, b, c)]; }
    PhasePoly& operator()(int a, int b, int c) { return entries_[index(a, b, c)]; }

    bool is_zero() const;
    bool is_symmetric() const;
    /// Indices moved with J_{ab} = -J^{ab}: T_{abc} = J_{aa'} J_{bb'} J_{cc'} T^{a'b'c'}.
    GammaTensor lowered() const;
    /// Indices moved with J^{ab}.
    GammaTensor raised() const;
    /// Applies f to every entry.
    template <class F>
    GammaTensor map(F&& f) const {
        GammaTensor r = *this;
        for (auto& e : r.entries_) e = f(e);
        if (!r.entries_.empty()) r.basis_ = r.entries_[0].basis();
        return r;
    }

    friend bool operator==(const GammaTensor&, const GammaTensor&) = default;
private:
    std::size_t index(int a, int b, int c) const { return (static_cast<std::size_t>(a) * dim() + b) * dim() + c; }

    int M_ = 1;
    Basis basis_ = Basis::Ambient;
    std::vector<PhasePoly> entries_;
};

/// Gamma^{abc} = d_i z^a J^{ij} d_j d_l z^b J^{kl} d_k z^c. Throws if the result is not symmetric.
GammaTensor gamma(const DarbouxChart& chart);

/// Residual {z^d, Gamma^{abc}} minus the three-arrow diagram into z^d, for every (a,b,c,d).
struct MagicResidual {
    std::array<int, 4> index{};
    PhasePoly residual;
};
std::vector<MagicResidual> magic_identity_defect(const DarbouxChart& chart);
/// Same check for a map that need not be Darboux (Gamma computed without the symmetry check).
std::vector<MagicResidual> magic_identity_defect_unchecked(const DarbouxChart& chart);

/// I^i = ((z^i)^2 + (z^{i+M})^2) / 2 in the domain basis.
std::vector<PhasePoly> actions(const DarbouxChart& chart);

/// sqrt(2) times the principal ladder symbols: a^i = scaled.a[i] / sqrt(2), likewise abar.
struct ScaledLadder {
    std::vector<PhasePoly> a;
    std::vector<PhasePoly> abar;
};
ScaledLadder ladder(const DarbouxChart& chart);

}  // namespace sdq
