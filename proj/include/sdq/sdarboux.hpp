#pragma once

#include <optional>
#include <vector>

#include "sdq/chart.hpp"
#include "sdq/moyal.hpp"

namespace sdq {

/// Star-deformed chart coordinates Z^a = z^a + hbar(...) in the chart's domain basis.
struct SDarbouxSet {
    DarbouxChart chart;
    std::vector<HbarSeries> Z;

    /// Z^a = z^a with no corrections.
    static SDarbouxSet bare(const DarbouxChart& chart, int order = kDefaultTruncation);
    /// Z^a = z^a + hbar^2 Z2^a from z2_correction.
    static SDarbouxSet corrected(const DarbouxChart& chart, int order = kDefaultTruncation);
};

/// Z2^a = (1/48) Gamma_{bcd} {z^a, Gamma^{bcd}}, lower indices taken with J_{ab}.
std::vector<PhasePoly> z2_correction(const DarbouxChart& chart);

struct PairDefect {
    int i = 0;
    int j = 0;
    StarDefect defect;
};

/// Residuals {Z^i,Z^j}_* - i hbar J^{ij} for i < j.
struct SDarbouxDefect {
    std::vector<PairDefect> pairs;

    std::optional<int> first_nonzero_order() const;
    bool vanishes() const { return !first_nonzero_order().has_value(); }
    bool order_at_least(int k) const;
    /// hbar^k coefficient of the (i,j) residual, antisymmetric in (i,j).
    PhasePoly coefficient(int i, int j, int k) const;
};

SDarbouxDefect sdarboux_defect(const SDarbouxSet& S);

/// theta_a dz^a with components in chart variables.
struct PolyOneForm {
    int M = 1;
    std::vector<PhasePoly> c;

    explicit PolyOneForm(int M);
    int dim() const { return 2 * M; }
    bool is_zero() const;
};

/// sum_{a<b} w_{ab} dz^a ^ dz^b; storage keeps w_{ba} = -w_{ab}.
class PolyTwoForm {
public:
    explicit PolyTwoForm(int M);
    int M() const { return M_; }
    int dim() const { return 2 * M_; }
    const PhasePoly& operator()(int a, int b) const { return c_[a * dim() + b]; }
    void set(int a, int b, const PhasePoly& p);
    bool is_zero() const;
    friend bool operator==(const PolyTwoForm&, const PolyTwoForm&) = default;

private:
    int M_;
    std::vector<PhasePoly> c_;
};

/// Components u_{abc} for a < b < c.
struct PolyThreeForm {
    struct Component {
        int a, b, c;
        PhasePoly value;
    };
    int M = 1;
    std::vector<Component> components;

    bool is_zero() const;
    /// First nonzero component, if any.
    const Component* first_nonzero() const;
};

PolyTwoForm exterior_derivative(const PolyOneForm& theta);
PolyThreeForm exterior_derivative(const PolyTwoForm& w);

/// The hbar^k part of the defect as a 2-form: w_{ab} = J_{ai} E^{ij} J_{bj} with
/// {Z^i,Z^j}_* - i hbar J^{ij} = i hbar^k E^{ij} + O(hbar^{k+1}), k the first defect order.
/// Returns the zero form when S has no defect through truncation.
PolyTwoForm defect_two_form(const SDarbouxSet& S);

/// Radial primitive about z = 0: theta_b = sum_a z^a int_0^1 t w_{ab}(t z) dt. Throws if dw != 0.
PolyOneForm poincare_homotopy(const PolyTwoForm& w);

/// One inductive step: cancels the first nonzero defect order k by Z^i += hbar^{k-1} X^i.
/// Returns S unchanged when there is no defect.
SDarbouxSet extend_order(const SDarbouxSet& S);

}  // namespace sdq
