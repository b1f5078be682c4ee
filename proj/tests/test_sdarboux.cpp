#include <random>

#include "doctest.h"
#include "sdq/sdarboux.hpp"
#include "test_support.hpp"

using namespace sdq;
using namespace sdq::testing;

namespace {

PhasePoly Zc(int M, int a) { return PhasePoly::variable(M, Basis::Chart, a); }

/// hbar^3 coefficient of {Z^i,Z^j}_* for Z = z + hbar^2 Z2, written out with brackets only.
PhasePoly third_order_commutator(const PhasePoly& zi, const PhasePoly& zj, const PhasePoly& z2i,
                                 const PhasePoly& z2j) {
    auto body = poisson_bracket(zi, z2j) - poisson_bracket(zj, z2i) - higher_bracket(zi, zj, 3) * Q(1, 24);
    return body * I_unit;
}

DarbouxChart linear_symplectic() {
    DarbouxChart c;
    c.forward = {X(1) * Q(2) + P(1), X(1) + P(1)};
    c.inverse = {Zc(1, 0) - Zc(1, 1), Zc(1, 1) * Q(2) - Zc(1, 0)};
    return c;
}

}  // namespace

TEST_CASE("z2 vanishes for flat charts") {
    for (const auto& chart : {DarbouxChart::identity(1), DarbouxChart::identity(2), linear_symplectic()}) {
        REQUIRE(validate_chart(chart).valid);
        for (const auto& z : z2_correction(chart)) CHECK(z.is_zero());
        CHECK(sdarboux_defect(SDarbouxSet::bare(chart)).vanishes());
    }
}

TEST_CASE("the shear chart is already an exact s'Darboux set") {
    // x is linear, so every higher bracket with z1 terminates, and {z2, z2}_n is antisymmetric.
    auto shear = DarbouxChart::shear();
    CHECK(sdarboux_defect(SDarbouxSet::bare(shear)).vanishes());
    for (const auto& z : z2_correction(shear)) CHECK(z.is_zero());
}

TEST_CASE("bare defect appears at order 3 and matches the bracket expansion") {
    for (const auto& chart : {DarbouxChart::twist(), DarbouxChart::coupled()}) {
        REQUIRE(validate_chart(chart).valid);
        auto S = SDarbouxSet::bare(chart);
        auto D = sdarboux_defect(S);
        REQUIRE(D.first_nonzero_order().has_value());
        CHECK(*D.first_nonzero_order() == 3);
        PhasePoly zero(chart.M, chart.domain);
        for (const auto& p : D.pairs) {
            CHECK(p.defect.residual[3] ==
                  third_order_commutator(chart.forward[p.i], chart.forward[p.j], zero, zero));
        }
    }
}

TEST_CASE("z2 correction cancels the hbar^3 defect") {
    for (const auto& chart : {DarbouxChart::twist(), DarbouxChart::coupled(),
                              DarbouxChart::product(DarbouxChart::twist(), DarbouxChart::shear())}) {
        auto z2 = z2_correction(chart);
        const int n = 2 * chart.M;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                CHECK(third_order_commutator(chart.forward[i], chart.forward[j], z2[i], z2[j]).is_zero());
        auto D = sdarboux_defect(SDarbouxSet::corrected(chart));
        CHECK(D.order_at_least(5));
    }
    auto twist = DarbouxChart::twist();
    bool nonzero = false;
    for (const auto& z : z2_correction(twist)) nonzero |= !z.is_zero();
    CHECK(nonzero);
}

TEST_CASE("gauge shift keeps the corrected defect order") {
    auto chart = DarbouxChart::twist();
    auto S = SDarbouxSet::corrected(chart);
    auto gamma_poly = X(1) * X(1) * P(1) + P(1).pow(3) * Q(1, 3);
    for (int a = 0; a < 2; ++a) S.Z[a][2] += poisson_bracket(gamma_poly, chart.forward[a]);
    CHECK(sdarboux_defect(S).order_at_least(5));
}

TEST_CASE("exterior derivative and d o d") {
    std::mt19937 rng(31);
    for (int M : {1, 2}) {
        PolyOneForm theta(M);
        for (auto& c : theta.c) c = random_poly(rng, M, 4, Basis::Chart, 5, true);
        CHECK(exterior_derivative(exterior_derivative(theta)).is_zero());
    }
}

TEST_CASE("poincare homotopy") {
    PolyTwoForm w(1);
    w.set(0, 1, C(1, 1, 1, Basis::Chart));
    auto theta = poincare_homotopy(w);
    CHECK(theta.c[0] == Zc(1, 1) * Q(-1, 2));
    CHECK(theta.c[1] == Zc(1, 0) * Q(1, 2));
    CHECK(exterior_derivative(theta) == w);

    std::mt19937 rng(8);
    for (int M : {1, 2}) {
        for (int trial = 0; trial < 4; ++trial) {
            PolyOneForm alpha(M);
            for (auto& c : alpha.c) c = random_poly(rng, M, 5, Basis::Chart, 6, true);
            auto exact = exterior_derivative(alpha);
            CHECK(exterior_derivative(poincare_homotopy(exact)) == exact);
        }
    }

    PolyTwoForm open(2);
    open.set(0, 1, Zc(2, 2));
    CHECK_THROWS_AS(poincare_homotopy(open), Error);
}

TEST_CASE("defect two-form is closed at the first failing order") {
    for (const auto& chart : {DarbouxChart::twist(), DarbouxChart::coupled()}) {
        auto w = defect_two_form(SDarbouxSet::bare(chart));
        CHECK_FALSE(w.is_zero());
        CHECK(exterior_derivative(w).is_zero());
    }
    CHECK(defect_two_form(SDarbouxSet::bare(DarbouxChart::identity(2))).is_zero());
}

TEST_CASE("extend_order") {
    auto id = SDarbouxSet::bare(DarbouxChart::identity(1));
    auto same = extend_order(id);
    for (int a = 0; a < 2; ++a) CHECK(same.Z[a] == id.Z[a]);

    // Homotopy step from the bare chart agrees with z2 up to a gauge term.
    for (const auto& chart : {DarbouxChart::twist(), DarbouxChart::coupled()}) {
        auto S1 = extend_order(SDarbouxSet::bare(chart));
        CHECK(sdarboux_defect(S1).order_at_least(5));
        auto z2 = z2_correction(chart);
        const int n = 2 * chart.M;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                auto di = S1.Z[i][2] - z2[i], dj = S1.Z[j][2] - z2[j];
                CHECK((poisson_bracket(chart.forward[i], dj) - poisson_bracket(chart.forward[j], di)).is_zero());
            }
        }
        // A second step moves the defect past the truncation.
        auto S2 = extend_order(S1);
        CHECK(sdarboux_defect(S2).vanishes());
    }

    // Synthetic order-4 defect from an hbar^3 perturbation.
    auto chart = DarbouxChart::twist();
    auto S = SDarbouxSet::corrected(chart);
    S.Z[0][3] += X(1) * X(1) * P(1);
    S.Z[1][3] += P(1) * P(1) * Q(1, 2);
    auto before = sdarboux_defect(S);
    REQUIRE(before.first_nonzero_order().has_value());
    CHECK(*before.first_nonzero_order() == 4);
    auto w = defect_two_form(S);
    auto theta = poincare_homotopy(w);
    CHECK(exterior_derivative(theta) == w);
    CHECK(sdarboux_defect(extend_order(S)).order_at_least(5));
}
