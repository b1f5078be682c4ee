#include "doctest.h"
#include "sdq/number.hpp"
#include "test_support.hpp"

using namespace sdq;
using namespace sdq::testing;

namespace {

PhasePoly Iact(int M = 1, int i = 0) { return PhasePoly::variable(M, Basis::Action, i); }
PhasePoly Aconst(int M, long num, long den = 1) { return C(M, num, den, Basis::Action); }

HbarSeries hbar_const(int M, long num, long den, int power, int order = kDefaultTruncation) {
    return HbarSeries::monomial(C(M, num, den), power, order);
}

QuantumIntegrableSystem harmonic_system(const PhasePoly& f, int order = kDefaultTruncation) {
    QuantumIntegrableSystem Q;
    Q.chart = DarbouxChart::identity(1);
    Q.f = {f};
    Q.H = {HbarSeries(action_to_domain(f, Q.chart), order)};
    return Q;
}

}  // namespace

TEST_CASE("harmonic chart: ladder symbols, Dirac algebra and N") {
    auto NS = number_system(DarbouxChart::identity(1));
    CHECK(NS.L.a[0] == HbarSeries(X(1) + P(1) * I_unit));
    auto dirac = dirac_defect(NS.L);
    CHECK(dirac.order_at_least(kDefaultTruncation + 1));
    HbarSeries expected = HbarSeries(harmonic_action(1)) + hbar_const(1, -1, 2, 1);
    CHECK(NS.N[0] == expected);
    CHECK(n2_closed_form(DarbouxChart::identity(1))[0].is_zero());

    // The opposite ladder sign flips the hbar/2 shift and the orientation of the Dirac bracket.
    auto flipped = DarbouxChart::identity(1);
    flipped.ladder_sign = -1;
    auto NSf = number_system(flipped);
    CHECK(NSf.N[0] == HbarSeries(harmonic_action(1)) + hbar_const(1, 1, 2, 1));
    CHECK_FALSE(dirac_defect(NSf.L).order_at_least(2));
}

TEST_CASE("corrected ladder symbols satisfy the Dirac algebra") {
    auto twist = DarbouxChart::twist();
    auto L = ladder_series(SDarbouxSet::corrected(twist));
    CHECK(dirac_defect(L).order_at_least(5));
    auto bare = ladder_series(SDarbouxSet::bare(twist), 0);
    auto d = dirac_defect(bare);
    REQUIRE(d.first_nonzero_order().has_value());
    CHECK(*d.first_nonzero_order() == 3);
    CHECK_THROWS_AS(ladder_series(SDarbouxSet::bare(twist)), Error);
}

TEST_CASE("N2 closed form matches the engine") {
    for (const auto& chart : {DarbouxChart::shear(), DarbouxChart::twist()}) {
        auto NS = number_system(chart, 4);
        CHECK(NS.N[0][1] == C(1, -1, 2));
        CHECK(NS.N[0][2] == n2_closed_form(chart)[0]);
    }
    auto twist = DarbouxChart::twist();
    CHECK_FALSE(n2_closed_form(twist)[0].is_zero());
}

TEST_CASE("number symbols commute for M = 2 charts") {
    for (const auto& chart : {DarbouxChart::product(DarbouxChart::shear(), DarbouxChart::twist()),
                              DarbouxChart::coupled()}) {
        auto NS = number_system(chart, 5);
        CHECK(number_commutators(NS.N).order_at_least(5));
        CHECK(dirac_defect(NS.L).order_at_least(5));
        auto n2 = n2_closed_form(chart);
        for (int i = 0; i < 2; ++i) CHECK(NS.N[i][2] == n2[i]);
    }
}

TEST_CASE("star_compose examples") {
    auto NS = number_system(DarbouxChart::identity(1));
    auto I = harmonic_action(1);
    CHECK(star_compose(Iact(), NS.N) == HbarSeries(I));
    CHECK(star_compose(Iact() * Iact(), NS.N) == HbarSeries(I * I) + hbar_const(1, -1, 4, 2));
    CHECK(star_compose(Aconst(1, 7, 3), NS.N) == HbarSeries(C(1, 7, 3)));
    // Unshifted: (I - hbar/2) * (I - hbar/2).
    auto unshifted = star_compose(Iact() * Iact(), NS.N, false);
    CHECK(unshifted[1] == I * Q(-1));
    CHECK(unshifted[2] == C(1, 0));

    std::vector<HbarSeries> clash{HbarSeries(harmonic_action(2)), HbarSeries(X(2))};
    CHECK_THROWS_AS(star_compose(Iact(2) * Iact(2, 1), clash), Error);
}

TEST_CASE("K2 and Omega") {
    auto chart = DarbouxChart::identity(1);
    auto NS = number_system(chart);
    auto ko = k2_omega({Iact()}, NS.N, chart);
    CHECK(ko.K2[0].is_zero());
    CHECK(ko.Omega[0][0] == Aconst(1, 1));

    auto k2sq = k2_omega({Iact() * Iact()}, NS.N, chart);
    CHECK(k2sq.K2[0] == C(1, -1, 4));
    CHECK(k2_transcribed({Iact() * Iact()}, chart)[0] == C(1, -1, 4));
    CHECK(k2_transcribed({Iact() * Iact()}, chart, +1)[0] == C(1, 1, 4));

    auto cube = Iact().pow(3);
    auto k2cube = k2_omega({cube}, NS.N, chart);
    CHECK(k2cube.K2[0] == harmonic_action(1) * Q(-5, 4));
    CHECK(k2_transcribed({cube}, chart)[0] == k2cube.K2[0]);

    for (const auto& c : {DarbouxChart::shear(), DarbouxChart::twist()}) {
        auto N = number_system(c, 3).N;
        for (const auto& f : {Iact() * Iact(), cube}) CHECK(k2_omega({f}, N, c).K2[0] == k2_transcribed({f}, c)[0]);
    }
}

TEST_CASE("system validation") {
    auto Q = harmonic_system(Iact());
    CHECK(validate_system(Q).empty());
    Q.H[0][1] = X(1);
    CHECK_FALSE(validate_system(Q).empty());
    auto Q2 = harmonic_system(Iact());
    Q2.H[0][0] = X(1) * X(1);
    CHECK_FALSE(validate_system(Q2).empty());
}

TEST_CASE("good number correction") {
    SUBCASE("harmonic") {
        auto Q = harmonic_system(Iact());
        auto NS = number_system(Q.chart);
        auto out = good_number_correction(Q, NS);
        CHECK(out.G.is_zero());
        CHECK_FALSE(out.compatibility_order.has_value());
    }
    SUBCASE("closure on the shear chart") {
        auto chart = DarbouxChart::shear();
        auto F = Iact() + Iact() * Iact() * Q(1, 10);
        auto NS = number_system(chart);
        QuantumIntegrableSystem Qs{1, {star_compose(F, NS.N)}, chart, {F}};
        CHECK(validate_system(Qs).empty());
        auto out = good_number_correction(Qs, NS);
        CHECK(out.G.is_zero());
        CHECK((!out.compatibility_order || *out.compatibility_order >= 5));
    }
    SUBCASE("fluctuation is cancelled") {
        for (const auto& chart : {DarbouxChart::identity(1), DarbouxChart::shear()}) {
            auto f = Iact() + Iact() * Iact() * Q(1, 10);
            auto NS = number_system(chart);
            auto h = action_to_domain(f, chart);
            auto gam = X(1).pow(3) + X(1) * P(1) * Q(1, 2);
            auto gam_fluct = from_ladder(angle_fluctuation(to_ladder(gam, chart)), chart);
            HbarSeries H = star_compose(f, NS.N) + HbarSeries::monomial(poisson_bracket(gam, h), 2);
            QuantumIntegrableSystem Qs{1, {H}, chart, {f}};
            REQUIRE(validate_system(Qs).empty());
            CHECK_FALSE(compatibility_defect(NS.N, Qs.H).order_at_least(5));
            auto out = good_number_correction(Qs, NS);
            CHECK(out.G == gam_fluct);
            CHECK(out.compatibility_order.value_or(99) >= 5);
            // <N'_2> = <N_2>
            CHECK(angle_average(to_ladder(out.N[0][2], chart)) == angle_average(to_ladder(NS.N[0][2], chart)));
            CHECK(angle_derivative(to_ladder(out.G, chart), 0, chart.ladder_sign) == out.G_gradients[0]);
        }
    }
    SUBCASE("resonance is reported") {
        auto chart = DarbouxChart::identity(2);
        auto f = Iact(2) + Iact(2, 1);
        auto NS = number_system(chart);
        HbarSeries H = star_compose(f, NS.N);
        H[2] += X(2) * X(2, 1) + P(2) * P(2, 1);
        QuantumIntegrableSystem Qs{2, {H, H}, chart, {f, f}};
        try {
            good_number_correction(Qs, NS);
            FAIL("expected a resonance error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("resonance at charge (-1,1)") != std::string::npos);
        }
    }
    SUBCASE("non-polynomial division is reported") {
        auto chart = DarbouxChart::identity(1);
        auto f = Iact() + Iact() * Iact() * Q(1, 10);
        auto NS = number_system(chart);
        HbarSeries H = star_compose(f, NS.N);
        H[2] += X(1);
        QuantumIntegrableSystem Qs{1, {H}, chart, {f}};
        CHECK_THROWS_WITH_AS(good_number_correction(Qs, NS), doctest::Contains("non-polynomial correction"), Error);
    }
}

TEST_CASE("bs_rule") {
    auto r1 = bs_rule(harmonic_system(Iact()));
    CHECK(r1.F2[0].is_zero());

    auto r2 = bs_rule(harmonic_system(Iact() * Iact()));
    CHECK(r2.F2[0] == Aconst(1, 1, 4));

    auto r3 = bs_rule(harmonic_system(Iact().pow(3)));
    CHECK(r3.F2[0] == Iact() * Q(5, 4));

    BSOptions printed{K2Source::PrintedSigns, false};
    auto bad = bs_rule(harmonic_system(Iact() * Iact()), printed);
    CHECK(bad.F2[0] == Aconst(1, -1, 4));
    printed.verify = true;
    CHECK_THROWS_AS(bs_rule(harmonic_system(Iact() * Iact()), printed), Error);

    // Closure: quantize F = f + hbar^2 g, extract it back.
    auto chart = DarbouxChart::shear();
    auto f = Iact() + Iact() * Iact() * Q(1, 10);
    auto g = Iact() * Q(3) + Aconst(1, 1, 7);
    auto NS = number_system(chart);
    HbarSeries H = star_compose(f, NS.N) + star_compose(g, NS.N).shifted(2);
    BSDiagnostics diag;
    auto rule = bs_rule({1, {H}, chart, {f}}, {}, &diag);
    CHECK(rule.f[0] == f);
    CHECK(rule.F2[0] == g);
    CHECK(diag.residual_order.value_or(99) >= 4);
    CHECK(diag.compatibility_order.value_or(99) >= 5);
}

TEST_CASE("spectrum") {
    EBKRule harmonic{1, {Iact()}, {Aconst(1, 0)}, true};
    auto t = spectrum(harmonic, 1.0, {{0}, {1}, {2}, {3}});
    for (int n = 0; n < 4; ++n) CHECK(t.rows[n].E_ebk[0] == doctest::Approx(n + 0.5));

    EBKRule quartic{1, {Iact() * Iact()}, {Aconst(1, 1, 4)}, true};
    CHECK(spectrum(quartic, 1.0, {{0}}).rows[0].E_ebk[0] == doctest::Approx(0.5));
    CHECK(spectrum(quartic, 0.1, {{2}}).rows[0].E_ebk[0] == doctest::Approx(0.065));
    CHECK_THROWS_AS(spectrum(quartic, 1.0, {{-1}}), Error);
    CHECK_THROWS_AS(spectrum(quartic, 0.0, {{1}}), Error);
}
