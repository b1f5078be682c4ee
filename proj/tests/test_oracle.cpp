#include "doctest.h"
#include "sdq/ladder.hpp"
#include "sdq/moyal.hpp"
#include "sdq/oracle.hpp"
#include "test_support.hpp"

using namespace sdq;
using namespace sdq::testing;

namespace {

PhasePoly Iact() { return PhasePoly::variable(1, Basis::Action, 0); }

QuantumIntegrableSystem identity_system(const PhasePoly& f) {
    QuantumIntegrableSystem Q;
    Q.chart = DarbouxChart::identity(1);
    Q.f = {f};
    Q.H = {HbarSeries(action_to_domain(f, Q.chart))};
    return Q;
}

HbarSeries exact_product(const PhasePoly& f, const PhasePoly& g) {
    return moyal_star(HbarSeries(f, 6), HbarSeries(g, 6));
}

}  // namespace

TEST_CASE("basic Weyl matrices") {
    auto I = harmonic_action(1);
    for (double hbar : {1.0, 0.1}) {
        auto W = weyl_matrix(I, 16, hbar);
        for (int r = 0; r < 16; ++r)
            for (int c = 0; c < 16; ++c) {
                std::complex<double> expect = r == c ? hbar * (r + 0.5) : 0.0;
                CHECK(std::abs(W.entries(r, c) - expect) < 1e-12);
            }
    }
    auto Wx = weyl_matrix(X(1), 8, 2.0);
    CHECK(interior_difference(Wx.entries, position_matrix(8, 2.0), 0) < 1e-15);
    CHECK(std::abs(Wx.entries(0, 1) - std::complex<double>(1.0, 0)) < 1e-15);
    auto Wp = weyl_matrix(P(1), 8, 1.0);
    CHECK(Wp.hermiticity_residual() < 1e-15);

    auto W1 = weyl_matrix(I, 64, 1.0).entries;
    auto W2 = weyl_matrix(I * I, 64, 1.0).entries;
    Eigen::MatrixXcd expect = W1 * W1 + 0.25 * Eigen::MatrixXcd::Identity(64, 64);
    CHECK(interior_difference(W2, expect) < 1e-12);

    CHECK_THROWS_AS(weyl_matrix(X(2), 8, 1.0), Error);
    CHECK_THROWS_AS(weyl_matrix(I, 8, 0.0), Error);
}

TEST_CASE("Weyl quantization is linear and maps real symbols to Hermitian matrices") {
    std::mt19937 rng(31);
    for (int t = 0; t < 5; ++t) {
        auto f = random_poly(rng, 1, 4), g = random_poly(rng, 1, 4);
        auto a = weyl_matrix(f * Q(3, 2) + g, 32, 0.7).entries;
        auto b = 1.5 * weyl_matrix(f, 32, 0.7).entries + weyl_matrix(g, 32, 0.7).entries;
        CHECK(interior_difference(a, b, 0) < 1e-12);
        CHECK(weyl_matrix(f, 32, 0.7).hermiticity_residual() < 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("eigenvalues") {
    auto e = eigenvalues(weyl_matrix(harmonic_action(1), 16, 1.0));
    for (int n = 0; n < 16; ++n) CHECK(std::abs(e[n] - (n + 0.5)) < 1e-12);
    auto I = harmonic_action(1);
    auto e2 = eigenvalues(weyl_matrix(I * I, 64, 1.0));
    for (int n = 0; n <= 20; ++n) CHECK(std::abs(e2[n] - ((n + 0.5) * (n + 0.5) + 0.25)) < 1e-10);
    auto ones = eigenvalues(weyl_matrix(C(1, 1), 10, 1.0));
    for (double v : ones) CHECK(std::abs(v - 1.0) < 1e-14);
    CHECK_THROWS_AS(eigenvalues(weyl_matrix(X(1) * I_unit, 8, 1.0)), Error);
}

TEST_CASE("Weyl product consistency") {
    std::mt19937 rng(41);
    for (int t = 0; t < 6; ++t) {
        auto f = random_poly(rng, 1, 4, Basis::Ambient, 5, true);
        auto g = random_poly(rng, 1, 4, Basis::Ambient, 5, true);
        auto lhs = weyl_matrix(exact_product(f, g), 64, 1.0).entries;
        Eigen::MatrixXcd rhs = weyl_matrix(f, 64, 1.0).entries * weyl_matrix(g, 64, 1.0).entries;
        CHECK(interior_difference(lhs, rhs) < 1e-9);
    }
    // The opposite bracket sign would need P X - X P = i hbar.
    auto X1 = position_matrix(16, 1.0), P1 = momentum_matrix(16, 1.0);
    Eigen::MatrixXcd comm = X1 * P1 - P1 * X1;
    CHECK(std::abs(comm(3, 3) - std::complex<double>(0, 1)) < 1e-14);
}

TEST_CASE("convergence flags") {
    auto H = harmonic_action(1) + X(1).pow(4) * Q(1, 10);
    auto levels = converged_levels(HbarSeries(H), 32, 1.0, 31);
    CHECK(levels[0].converged);
    CHECK_FALSE(levels[31].converged);
    CHECK_THROWS_AS(converged_levels(HbarSeries(H), 8, 1.0, 8), Error);
}

TEST_CASE("oracle comparison") {
    auto rule1 = bs_rule(identity_system(Iact()));
    auto r1 = compare(rule1, HbarSeries(harmonic_action(1)), 32, {1.0, 0.1}, 10, false);
    CHECK(r1.rows.size() == 22);
    for (const auto& row : r1.rows) CHECK(row.diff <= 1e-10);

    auto Q2 = identity_system(Iact() * Iact());
    auto rule2 = bs_rule(Q2);
    auto r2 = compare(rule2, Q2.H[0], 64, {1.0, 0.1}, 20, false);
    for (const auto& row : r2.rows) CHECK(row.diff <= 1e-9);

    auto printed = bs_rule(Q2, {K2Source::PrintedSigns, false});
    auto bad = compare(printed, Q2.H[0], 64, {1.0}, 5, false);
    for (const auto& row : bad.rows) CHECK(row.diff == doctest::Approx(0.5));

    // Weyl(I^3) = Weyl(I)^3 + (5/4) hbar^2 Weyl(I): the rule is exact and no slope can be fitted.
    auto Q3 = identity_system(Iact().pow(3));
    auto r3 = compare(bs_rule(Q3), Q3.H[0], 64, {0.2, 0.1, 0.05, 0.025}, 8);
    for (std::size_t k = 0; k < r3.max_diff.size(); ++k) CHECK(r3.max_diff[k] <= r3.noise_floor[k]);
    CHECK_FALSE(r3.fit.has_value());

    auto Q4 = identity_system(Iact().pow(4));
    auto r4 = compare(bs_rule(Q4), Q4.H[0], 64, {0.2, 0.1, 0.05, 0.025}, 8);
    REQUIRE(r4.fit.has_value());
    CHECK(r4.fit->slope >= 3.5);
    CHECK(r4.fit->slope == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("number operators have integer spectra") {
    // The full shear p + x^2 conjugates by exp(i x^3 / 3 hbar), which the oscillator basis resolves
    // too slowly; a weaker shear keeps the same structure and converges.
    DarbouxChart weak;
    weak.name = "weak shear";
    auto z1 = PhasePoly::variable(1, Basis::Chart, 0), z2 = PhasePoly::variable(1, Basis::Chart, 1);
    weak.forward = {X(1), P(1) + X(1) * X(1) * Q(1, 10)};
    weak.inverse = {z1, z2 - z1 * z1 * Q(1, 10)};
    for (const auto& chart : {DarbouxChart::identity(1), weak}) {
        auto N = number_system(chart).N[0];
        for (double hbar : {1.0, 0.5}) {
            auto levels = converged_levels(N, 128, hbar, 8);
            int converged = 0;
            for (const auto& L : levels) {
                if (!L.converged) continue;
                ++converged;
                CHECK(std::abs(L.E_doubled / hbar - L.n) < 1e-6);
            }
            CHECK(converged == 9);
        }
    }
}
