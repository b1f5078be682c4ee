#include <random>

#include "doctest.h"
#include "sdq/moyal.hpp"
#include "test_support.hpp"

using namespace sdq;
using namespace sdq::testing;

namespace {

HbarSeries S(const PhasePoly& p, int order = kDefaultTruncation) { return HbarSeries(p, order); }

}  // namespace

TEST_CASE("moyal star examples") {
    const int M = 1;
    auto xp = moyal_star(S(X(M)), S(P(M)));
    CHECK(xp[0] == X(M) * P(M));
    CHECK(xp[1] == C(M, 1) * (I_unit * Q(1, 2)));
    for (int k = 2; k <= kDefaultTruncation; ++k) CHECK(xp[k].is_zero());

    // {I,I}_2 = 2 gives the third Moyal term (1/2)(i/2)^2 * 2 = -1/4.
    auto I = harmonic_action(M);
    auto II = moyal_star(S(I), S(I));
    CHECK(II[0] == I * I);
    CHECK(II[1].is_zero());
    CHECK(II[2] == C(M, -1, 4));
    CHECK(II.first_nonzero_order() == 0);

    std::mt19937 rng(3);
    auto f = random_series(rng, 2, 4, 6);
    auto one = S(C(2, 1));
    CHECK(moyal_star(f, one) == f);
    CHECK(moyal_star(one, f) == f);
}

TEST_CASE("star commutator examples") {
    const int M = 1;
    auto c = star_commutator(S(X(M)), S(P(M)));
    CHECK(c == HbarSeries::monomial(C(M, 1) * I_unit, 1));

    auto I = harmonic_action(M);
    auto f = X(M).pow(4);
    auto cf = star_commutator(S(I), S(f));
    CHECK(cf[1] == poisson_bracket(I, f) * I_unit);
    CHECK(cf.is_odd());
    // Quadratic I terminates the series after the first bracket.
    for (int k = 2; k <= kDefaultTruncation; ++k) CHECK(cf[k].is_zero());

    std::mt19937 rng(1);
    auto g = random_poly(rng, 2, 3);
    CHECK(star_commutator(S(g), S(g)).is_zero());
}

TEST_CASE("deformation postulates and parity on random inputs") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        const int M = 1 + trial % 2;
        auto f = random_poly(rng, M, 4), g = random_poly(rng, M, 4);
        auto fg = moyal_star(S(f), S(g));
        CHECK(fg[0] == f * g);
        CHECK(fg[1] == poisson_bracket(f, g) * (I_unit * Q(1, 2)));
        // Even series in, odd commutator out.
        HbarSeries F = S(f) + HbarSeries::monomial(random_poly(rng, M, 2), 2);
        HbarSeries G = S(g) + HbarSeries::monomial(random_poly(rng, M, 2), 2);
        CHECK(star_commutator(F, G).is_odd());
    }
}

TEST_CASE("associativity on explicit and random triples") {
    const int M = 1;
    auto d = associativity_defect(S(X(M)), S(P(M)), S(X(M)));
    CHECK(d.vanishes());

    std::mt19937 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        auto F = random_series(rng, 2, 3, 5), G = random_series(rng, 2, 3, 5), H = random_series(rng, 2, 3, 5);
        CHECK(associativity_defect(F, G, H).vanishes());
    }
}

TEST_CASE("corrupted product fails associativity at order 2") {
    const int M = 1;
    auto star = [](const HbarSeries& a, const HbarSeries& b) { return moyal_star_without_term(a, b, 2); };
    auto F = S(X(M) * X(M)), G = S(P(M) * P(M)), H = S(X(M) * P(M));
    StarDefect d(star(star(F, G), H) - star(F, star(G, H)));
    REQUIRE_FALSE(d.vanishes());
    CHECK(*d.first_nonzero_order == 2);
}

TEST_CASE("star product rejects mismatched inputs") {
    CHECK_THROWS_AS(moyal_star(S(X(1), 3), S(X(1), 4)), Error);
    CHECK_THROWS_AS(moyal_star(S(X(1)), S(X(2))), Error);
    auto lad = HbarSeries(PhasePoly::variable(1, Basis::Ladder, 0));
    CHECK_THROWS_AS(moyal_star(lad, lad), Error);
}
