#include <array>
#include <cmath>
#include <functional>

#include "doctest.h"
#include "sdq/chart.hpp"
#include "test_support.hpp"

using namespace sdq;
using namespace sdq::testing;

namespace {

DarbouxChart linear_symplectic() {
    DarbouxChart c;
    c.name = "linear";
    auto z1 = PhasePoly::variable(1, Basis::Chart, 0), z2 = PhasePoly::variable(1, Basis::Chart, 1);
    c.forward = {X(1) + P(1), P(1)};
    c.inverse = {z1 - z2, z2};
    return c;
}

/// Gamma^{abc} at a point from central finite differences of the forward map (M = 1).
double numeric_gamma(const DarbouxChart& chart, int a, int b, int c, std::array<double, 2> pt) {
    const double h = 1e-3;
    auto f = [&](int comp, std::array<double, 2> q) {
        return chart.forward[comp].evaluate(std::span<const double>(q.data(), 2)).real();
    };
    auto grad = [&](int comp, int i) {
        auto qp = pt, qm = pt;
        qp[i] += h;
        qm[i] -= h;
        return (f(comp, qp) - f(comp, qm)) / (2 * h);
    };
    auto hess = [&](int comp, int i, int j) {
        auto shift = [&](double si, double sj) {
            auto q = pt;
            q[i] += si;
            q[j] += sj;
            return f(comp, q);
        };
        return (shift(h, h) - shift(h, -h) - shift(-h, h) + shift(-h, -h)) / (4 * h * h);
    };
    double sum = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    int s = poisson_tensor(1, i, j) * poisson_tensor(1, k, l);
                    if (s != 0) sum += s * grad(a, i) * hess(b, j, l) * grad(c, k);
                }
    return sum;
}

}  // namespace

TEST_CASE("validate_chart") {
    CHECK(validate_chart(DarbouxChart::identity(1)).valid);
    CHECK(validate_chart(DarbouxChart::identity(2)).valid);
    CHECK(validate_chart(DarbouxChart::shear()).valid);
    CHECK(validate_chart(DarbouxChart::twist()).valid);
    CHECK(validate_chart(linear_symplectic()).valid);
    CHECK(validate_chart(DarbouxChart::coupled()).valid);
    CHECK(validate_chart(DarbouxChart::product(DarbouxChart::shear(), DarbouxChart::twist())).valid);

    auto broken = DarbouxChart::identity(1);
    broken.forward[1] = P(1) * Q(2);
    broken.inverse[1] = PhasePoly::variable(1, Basis::Chart, 1) * Q(1, 2);
    auto report = validate_chart(broken);
    CHECK_FALSE(report.valid);
    REQUIRE(!report.failures.empty());
    CHECK(report.failures[0].find("{z1,z2} = 2") != std::string::npos);

    auto bad_inverse = DarbouxChart::shear();
    bad_inverse.inverse[1] = PhasePoly::variable(1, Basis::Chart, 1);
    CHECK_FALSE(validate_chart(bad_inverse).valid);
}

TEST_CASE("gamma tensor") {
    CHECK(gamma(DarbouxChart::identity(1)).is_zero());
    CHECK(gamma(DarbouxChart::identity(2)).is_zero());
    CHECK(gamma(linear_symplectic()).is_zero());

    auto shear = DarbouxChart::shear();
    auto g = gamma(shear);
    CHECK(g.is_symmetric());
    // Engine value: a single constant entry Gamma^{222} = 2.
    CHECK(g(1, 1, 1) == C(1, 2));
    int nonzero = 0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) nonzero += g(a, b, c).is_zero() ? 0 : 1;
    CHECK(nonzero == 1);

    for (const auto& chart : {shear, DarbouxChart::twist()}) {
        auto gc = gamma(chart);
        for (std::array<double, 2> pt : {std::array<double, 2>{0.3, -0.7}, {0.6, 0.4}, {-0.5, 0.5}}) {
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c) {
                        double engine = gc(a, b, c).evaluate(std::span<const double>(pt.data(), 2)).real();
                        double numeric = numeric_gamma(chart, a, b, c, pt);
                        CHECK(engine == doctest::Approx(numeric).epsilon(1e-4).scale(1.0));
                    }
        }
    }
}

TEST_CASE("gamma rejects non-Darboux maps") {
    auto bad = DarbouxChart::identity(1);
    bad.forward = {X(1) + P(1) * P(1), P(1) + X(1) * X(1)};
    CHECK_THROWS_AS(gamma(bad), Error);
}

TEST_CASE("magic identity") {
    for (const auto& chart : {DarbouxChart::identity(1), DarbouxChart::shear(), DarbouxChart::twist(),
                              DarbouxChart::product(DarbouxChart::shear(), DarbouxChart::twist()), DarbouxChart::coupled()}) {
        for (const auto& r : magic_identity_defect(chart)) CHECK(r.residual.is_zero());
    }
    auto bad = DarbouxChart::identity(1);
    bad.forward = {X(1) + P(1) * P(1), P(1) + X(1) * X(1)};
    bool any_nonzero = false;
    for (const auto& r : magic_identity_defect_unchecked(bad)) any_nonzero |= !r.residual.is_zero();
    CHECK(any_nonzero);
}

TEST_CASE("actions and ladder symbols") {
    auto id = DarbouxChart::identity(1);
    CHECK(actions(id)[0] == harmonic_action(1));
    auto shear = DarbouxChart::shear();
    auto v = P(1) + X(1) * X(1);
    CHECK(actions(shear)[0] == (X(1) * X(1) + v * v) * Q(1, 2));
    for (const auto& chart : {id, shear, DarbouxChart::twist()}) {
        auto l = ladder(chart);
        CHECK(l.abar[0] * l.a[0] * Q(1, 2) == actions(chart)[0]);
    }
    auto prod = DarbouxChart::product(DarbouxChart::shear(), DarbouxChart::twist());
    auto I = actions(prod);
    CHECK(poisson_bracket(I[0], I[1]).is_zero());
}
