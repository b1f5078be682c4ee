#include "sdq/ladder.hpp"

#include <set>

namespace sdq {

namespace {

void require_ladder(const PhasePoly& g, const char* op) {
    if (g.basis() != Basis::Ladder) throw Error(std::string(op) + ": polynomial must be in ladder basis");
}

Rational pow2(int k) {
    mpz_class p = 1;
    p <<= (k >= 0 ? k : -k);
    Rational r = k >= 0 ? Rational(p) : Rational(mpz_class(1), p);
    r.canonicalize();
    return r;
}

}  // namespace

ChargeVector charge(int M, const Monomial& m) {
    ChargeVector q(M);
    for (int i = 0; i < M; ++i) q[i] = static_cast<int>(m[i]) - static_cast<int>(m[M + i]);
    return q;
}

PhasePoly to_ladder(const PhasePoly& f, const DarbouxChart& chart) {
    const int M = chart.M;
    PhasePoly g = chart.to_chart(f);
    const GaussianRational minus_si = GaussianRational::i() * GaussianRational(-chart.ladder_sign);
    std::vector<PhasePoly> subs(2 * M);
    for (int i = 0; i < M; ++i) {
        PhasePoly a = PhasePoly::variable(M, Basis::Ladder, i);
        PhasePoly ab = PhasePoly::variable(M, Basis::Ladder, M + i);
        subs[i] = a + ab;
        subs[M + i] = (a - ab) * minus_si;
    }
    return g.substitute(subs);
}

PhasePoly from_ladder(const PhasePoly& g, const DarbouxChart& chart) {
    require_ladder(g, "from_ladder");
    const int M = chart.M;
    const GaussianRational si = GaussianRational::i() * GaussianRational(chart.ladder_sign);
    std::vector<PhasePoly> subs(2 * M);
    for (int i = 0; i < M; ++i) {
        PhasePoly z = PhasePoly::variable(M, Basis::Chart, i);
        PhasePoly w = PhasePoly::variable(M, Basis::Chart, M + i);
        subs[i] = z + w * si;
        subs[M + i] = z - w * si;
    }
    // Split by degree so the implicit 2^{-d/2} weights become 2^{-d} after substitution.
    std::map<unsigned, PhasePoly> by_degree;
    for (const auto& [m, c] : g.terms()) {
        auto [it, _] = by_degree.try_emplace(total_degree(m), PhasePoly(M, Basis::Ladder));
        it->second.add_term(m, c);
    }
    PhasePoly chart_poly(M, Basis::Chart);
    for (const auto& [d, part] : by_degree) {
        chart_poly += part.substitute(subs) * GaussianRational(pow2(-static_cast<int>(d)));
    }
    return chart.from_chart(chart_poly);
}

PhasePoly charge_component(const PhasePoly& g, const ChargeVector& q) {
    require_ladder(g, "charge_component");
    PhasePoly r(g.M(), Basis::Ladder);
    for (const auto& [m, c] : g.terms()) {
        if (charge(g.M(), m) == q) r.add_term(m, c);
    }
    return r;
}

std::vector<ChargeVector> charges(const PhasePoly& g) {
    require_ladder(g, "charges");
    std::set<ChargeVector> qs;
    for (const auto& [m, c] : g.terms()) qs.insert(charge(g.M(), m));
    return {qs.begin(), qs.end()};
}

PhasePoly angle_average(const PhasePoly& g) {
    require_ladder(g, "angle_average");
    return charge_component(g, ChargeVector(g.M(), 0));
}

PhasePoly angle_fluctuation(const PhasePoly& g) { return g - angle_average(g); }

PhasePoly as_action_polynomial(const PhasePoly& g) {
    require_ladder(g, "as_action_polynomial");
    const int M = g.M();
    PhasePoly r(M, Basis::Action);
    for (const auto& [m, c] : g.terms()) {
        Monomial e(M);
        int half_degree = 0;
        for (int i = 0; i < M; ++i) {
            if (m[i] != m[M + i]) throw Error("as_action_polynomial: nonzero charge component present");
            e[i] = m[i];
            half_degree += static_cast<int>(m[i]);
        }
        r.add_term(e, c * GaussianRational(pow2(-half_degree)));
    }
    return r;
}

PhasePoly action_to_ladder(const PhasePoly& f) {
    if (f.basis() != Basis::Action) throw Error("action_to_ladder: expected an action polynomial");
    const int M = f.M();
    PhasePoly r(M, Basis::Ladder);
    for (const auto& [m, c] : f.terms()) {
        Monomial e(2 * M);
        int half_degree = 0;
        for (int i = 0; i < M; ++i) {
            e[i] = e[M + i] = m[i];
            half_degree += static_cast<int>(m[i]);
        }
        r.add_term(e, c * GaussianRational(pow2(half_degree)));
    }
    return r;
}

PhasePoly action_to_domain(const PhasePoly& f, const DarbouxChart& chart) {
    if (f.basis() != Basis::Action || f.M() != chart.M) throw Error("action_to_domain: expected an action polynomial");
    return f.substitute(actions(chart));
}

PhasePoly angle_derivative(const PhasePoly& g, int i, int ladder_sign) {
    require_ladder(g, "angle_derivative");
    PhasePoly r(g.M(), Basis::Ladder);
    const GaussianRational factor = GaussianRational::i() * GaussianRational(-ladder_sign);
    for (const auto& [m, c] : g.terms()) {
        long q = static_cast<long>(m[i]) - static_cast<long>(m[g.M() + i]);
        if (q != 0) r.add_term(m, c * factor * GaussianRational(q));
    }
    return r;
}

PhasePoly angle_average_in_chart(const PhasePoly& f, const DarbouxChart& chart) {
    return from_ladder(angle_average(to_ladder(f, chart)), chart);
}

std::optional<PhasePoly> exact_divide(const PhasePoly& num, const PhasePoly& den) {
    if (den.is_zero()) throw Error("exact_divide: division by zero polynomial");
    if (num.M() != den.M() || num.basis() != den.basis()) throw Error("exact_divide: mismatched polynomials");
    PhasePoly quotient(num.M(), num.basis());
    PhasePoly rem = num;
    const auto& [lead_m, lead_c] = *den.terms().rbegin();
    while (!rem.is_zero()) {
        const auto& [rm, rc] = *rem.terms().rbegin();
        Monomial q(rm.size());
        for (std::size_t v = 0; v < rm.size(); ++v) {
            if (rm[v] < lead_m[v]) return std::nullopt;
            q[v] = rm[v] - lead_m[v];
        }
        PhasePoly step = PhasePoly::monomial(num.M(), num.basis(), q, rc / lead_c);
        quotient += step;
        rem -= step * den;
    }
    return quotient;
}

std::optional<PhasePoly> divide_by_action(const PhasePoly& g, const PhasePoly& divisor) {
    require_ladder(g, "divide_by_action");
    const int M = g.M();
    if (g.is_zero()) return g;
    auto qs = charges(g);
    if (qs.size() != 1) throw Error("divide_by_action: input must carry a single charge");
    const ChargeVector& q = qs.front();
    Monomial base(2 * M, 0);
    for (int i = 0; i < M; ++i) {
        if (q[i] > 0) base[i] = q[i];
        if (q[i] < 0) base[M + i] = -q[i];
    }
    // g = base * P(I) with P carrying the rescaled coefficients.
    PhasePoly P(M, Basis::Action);
    for (const auto& [m, c] : g.terms()) {
        Monomial e(M);
        int k = 0;
        for (int i = 0; i < M; ++i) {
            e[i] = m[i] - base[i];
            k += static_cast<int>(e[i]);
        }
        P.add_term(e, c * GaussianRational(pow2(-k)));
    }
    auto Q = exact_divide(P, divisor);
    if (!Q) return std::nullopt;
    PhasePoly r(M, Basis::Ladder);
    for (const auto& [e, c] : Q->terms()) {
        Monomial m = base;
        int k = 0;
        for (int i = 0; i < M; ++i) {
            m[i] += e[i];
            m[M + i] += e[i];
            k += static_cast<int>(e[i]);
        }
        r.add_term(m, c * GaussianRational(pow2(k)));
    }
    return r;
}

}  // namespace sdq
