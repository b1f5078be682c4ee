#pragma once

#include <random>

#include "sdq/brackets.hpp"
#include "sdq/hbar_series.hpp"
#include "sdq/phase_poly.hpp"

namespace sdq::testing {

inline PhasePoly X(int M, int i = 0) { return PhasePoly::variable(M, Basis::Ambient, i); }
inline PhasePoly P(int M, int i = 0) { return PhasePoly::variable(M, Basis::Ambient, M + i); }
inline PhasePoly C(int M, long num, long den = 1, Basis b = Basis::Ambient) {
    return PhasePoly::constant(M, b, GaussianRational::frac(num, den));
}
inline GaussianRational Q(long num, long den = 1) { return GaussianRational::frac(num, den); }
inline const GaussianRational I_unit = GaussianRational::i();

/// (x_i^2 + p_i^2)/2.
inline PhasePoly harmonic_action(int M, int i = 0) { return (X(M, i) * X(M, i) + P(M, i) * P(M, i)) * Q(1, 2); }

/// Random polynomial with small integer-over-small-integer coefficients, total degree <= deg.
inline PhasePoly random_poly(std::mt19937& rng, int M, int deg, Basis basis = Basis::Ambient, int terms = 6,
                             bool complex_coeffs = false) {
    PhasePoly p(M, basis);
    std::uniform_int_distribution<int> num(-5, 5), den(1, 4), expo(0, deg);
    const int nv = p.nvars();
    for (int t = 0; t < terms; ++t) {
        Monomial m(nv, 0);
        int budget = std::uniform_int_distribution<int>(0, deg)(rng);
        for (int k = 0; k < budget; ++k) m[std::uniform_int_distribution<int>(0, nv - 1)(rng)] += 1;
        GaussianRational c = Q(num(rng), den(rng));
        if (complex_coeffs) c += I_unit * Q(num(rng), den(rng));
        p.add_term(m, c);
    }
    return p;
}

inline HbarSeries random_series(std::mt19937& rng, int M, int deg, int order, int nonzero_orders = 2) {
    HbarSeries s(M, Basis::Ambient, order);
    for (int k = 0; k < std::min(order + 1, nonzero_orders); ++k) s[k] = random_poly(rng, M, deg, Basis::Ambient, 4);
    return s;
}

/// Brute-force {f,g}_n: explicit sums over all 2n index tuples.
inline PhasePoly brute_force_bracket(const PhasePoly& f, const PhasePoly& g, int n) {
    const int M = f.M(), d = 2 * M;
    PhasePoly sum(M, f.basis());
    std::vector<int> is(n), js(n);
    const long total = static_cast<long>(std::pow(d, 2 * n));
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        int sign = 1;
        for (int k = 0; k < n; ++k) {
            is[k] = static_cast<int>(rem % d);
            rem /= d;
            js[k] = static_cast<int>(rem % d);
            rem /= d;
            sign *= poisson_tensor(M, is[k], js[k]);
        }
        if (sign == 0) continue;
        PhasePoly df = f, dg = g;
        for (int k = 0; k < n; ++k) {
            df = df.derivative(is[k]);
            dg = dg.derivative(js[k]);
        }
        sum += df * dg * GaussianRational(sign);
    }
    return sum;
}

}  // namespace sdq::testing
