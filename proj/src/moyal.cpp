#include "sdq/moyal.hpp"

#include <memory>

#include "sdq/brackets.hpp"

namespace sdq {

namespace {

void require_star_compatible(const HbarSeries& F, const HbarSeries& G) {
    if (F.M() != G.M() || F.basis() != G.basis()) throw Error("star product: basis or dimension mismatch");
    if (F.order() != G.order()) throw Error("star product: truncation mismatch");
    if (F.basis() != Basis::Ambient && F.basis() != Basis::Chart) {
        throw Error("star product: inputs must be in ambient or chart basis");
    }
}

HbarSeries moyal_impl(const HbarSeries& F, const HbarSeries& G, int omitted_term) {
    require_star_compatible(F, G);
    const int T = F.order();
    HbarSeries result(F.M(), F.basis(), T);
    std::vector<std::unique_ptr<DerivativeCache>> fc(T + 1), gc(T + 1);
    for (int k = 0; k <= T; ++k) {
        fc[k] = std::make_unique<DerivativeCache>(F[k]);
        gc[k] = std::make_unique<DerivativeCache>(G[k]);
    }
    // (i/2)^n
    std::vector<GaussianRational> weight(T + 1);
    weight[0] = GaussianRational(1);
    for (int n = 1; n <= T; ++n) weight[n] = weight[n - 1] * GaussianRational(Rational(0), Rational(1, 2));

    for (int a = 0; a <= T; ++a) {
        if (F[a].is_zero()) continue;
        for (int b = 0; a + b <= T; ++b) {
            if (G[b].is_zero()) continue;
            for (int n = 0; a + b + n <= T; ++n) {
                if (n == omitted_term) continue;
                PhasePoly term = scaled_higher_bracket(*fc[a], *gc[b], n);
                if (term.is_zero()) continue;
                result[a + b + n] += term * weight[n];
            }
        }
    }
    return result;
}

}  // namespace

HbarSeries moyal_star(const HbarSeries& F, const HbarSeries& G) { return moyal_impl(F, G, -1); }

HbarSeries moyal_star_without_term(const HbarSeries& F, const HbarSeries& G, int omitted_term) {
    return moyal_impl(F, G, omitted_term);
}

HbarSeries star_commutator(const HbarSeries& F, const HbarSeries& G) { return moyal_star(F, G) - moyal_star(G, F); }

StarDefect associativity_defect(const HbarSeries& F, const HbarSeries& G, const HbarSeries& H) {
    return StarDefect(moyal_star(moyal_star(F, G), H) - moyal_star(F, moyal_star(G, H)));
}

HbarSeries star_power(const HbarSeries& F, unsigned k) {
    HbarSeries result(PhasePoly::constant(F.M(), F.basis(), GaussianRational(1)), F.order());
    for (unsigned j = 0; j < k; ++j) result = moyal_star(result, F);
    return result;
}

}  // namespace sdq
