#include "sdq/brackets.hpp"

namespace sdq {

int poisson_tensor(int M, int a, int b) {
    if (a < M && b == a + M) return 1;
    if (a >= M && b == a - M) return -1;
    return 0;
}

int poisson_tensor_inverse(int M, int a, int b) { return -poisson_tensor(M, a, b); }

void for_each_multi_index(int nvars, int n, const std::function<void(const Monomial&)>& visit) {
    Monomial k(nvars, 0);
    std::function<void(int, int)> rec = [&](int var, int remaining) {
        if (var == nvars - 1) {
            k[var] = remaining;
            visit(k);
            k[var] = 0;
            return;
        }
        for (int j = remaining; j >= 0; --j) {
            k[var] = j;
            rec(var + 1, remaining - j);
        }
        k[var] = 0;
    };
    if (nvars > 0) rec(0, n);
}

namespace {

void require_flat_basis(const PhasePoly& f, const PhasePoly& g, const char* op) {
    if (f.M() != g.M() || f.basis() != g.basis()) throw Error(std::string(op) + ": basis mismatch");
    if (f.basis() == Basis::Ladder) {
        throw Error(std::string(op) + ": ladder basis needs the ladder-adapted Poisson tensor; convert first");
    }
    if (f.basis() == Basis::Action) throw Error(std::string(op) + ": action polynomials carry no bracket");
}

}  // namespace

const PhasePoly& DerivativeCache::get(const Monomial& orders) {
    auto it = cache_.find(orders);
    if (it != cache_.end()) return it->second;
    unsigned n = total_degree(orders);
    PhasePoly value;
    if (n == 0) {
        value = f_;
    } else {
        // Peel one derivative off the first nonzero slot and recurse.
        Monomial lower = orders;
        int var = 0;
        while (lower[var] == 0) ++var;
        lower[var] -= 1;
        value = get(lower).derivative(var);
    }
    return cache_.emplace(orders, std::move(value)).first->second;
}

PhasePoly scaled_higher_bracket(DerivativeCache& f, DerivativeCache& g, int n) {
    const PhasePoly& fb = f.base();
    const PhasePoly& gb = g.base();
    require_flat_basis(fb, gb, "bracket");
    const int M = fb.M();
    const int nv = fb.nvars();
    PhasePoly result(M, fb.basis());
    if (fb.is_zero() || gb.is_zero() || fb.degree() < n || gb.degree() < n) return result;
    for_each_multi_index(nv, n, [&](const Monomial& k) {
        Monomial kg(nv, 0);
        Rational weight = 1;
        for (int i = 0; i < nv; ++i) {
            if (k[i] == 0) continue;
            kg[symplectic_partner(M, i)] = k[i];
            mpz_class fact;
            mpz_fac_ui(fact.get_mpz_t(), k[i]);
            weight /= fact;
            if (poisson_tensor(M, i, symplectic_partner(M, i)) < 0 && (k[i] & 1u)) weight = -weight;
        }
        const PhasePoly& df = f.get(k);
        if (df.is_zero()) return;
        const PhasePoly& dg = g.get(kg);
        if (dg.is_zero()) return;
        result += (df * dg) * GaussianRational(weight);
    });
    return result;
}

PhasePoly poisson_bracket(const PhasePoly& f, const PhasePoly& g) { return higher_bracket(f, g, 1); }

PhasePoly higher_bracket(const PhasePoly& f, const PhasePoly& g, int n) {
    require_flat_basis(f, g, "higher_bracket");
    if (n < 0) throw Error("higher_bracket: order must be non-negative");
    DerivativeCache cf(f), cg(g);
    PhasePoly r = scaled_higher_bracket(cf, cg, n);
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), n);
    return r * GaussianRational(Rational(fact));
}

}  // namespace sdq
