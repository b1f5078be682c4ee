#pragma once

#include <functional>
#include <vector>

#include "sdq/phase_poly.hpp"

namespace sdq {

/// Constant Poisson tensor J^{ab}: +1 at (i, i+M), -1 at (i+M, i), zero elsewhere.
int poisson_tensor(int M, int a, int b);
/// Its inverse J_{ab} = -J^{ab}.
int poisson_tensor_inverse(int M, int a, int b);
/// The unique partner index b with J^{ab} != 0.
inline int symplectic_partner(int M, int a) { return a < M ? a + M : a - M; }

/// Calls visit(orders) for every multi-index of length nvars with total order n.
void for_each_multi_index(int nvars, int n, const std::function<void(const Monomial&)>& visit);

/// {f,g} = sum_ij d_i f J^{ij} d_j g. Requires ambient or chart basis.
PhasePoly poisson_bracket(const PhasePoly& f, const PhasePoly& g);

/// {f,g}_n = d_{i1}..d_{in} f J^{i1 j1}..J^{in jn} d_{j1}..d_{jn} g.
PhasePoly higher_bracket(const PhasePoly& f, const PhasePoly& g, int n);

/// Memoized mixed partials of one polynomial.
class DerivativeCache {
public:
    explicit DerivativeCache(PhasePoly f) : f_(std::move(f)) {}
    const PhasePoly& get(const Monomial& orders);
    const PhasePoly& base() const { return f_; }

private:
    PhasePoly f_;
    std::map<Monomial, PhasePoly> cache_;
};

/// {f,g}_n / n!, reusing cached derivatives of f and g.
PhasePoly scaled_higher_bracket(DerivativeCache& f, DerivativeCache& g, int n);

}  // namespace sdq
