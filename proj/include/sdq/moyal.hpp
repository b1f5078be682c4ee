#pragma once

#include <optional>

#include "sdq/hbar_series.hpp"

namespace sdq {

/// Residual of an identity that should hold order by order in hbar.
struct StarDefect {
    HbarSeries residual;
    std::optional<int> first_nonzero_order;  // nullopt: vanishes through truncation

    explicit StarDefect(HbarSeries r) : residual(std::move(r)), first_nonzero_order(residual.first_nonzero_order()) {}
    bool vanishes() const { return !first_nonzero_order.has_value(); }
    /// True when the first nonzero order is at least k (or there is none).
    bool order_at_least(int k) const { return vanishes() || *first_nonzero_order >= k; }
};

/// Sum over n of (1/n!) (i hbar/2)^n {F,G}_n, truncated at the shared order.
HbarSeries moyal_star(const HbarSeries& F, const HbarSeries& G);

/// Moyal product with the bidifferential term of order `omitted_term` dropped. Only useful as a
/// negative control for the associativity check.
HbarSeries moyal_star_without_term(const HbarSeries& F, const HbarSeries& G, int omitted_term);

/// F*G - G*F.
HbarSeries star_commutator(const HbarSeries& F, const HbarSeries& G);

/// (F*G)*H - F*(G*H).
StarDefect associativity_defect(const HbarSeries& F, const HbarSeries& G, const HbarSeries& H);

/// Star power F^{*k}; k = 0 gives the unit series.
HbarSeries star_power(const HbarSeries& F, unsigned k);

}  // namespace sdq
