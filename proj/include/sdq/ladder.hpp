#pragma once

#include <optional>
#include <vector>

#include "sdq/chart.hpp"

namespace sdq {

/// q_i = (exponent of a^i) - (exponent of abar^i) for one ladder monomial.
using ChargeVector = std::vector<int>;
ChargeVector charge(int M, const Monomial& ladder_monomial);

/// Rewrites a domain-basis polynomial in ladder variables (a, abar) of the chart.
PhasePoly to_ladder(const PhasePoly& f, const DarbouxChart& chart);
/// Inverse of to_ladder.
PhasePoly from_ladder(const PhasePoly& g, const DarbouxChart& chart);

/// Charge-zero part of a ladder polynomial.
PhasePoly angle_average(const PhasePoly& g);
/// g - angle_average(g).
PhasePoly angle_fluctuation(const PhasePoly& g);
/// The part of g with charge exactly q.
PhasePoly charge_component(const PhasePoly& g, const ChargeVector& q);
/// Distinct charges present in g, in ascending order.
std::vector<ChargeVector> charges(const PhasePoly& g);

/// Rewrites a charge-zero ladder polynomial in the actions I^i = abar^i a^i.
PhasePoly as_action_polynomial(const PhasePoly& g);
/// Substitutes I^i = abar^i a^i into an action polynomial.
PhasePoly action_to_ladder(const PhasePoly& f);
/// Substitutes the chart actions into an action polynomial (result in the domain basis).
PhasePoly action_to_domain(const PhasePoly& f, const DarbouxChart& chart);

/// Derivative along the angle theta^i of a ladder polynomial (each charge-q monomial picks up
/// -s i q_i, s the chart's ladder sign).
PhasePoly angle_derivative(const PhasePoly& g, int i, int ladder_sign);

/// Convenience: angle average of a domain-basis polynomial, returned in the domain basis.
PhasePoly angle_average_in_chart(const PhasePoly& f, const DarbouxChart& chart);

/// Exact division of a ladder polynomial of a single charge by an action polynomial. Returns
/// nullopt if the quotient is not a polynomial.
std::optional<PhasePoly> divide_by_action(const PhasePoly& g, const PhasePoly& divisor);

/// Exact multivariate polynomial division; nullopt when the remainder is nonzero.
std::optional<PhasePoly> exact_divide(const PhasePoly& num, const PhasePoly& den);

}  // namespace sdq
