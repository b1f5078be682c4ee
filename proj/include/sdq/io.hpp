#pragma once

#include <string>

#include "json.hpp"
#include "sdq/chart.hpp"
#include "sdq/fedosov.hpp"
#include "sdq/number.hpp"

namespace sdq {

using Json = nlohmann::ordered_json;

/// {"M":..,"basis":..,"terms":[{"exp":[..],"re":"p/q","im":"p/q"}]}, terms in graded-lex order.
Json to_json(const PhasePoly& p);
/// Accepts the object form or an expression string.
PhasePoly polynomial_from_json(const Json& j, std::optional<int> M = {}, std::optional<Basis> basis = {});

Json to_json(const HbarSeries& s);

/// {"M","name","ladder_sign","forward":[..],"inverse":[..]}; forward entries are ambient, inverse
/// entries chart polynomials. Loading validates the chart and throws on failure.
Json to_json(const DarbouxChart& chart);
DarbouxChart chart_from_json(const Json& j);

/// {"M","entries":[{"index":[a,b,c],"value":poly}]}: one entry per sorted index triple, zero
/// entries omitted, values in chart variables.
Json to_json(const SymplecticConnection& conn);
SymplecticConnection connection_from_json(const Json& j);

Json to_json(const SpectrumTable& t);
std::string to_csv(const SpectrumTable& t);

Json read_json_file(const std::string& path);

}  // namespace sdq
