#include "sdq/io.hpp"

#include <fstream>
#include <sstream>

#include "sdq/parser.hpp"

namespace sdq {

namespace {

Rational rational_from_text(const Json& j, const char* field) {
    if (!j.is_string()) throw Error(std::string("json: field '") + field + "' must be a \"p/q\" string");
    try {
        Rational r(j.get<std::string>());
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw Error(std::string("json: field '") + field + "' is not a rational: " + j.get<std::string>());
    }
}

std::string number_text(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Json to_json(const PhasePoly& p) {
    Json terms = Json::array();
    for (const auto& [m, c] : p.terms())
        terms.push_back({{"exp", m}, {"re", c.re().get_str()}, {"im", c.im().get_str()}});
    return {{"M", p.M()}, {"basis", basis_name(p.basis())}, {"terms", terms}};
}

PhasePoly polynomial_from_json(const Json& j, std::optional<int> M, std::optional<Basis> basis) {
    if (j.is_string()) return parse_polynomial(j.get<std::string>(), M, basis);
    if (!j.is_object()) throw Error("json: polynomial must be an object or an expression string");
    const int m = j.at("M").get<int>();
    const Basis b = basis_from_name(j.at("basis").get<std::string>());
    if (M && *M != m) throw Error("json: polynomial has M = " + std::to_string(m) + ", expected " + std::to_string(*M));
    if (basis && *basis != b) throw Error("json: polynomial is in the " + basis_name(b) + " basis, expected " + basis_name(*basis));
    PhasePoly p(m, b);
    for (const auto& t : j.at("terms")) {
        Monomial exps = t.at("exp").get<Monomial>();
        if (static_cast<int>(exps.size()) != p.nvars()) throw Error("json: exponent vector has the wrong length");
        Rational re = rational_from_text(t.at("re"), "re");
        Rational im = t.contains("im") ? rational_from_text(t.at("im"), "im") : Rational(0);
        p.add_term(exps, GaussianRational(re, im));
    }
    return p;
}

Json to_json(const HbarSeries& s) {
    Json coeffs = Json::array();
    for (int k = 0; k <= s.order(); ++k) coeffs.push_back(to_json(s[k]));
    return {{"order", s.order()}, {"coefficients", coeffs}};
}

Json to_json(const DarbouxChart& chart) {
    Json fwd = Json::array(), inv = Json::array();
    for (const auto& f : chart.forward) fwd.push_back(to_json(f));
    for (const auto& g : chart.inverse) inv.push_back(to_json(g));
    return {{"M", chart.M}, {"name", chart.name}, {"ladder_sign", chart.ladder_sign}, {"forward", fwd}, {"inverse", inv}};
}

DarbouxChart chart_from_json(const Json& j) {
    DarbouxChart c;
    c.M = j.at("M").get<int>();
    if (c.M < 1) throw Error("chart: M must be positive");
    c.name = j.value("name", std::string("custom"));
    c.ladder_sign = j.value("ladder_sign", 1);
    if (c.ladder_sign != 1 && c.ladder_sign != -1) throw Error("chart: ladder_sign must be +1 or -1");
    for (const auto& f : j.at("forward")) c.forward.push_back(polynomial_from_json(f, c.M, Basis::Ambient));
    for (const auto& g : j.at("inverse")) c.inverse.push_back(polynomial_from_json(g, c.M, Basis::Chart));
    if (static_cast<int>(c.forward.size()) != 2 * c.M || static_cast<int>(c.inverse.size()) != 2 * c.M)
        throw Error("chart: forward and inverse need 2M entries each");
    auto report = validate_chart(c);
    if (!report.valid) throw Error("chart: invalid chart: " + report.failures.front());
    return c;
}

Json to_json(const SymplecticConnection& conn) {
    Json entries = Json::array();
    const int n = conn.dim();
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
            for (int c = b; c < n; ++c)
                if (!conn.lower(a, b, c).is_zero())
                    entries.push_back({{"index", {a, b, c}}, {"value", to_json(conn.lower(a, b, c))}});
    return {{"M", conn.M()}, {"entries", entries}};
}

SymplecticConnection connection_from_json(const Json& j) {
    const int M = j.at("M").get<int>();
    if (M < 1) throw Error("connection: M must be positive");
    GammaTensor g(M, Basis::Chart);
    for (int a = 0; a < 2 * M; ++a)
        for (int b = 0; b < 2 * M; ++b)
            for (int c = 0; c < 2 * M; ++c) g(a, b, c) = PhasePoly(M, Basis::Chart);
    for (const auto& e : j.at("entries")) {
        auto idx = e.at("index").get<std::vector<int>>();
        if (idx.size() != 3) throw Error("connection: index must have three entries");
        for (int v : idx)
            if (v < 0 || v >= 2 * M) throw Error("connection: index out of range");
        PhasePoly v = polynomial_from_json(e.at("value"), M, Basis::Chart);
        const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (const auto& p : perms) g(idx[p[0]], idx[p[1]], idx[p[2]]) = v;
    }
    return SymplecticConnection::from_lower(std::move(g));
}

Json to_json(const SpectrumTable& t) {
    Json rows = Json::array();
    for (const auto& r : t.rows) {
        Json row = {{"n", r.n}, {"E_ebk", r.E_ebk}};
        row["E_oracle"] = r.E_oracle ? Json(*r.E_oracle) : Json(nullptr);
        row["abs_diff"] = r.abs_diff ? Json(*r.abs_diff) : Json(nullptr);
        rows.push_back(row);
    }
    return {{"hbar", t.hbar}, {"rows", rows}};
}

std::string to_csv(const SpectrumTable& t) {
    std::ostringstream os;
    os << "hbar,n,E_ebk,E_oracle,abs_diff\n";
    for (const auto& r : t.rows) {
        std::string n, e;
        for (std::size_t k = 0; k < r.n.size(); ++k) n += (k ? " " : "") + std::to_string(r.n[k]);
        for (std::size_t k = 0; k < r.E_ebk.size(); ++k) e += (k ? " " : "") + number_text(r.E_ebk[k]);
        os << number_text(t.hbar) << ",\"" << n << "\",\"" << e << "\","
           << (r.E_oracle ? number_text(*r.E_oracle) : "") << "," << (r.abs_diff ? number_text(*r.abs_diff) : "") << "\n";
    }
    return os.str();
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(path + ": " + e.what());
    }
}

}  // namespace sdq
