#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "sdq/fedosov.hpp"
#include "sdq/io.hpp"
#include "sdq/ladder.hpp"
#include "sdq/moyal.hpp"
#include "sdq/number.hpp"
#include "sdq/oracle.hpp"
#include "sdq/parser.hpp"
#include "sdq/sdarboux.hpp"

using namespace sdq;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct UsageError : Error {
    using Error::Error;
};

/// Flags shared by the subcommands; a --config file fills whatever was not given explicitly.
struct RunConfig {
    int M = 1;
    int T = kDefaultTruncation;
    std::vector<double> hbars{0.2, 0.1, 0.05, 0.025};
    int D = 64;
    std::string c_R = "1";
    std::string chart = "identity";
    std::string connection;
    std::string output;
    std::string config;
};

void apply_config(RunConfig& cfg, const CLI::App& sub) {
    if (cfg.config.empty()) return;
    Json j = read_json_file(cfg.config);
    auto unset = [&](const char* flag) { return sub.get_option_no_throw(flag) == nullptr || sub.count(flag) == 0; };
    if (j.contains("M") && unset("--M")) cfg.M = j["M"].get<int>();
    if (j.contains("T") && unset("--order")) cfg.T = j["T"].get<int>();
    if (j.contains("hbars") && unset("--hbars")) cfg.hbars = j["hbars"].get<std::vector<double>>();
    if (j.contains("D") && unset("--D")) cfg.D = j["D"].get<int>();
    if (j.contains("c_R") && unset("--c_R")) cfg.c_R = j["c_R"].get<std::string>();
    if (j.contains("chart") && unset("--chart")) cfg.chart = j["chart"].get<std::string>();
    if (j.contains("connection") && unset("--connection")) cfg.connection = j["connection"].get<std::string>();
    if (j.contains("output") && unset("--output")) cfg.output = j["output"].get<std::string>();
}

void require_positive(const RunConfig& cfg) {
    if (cfg.M < 1) throw UsageError("M must be positive");
    if (cfg.T < 1) throw UsageError("truncation order must be positive");
    if (cfg.D < 1) throw UsageError("D must be positive");
    for (double h : cfg.hbars)
        if (!(h > 0)) throw UsageError("hbar values must be positive");
}

DarbouxChart load_chart(const std::string& name) {
    if (name == "identity") return DarbouxChart::identity(1);
    if (name == "identity2") return DarbouxChart::identity(2);
    if (name == "shear") return DarbouxChart::shear();
    if (name == "twist") return DarbouxChart::twist();
    if (name == "coupled") return DarbouxChart::coupled();
    if (name == "shear*twist") return DarbouxChart::product(DarbouxChart::shear(), DarbouxChart::twist());
    try {
        return chart_from_json(read_json_file(name));
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

Rational exact_option(const std::string& text, const char* flag) {
    try {
        return parse_rational(text);
    } catch (const Error& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

PhasePoly symbol_option(const std::string& text, std::optional<int> M, std::optional<Basis> basis, const char* flag) {
    try {
        return parse_polynomial(text, M, basis);
    } catch (const Error& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

/// "0..5", "0,2,4", or for M > 1 tuples "0,1;2,0".
std::vector<std::vector<int>> quantum_numbers(const std::string& text, int M) {
    std::vector<std::vector<int>> out;
    auto number = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw UsageError("--n: cannot read '" + s + "'");
        }
    };
    if (M == 1) {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto dots = item.find("..");
            if (dots == std::string::npos) {
                out.push_back({number(item)});
                continue;
            }
            int lo = number(item.substr(0, dots)), hi = number(item.substr(dots + 2));
            for (int n = lo; n <= hi; ++n) out.push_back({n});
        }
    } else {
        std::stringstream ss(text);
        std::string tuple;
        while (std::getline(ss, tuple, ';')) {
            std::vector<int> t;
            std::stringstream ts(tuple);
            std::string item;
            while (std::getline(ts, item, ',')) t.push_back(number(item));
            if (static_cast<int>(t.size()) != M) throw UsageError("--n: each tuple needs M entries");
            out.push_back(t);
        }
    }
    if (out.empty()) throw UsageError("--n: no quantum numbers given");
    return out;
}

int emit(const RunConfig& cfg, Json result) {
    const bool pass = result.value("pass", false);
    const std::string text = result.dump(2);
    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output);
        if (!out) throw UsageError("cannot write " + cfg.output);
        out << text << "\n";
    }
    std::cout << text << "\n";
    return pass ? kPass : kFail;
}

Json order_json(std::optional<int> k) { return k ? Json(*k) : Json(nullptr); }

int check_chart(const RunConfig& cfg) {
    DarbouxChart chart = load_chart(cfg.chart);
    Json r = {{"command", "check-chart"}, {"chart", chart.name}};
    auto report = validate_chart(chart);
    r["pass"] = report.valid;
    if (!report.valid) {
        r["violation"] = report.failures.front();
        r["failures"] = report.failures;
        return emit(cfg, r);
    }
    try {
        GammaTensor g = gamma(chart);
        r["gamma_zero"] = g.is_zero();
    } catch (const Error& e) {
        r["pass"] = false;
        r["violation"] = e.what();
    }
    return emit(cfg, r);
}

int check_sdarboux(const RunConfig& cfg, bool bare, int require) {
    if (cfg.T < 5) throw UsageError("s'Darboux checks need --order >= 5");
    DarbouxChart chart = load_chart(cfg.chart);
    SDarbouxSet S = bare ? SDarbouxSet::bare(chart, cfg.T) : SDarbouxSet::corrected(chart, cfg.T);
    auto d = sdarboux_defect(S);
    auto first = d.first_nonzero_order();
    Json r = {{"command", "check-sdarboux"}, {"chart", chart.name}, {"corrected", !bare}, {"truncation", cfg.T},
              {"first_nonzero_order", order_json(first)}, {"required_order", require}};
    r["pass"] = d.order_at_least(require);
    if (!r["pass"].get<bool>()) {
        for (const auto& p : d.pairs)
            if (p.defect.first_nonzero_order == first) {
                r["violation"] = "s'Darboux defect";
                r["pair"] = {p.i, p.j};
                r["order"] = *first;
                r["coefficient"] = p.defect.residual[*first].to_string();
                break;
            }
    }
    return emit(cfg, r);
}

int check_magic(const RunConfig& cfg) {
    DarbouxChart chart = load_chart(cfg.chart);
    Json r = {{"command", "check-magic"}, {"chart", chart.name}, {"pass", true}};
    for (const auto& m : magic_identity_defect(chart))
        if (!m.residual.is_zero()) {
            r["pass"] = false;
            r["violation"] = "magic identity residual";
            r["index"] = m.index;
            r["residual"] = m.residual.to_string();
            break;
        }
    return emit(cfg, r);
}

SymplecticConnection load_connection(const RunConfig& cfg, std::string& label) {
    if (!cfg.connection.empty()) {
        label = cfg.connection;
        if (cfg.connection == "flat") return SymplecticConnection::flat(cfg.M);
        try {
            return connection_from_json(read_json_file(cfg.connection));
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    DarbouxChart chart = load_chart(cfg.chart);
    label = "chart:" + chart.name;
    return connection_from_chart(chart);
}

int check_gmagic(const RunConfig& cfg) {
    std::string label;
    auto conn = load_connection(cfg, label);
    Json r = {{"command", "check-gmagic"}, {"connection", label}, {"pass", true}};
    for (const auto& m : gmagic_defect(conn))
        if (!m.residual.is_zero()) {
            r["pass"] = false;
            r["violation"] = "generalized magic identity residual";
            r["index"] = m.index;
            r["residual"] = m.residual.to_string();
            break;
        }
    return emit(cfg, r);
}

int build_number(const RunConfig& cfg) {
    DarbouxChart chart = load_chart(cfg.chart);
    NumberSystem NS = number_system(chart, cfg.T);
    auto dirac = dirac_defect(NS.L);
    auto comm = number_commutators(NS.N);
    const int need = std::min(5, cfg.T + 1);
    Json r = {{"command", "build-number"}, {"chart", chart.name}, {"truncation", cfg.T}, {"ladder_sign", chart.ladder_sign}};
    Json Ns = Json::array();
    for (const auto& n : NS.N) {
        Json coeffs = Json::array();
        for (int k = 0; k <= n.order(); ++k) coeffs.push_back(n[k].to_string());
        Ns.push_back(coeffs);
    }
    r["N"] = Ns;
    r["dirac_order"] = order_json(dirac.first_nonzero_order());
    r["commutator_order"] = order_json(comm.first_nonzero_order());
    r["pass"] = dirac.order_at_least(need) && comm.order_at_least(need);
    if (!r["pass"].get<bool>()) {
        const NamedDefect* w = !dirac.order_at_least(need) ? dirac.worst() : comm.worst();
        r["violation"] = w->name;
        r["order"] = *w->defect.first_nonzero_order;
    }
    return emit(cfg, r);
}

/// f with H0 = f o I in the chart, read off from the ladder form of H0.
PhasePoly action_function(const PhasePoly& H0, const DarbouxChart& chart) {
    PhasePoly g = to_ladder(H0, chart);
    if (!angle_fluctuation(g).is_zero()) throw UsageError("--H: the leading symbol is not a function of the chart actions");
    return as_action_polynomial(g);
}

QuantumIntegrableSystem system_from_flags(const DarbouxChart& chart, const std::vector<std::string>& H,
                                          const std::vector<std::string>& H2, int T) {
    if (static_cast<int>(H.size()) != chart.M) throw UsageError("--H must be given once per degree of freedom");
    if (!H2.empty() && H2.size() != H.size()) throw UsageError("--H2 must be given as often as --H");
    QuantumIntegrableSystem Q;
    Q.M = chart.M;
    Q.chart = chart;
    for (std::size_t i = 0; i < H.size(); ++i) {
        HbarSeries series(symbol_option(H[i], chart.M, Basis::Ambient, "--H"), T);
        if (!H2.empty()) series[2] += symbol_option(H2[i], chart.M, Basis::Ambient, "--H2");
        Q.f.push_back(action_function(series[0], chart));
        Q.H.push_back(series);
    }
    auto problems = validate_system(Q);
    if (!problems.empty()) throw UsageError(problems.front());
    return Q;
}

Json rule_json(const EBKRule& rule) {
    Json f = Json::array(), F2 = Json::array();
    for (const auto& p : rule.f) f.push_back(p.to_string());
    for (const auto& p : rule.F2) F2.push_back(p.to_string());
    return {{"f", f}, {"F2", F2}};
}

int ebk(const RunConfig& cfg, const std::vector<std::string>& H, const std::vector<std::string>& H2, double hbar, const std::string& n, int oracle_D,
        bool printed, bool csv) {
    auto Q = system_from_flags(load_chart(cfg.chart), H, H2, cfg.T);
    BSDiagnostics diag;
    EBKRule rule = bs_rule(Q, {printed ? K2Source::PrintedSigns : K2Source::Engine, !printed}, &diag);
    SpectrumTable t = spectrum(rule, hbar, quantum_numbers(n, Q.M));
    if (oracle_D > 0) {
        if (Q.M != 1) throw UsageError("--oracle needs M = 1");
        int nmax = 0;
        for (const auto& row : t.rows) nmax = std::max(nmax, row.n[0]);
        auto levels = converged_levels(Q.H[0], oracle_D, hbar, nmax);
        for (auto& row : t.rows) {
            const auto& L = levels[row.n[0]];
            if (!L.converged) continue;
            row.E_oracle = L.E_doubled;
            row.abs_diff = std::abs(row.E_ebk[0] - L.E_doubled);
        }
    }
    if (csv) {
        std::cout << to_csv(t);
        if (!cfg.output.empty()) std::ofstream(cfg.output) << to_csv(t);
        return kPass;
    }
    Json r = {{"command", "ebk"}, {"chart", Q.chart.name}, {"rule", rule_json(rule)}, {"table", to_json(t)}};
    r["residual_order"] = order_json(diag.residual_order);
    r["compatibility_order"] = order_json(diag.compatibility_order);
    r["pass"] = true;
    return emit(cfg, r);
}

int oracle_compare(const RunConfig& cfg, const std::string& H, const std::string& H2, int n_max, bool fit,
                   double min_slope, double tolerance, bool csv) {
    std::string text = H;
    // "I1" is accepted as shorthand for the harmonic action in x, p.
    PhasePoly probe = symbol_option(text, 1, std::nullopt, "--H");
    if (probe.basis() == Basis::Action) text = action_to_domain(probe, DarbouxChart::identity(1)).to_string();
    std::vector<std::string> h2;
    if (!H2.empty()) h2.push_back(H2);
    auto Q = system_from_flags(DarbouxChart::identity(1), {text}, h2, cfg.T);
    EBKRule rule = bs_rule(Q);
    auto rep = compare(rule, Q.H[0], cfg.D, cfg.hbars, n_max, fit);
    Json rows = Json::array();
    for (const auto& row : rep.rows)
        rows.push_back({{"hbar", row.hbar}, {"n", row.n}, {"E_ebk", row.E_ebk}, {"E_oracle", row.E_oracle}, {"diff", row.diff}});
    Json r = {{"command", "oracle-compare"}, {"H", Q.H[0][0].to_string()}, {"rule", rule_json(rule)}, {"D", cfg.D},
              {"rows", rows}, {"max_diff", rep.max_diff}, {"noise_floor", rep.noise_floor}};
    Json dropped = Json::array();
    for (const auto& [h, n] : rep.dropped) dropped.push_back({{"hbar", h}, {"n", n}});
    r["unconverged"] = dropped;
    if (fit) {
        if (rep.fit) {
            r["fit"] = {{"slope", rep.fit->slope}, {"intercept", rep.fit->intercept}, {"points", rep.fit->points}};
            r["pass"] = rep.fit->slope >= min_slope;
            if (!r["pass"].get<bool>()) r["violation"] = "fitted slope below " + std::to_string(min_slope);
        } else {
            r["fit"] = nullptr;
            r["pass"] = false;
            r["violation"] = "slope not measurable: differences do not rise above the roundoff floor";
        }
    } else {
        double worst = 0;
        for (double d : rep.max_diff) worst = std::max(worst, d);
        r["pass"] = worst <= tolerance;
        if (!r["pass"].get<bool>()) r["violation"] = "difference above tolerance";
    }
    if (csv) {
        std::cout << "hbar,n,E_ebk,E_oracle,diff\n";
        for (const auto& row : rep.rows) {
            std::ostringstream os;
            os.precision(17);
            os << row.hbar << "," << row.n << "," << row.E_ebk << "," << row.E_oracle << "," << row.diff << "\n";
            std::cout << os.str();
        }
        return r["pass"].get<bool>() ? kPass : kFail;
    }
    return emit(cfg, r);
}

HbarSeries fixed_series(int M, int seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> coef(-3, 3), var(0, 2 * M - 1);
    HbarSeries s(M, Basis::Chart, 3);
    for (int t = 0; t < 4; ++t) {
        Monomial m(2 * M, 0);
        for (int k = 0; k < 3; ++k) m[var(rng)] += 1;
        s[0].add_term(m, GaussianRational(coef(rng)));
    }
    return s;
}

int fedosov_check(const RunConfig& cfg) {
    std::string label;
    auto conn = load_connection(cfg, label);
    Rational c_R = exact_option(cfg.c_R, "--c_R");
    Json r = {{"command", "fedosov-check"}, {"connection", label}, {"c_R", c_R.get_str()}};
    auto Z = fedosov_sdarboux_set(conn);
    auto d = fedosov_sdarboux_defect(Z, conn, c_R);
    r["defect_first_order"] = order_json(d.first_nonzero_order());
    bool pass = d.order_at_least(4);
    if (!pass) {
        r["violation"] = "Fedosov s'Darboux defect";
        for (const auto& p : d.pairs)
            if (p.defect.first_nonzero_order == d.first_nonzero_order()) {
                r["pair"] = {p.i, p.j};
                r["order"] = *p.defect.first_nonzero_order;
                break;
            }
    }
    bool gm = true;
    for (const auto& m : gmagic_defect(conn)) gm = gm && m.residual.is_zero();
    r["gmagic_zero"] = gm;
    if (!gm && pass) {
        pass = false;
        r["violation"] = "generalized magic identity residual";
    }
    if (conn.lower.is_zero() || conn.derived_from_chart) {
        // Compare against the Moyal product, pulled back through the chart when there is one.
        DarbouxChart chart = conn.derived_from_chart ? load_chart(cfg.chart) : DarbouxChart::identity(conn.M(), Basis::Chart);
        bool same = true;
        for (int seed = 1; seed <= 3; ++seed) {
            HbarSeries F = fixed_series(conn.M(), seed), G = fixed_series(conn.M(), seed + 10);
            HbarSeries Fa(conn.M(), chart.domain, 3), Ga(conn.M(), chart.domain, 3), back(conn.M(), Basis::Chart, 3);
            for (int k = 0; k <= 3; ++k) {
                Fa[k] = chart.from_chart(F[k]);
                Ga[k] = chart.from_chart(G[k]);
            }
            HbarSeries m = moyal_star(Fa, Ga);
            for (int k = 0; k <= 3; ++k) back[k] = chart.to_chart(m[k]);
            same = same && fedosov_star(F, G, conn, c_R) == back;
        }
        r["matches_moyal"] = same;
        if (!same && pass) {
            pass = false;
            r["violation"] = "Fedosov product differs from the Moyal product";
        }
    }
    r["pass"] = pass;
    return emit(cfg, r);
}

int failure(const std::string& command, const std::string& kind, const std::string& what, int code) {
    Json r = {{"command", command}, {"pass", false}, {"error", kind}, {"message", what}};
    std::cout << r.dump(2) << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact star products, s'Darboux charts, number operators and second order EBK spectra"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", cfg.config, "JSON file with defaults for the flags below");
        sub->add_option("--output", cfg.output, "Also write the JSON result here");
    };
    auto chart_flag = [&](CLI::App* sub) {
        sub->add_option("--chart", cfg.chart, "identity, identity2, shear, twist, coupled, shear*twist, or a chart JSON file");
    };

    auto* c_chart = app.add_subcommand("check-chart", "Validate a chart and its Gamma tensor");
    common(c_chart);
    chart_flag(c_chart);

    bool bare = false;
    int require = 5;
    auto* c_sd = app.add_subcommand("check-sdarboux", "Star-commutator defect of the (corrected) chart coordinates");
    common(c_sd);
    chart_flag(c_sd);
    c_sd->add_option("--order", cfg.T, "Truncation order T (>= 5)");
    c_sd->add_flag("--bare", bare, "Check z itself instead of z + hbar^2 Z2");
    c_sd->add_option("--require", require, "Pass when the first nonzero order is at least this");

    auto* c_magic = app.add_subcommand("check-magic", "Magic identity for a chart");
    common(c_magic);
    chart_flag(c_magic);

    auto* c_gmagic = app.add_subcommand("check-gmagic", "Generalized magic identity for a connection");
    common(c_gmagic);
    chart_flag(c_gmagic);
    c_gmagic->add_option("--connection", cfg.connection, "Connection JSON file, or 'flat'");
    c_gmagic->add_option("--M", cfg.M, "Degrees of freedom for --connection flat");

    auto* c_num = app.add_subcommand("build-number", "Number symbols and their Dirac algebra");
    common(c_num);
    chart_flag(c_num);
    c_num->add_option("--order", cfg.T, "Truncation order T");

    std::string H, H2, n = "0..5";
    std::vector<std::string> Hs, H2s;
    double hbar = 1.0;
    int oracle_D = 0;
    bool printed = false, csv = false;
    auto* c_ebk = app.add_subcommand("ebk", "Second order quantization rule and its spectrum");
    common(c_ebk);
    chart_flag(c_ebk);
    c_ebk->add_option("--H", Hs, "Leading symbol in x1.., p1..; repeat once per degree of freedom")->required();
    c_ebk->add_option("--H2", H2s, "hbar^2 part of each symbol");
    c_ebk->add_option("--hbar", hbar, "Value of hbar");
    c_ebk->add_option("--n", n, "Quantum numbers: 0..5, 0,2,4, or tuples 0,1;1,0");
    c_ebk->add_option("--order", cfg.T, "Truncation order T");
    c_ebk->add_option("--oracle", oracle_D, "Add oracle eigenvalues at this matrix size (M = 1)");
    c_ebk->add_flag("--printed-signs", printed, "Use the printed K2 signs (negative control)");
    c_ebk->add_flag("--csv", csv, "Print the table as CSV");

    int n_max = 8;
    bool fit = false;
    double min_slope = 3.5, tolerance = 1e-9;
    std::string hbar_list;
    auto* c_cmp = app.add_subcommand("oracle-compare", "EBK energies against Weyl-matrix eigenvalues");
    common(c_cmp);
    c_cmp->add_option("--H", H, "Symbol in x1, p1 (or I1)")->required();
    c_cmp->add_option("--H2", H2, "hbar^2 part of the symbol");
    c_cmp->add_option("--hbars", hbar_list, "Comma separated hbar values");
    c_cmp->add_option("--D", cfg.D, "Matrix size");
    c_cmp->add_option("--nmax", n_max, "Highest level compared");
    c_cmp->add_flag("--fit", fit, "Fit log|diff| against log hbar");
    c_cmp->add_option("--min-slope", min_slope, "Pass threshold for the fitted slope");
    c_cmp->add_option("--tolerance", tolerance, "Pass threshold on |diff| without --fit");
    c_cmp->add_flag("--csv", csv, "Print rows as CSV");

    auto* c_fed = app.add_subcommand("fedosov-check", "Fedosov product, Z2 and the generalized magic identity");
    common(c_fed);
    chart_flag(c_fed);
    c_fed->add_option("--connection", cfg.connection, "Connection JSON file, or 'flat'");
    c_fed->add_option("--M", cfg.M, "Degrees of freedom for --connection flat");
    c_fed->add_option("--c_R", cfg.c_R, "Curvature coefficient in the third jet, as p/q");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return failure("", "usage", e.what(), kUsage);
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        apply_config(cfg, *sub);
        if (!hbar_list.empty()) {
            cfg.hbars.clear();
            std::stringstream ss(hbar_list);
            std::string item;
            while (std::getline(ss, item, ',')) cfg.hbars.push_back(std::stod(item));
        }
        require_positive(cfg);
        if (!(hbar > 0)) throw UsageError("--hbar must be positive");
        if (name == "check-chart") return check_chart(cfg);
        if (name == "check-sdarboux") return check_sdarboux(cfg, bare, require);
        if (name == "check-magic") return check_magic(cfg);
        if (name == "check-gmagic") return check_gmagic(cfg);
        if (name == "build-number") return build_number(cfg);
        if (name == "ebk") return ebk(cfg, Hs, H2s, hbar, n, oracle_D, printed, csv);
        if (name == "oracle-compare") return oracle_compare(cfg, H, H2, n_max, fit, min_slope, tolerance, csv);
        if (name == "fedosov-check") return fedosov_check(cfg);
    } catch (const UsageError& e) {
        return failure(name, "usage", e.what(), kUsage);
    } catch (const std::invalid_argument& e) {
        return failure(name, "usage", std::string("cannot read a number: ") + e.what(), kUsage);
    } catch (const Error& e) {
        return failure(name, "check", e.what(), kFail);
    }
    return kUsage;
}
