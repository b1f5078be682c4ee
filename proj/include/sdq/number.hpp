#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdq/ladder.hpp"
#include "sdq/sdarboux.hpp"

namespace sdq {

/// sqrt(2) A^i = Z^i + s i Z^{i+M} and sqrt(2) Abar^i, s the chart's ladder sign.
struct LadderSeries {
    std::vector<HbarSeries> a;
    std::vector<HbarSeries> abar;
};

/// Throws unless S has s'Darboux defect order >= min_order.
LadderSeries ladder_series(const SDarbouxSet& S, int min_order = 5);

struct NamedDefect {
    std::string name;
    StarDefect defect;
};

struct DefectList {
    std::vector<NamedDefect> entries;

    std::optional<int> first_nonzero_order() const;
    bool order_at_least(int k) const;
    /// First entry attaining first_nonzero_order, or nullptr.
    const NamedDefect* worst() const;
};

/// {A^i,Abar^j}_* - hbar delta_ij, {A^i,A^j}_* and {Abar^i,Abar^j}_*.
DefectList dirac_defect(const LadderSeries& L);

/// N^i = Abar^i * A^i (no sum).
std::vector<HbarSeries> number_series(const LadderSeries& L);

/// -(1/8){abar^i,a^i}_2 + (1/48) Gamma_{abc} {I^i, Gamma^{abc}}, the hbar^2 coefficient of N^i for
/// the corrected set.
std::vector<PhasePoly> n2_closed_form(const DarbouxChart& chart);

/// Pairwise {N^i,N^j}_*.
DefectList number_commutators(const std::vector<HbarSeries>& N);

/// Replaces each monomial prod I_i^{k_i} of the action polynomial F by the ordered star product
/// of (N^i + hbar/2)^{*k_i} (or N^i when shift is false). Throws when the N do not commute
/// through order 4.
HbarSeries star_compose(const PhasePoly& F, const std::vector<HbarSeries>& N, bool shift = true);

/// Omega_{ij} = d_j f^i as action polynomials, and K2^i = [f^i o* (N + hbar/2)]_2 - (Omega_{ij} o I) N^j_2
/// in the domain basis.
struct K2Omega {
    std::vector<PhasePoly> K2;
    std::vector<std::vector<PhasePoly>> Omega;
};
K2Omega k2_omega(const std::vector<PhasePoly>& f, const std::vector<HbarSeries>& N, const DarbouxChart& chart);

/// sign * [ (1/16){I^j,I^k}_2 d_jd_k f + (1/24)(I^j -> I^k <- I^l) d_jd_kd_l f ] composed with I.
/// sign = -1 agrees with the engine; sign = +1 is the other sign choice, kept as a control.
std::vector<PhasePoly> k2_transcribed(const std::vector<PhasePoly>& f, const DarbouxChart& chart, int sign = -1);

struct QuantumIntegrableSystem {
    int M = 1;
    std::vector<HbarSeries> H;
    DarbouxChart chart;
    std::vector<PhasePoly> f;
};

/// Checks evenness, pi H^i = f^i o I exactly, and {H^i,H^j}_* = 0 through truncation.
std::vector<std::string> validate_system(const QuantumIntegrableSystem& Q);

struct NumberSystem {
    SDarbouxSet S;
    LadderSeries L;
    std::vector<HbarSeries> N;
    /// dG/dtheta^i in the ladder basis.
    std::vector<PhasePoly> G_gradients;
    /// The generator G in the domain basis.
    PhasePoly G;
    std::optional<int> compatibility_order;  // first order of {N^i,H^j}_*, nullopt if none
};

/// Corrected s'Darboux set, its ladder series and number symbols.
NumberSystem number_system(const DarbouxChart& chart, int order = kDefaultTruncation);

/// {N^i,H^j}_* for all i, j.
DefectList compatibility_defect(const std::vector<HbarSeries>& N, const std::vector<HbarSeries>& H);

enum class K2Source { Engine, PrintedSigns };

/// Replaces Z by Z + hbar^2 {G, z} with G solving {G, h^i} = >H2 - K2 - Omega N2<, recomputes N.
NumberSystem good_number_correction(const QuantumIntegrableSystem& Q, const NumberSystem& NS,
                                    K2Source k2 = K2Source::Engine);

struct EBKRule {
    int M = 1;
    std::vector<PhasePoly> f;
    std::vector<PhasePoly> F2;
    bool half_shift = true;
};

struct BSOptions {
    K2Source k2 = K2Source::Engine;
    /// Require H - (f + hbar^2 F2) o* (N' + hbar/2) to vanish through order 3.
    bool verify = true;
};

struct BSDiagnostics {
    NumberSystem corrected;
    std::optional<int> compatibility_order;
    std::optional<int> residual_order;  // first order of H - F o* (N' + hbar/2)
    std::vector<PhasePoly> K2;
};

/// Second order quantization rule F = f + hbar^2 F2 with F2 o I = <H2 - K2 - Omega N2>.
EBKRule bs_rule(const QuantumIntegrableSystem& Q, const BSOptions& opts = {}, BSDiagnostics* diag = nullptr);

struct SpectrumRow {
    std::vector<int> n;
    std::vector<double> E_ebk;
    std::optional<double> E_oracle;
    std::optional<double> abs_diff;
};

struct SpectrumTable {
    double hbar = 1.0;
    std::vector<SpectrumRow> rows;
};

/// E^i_n = f^i(hbar(n+1/2)) + hbar^2 F2^i(hbar(n+1/2)).
SpectrumTable spectrum(const EBKRule& rule, double hbar, const std::vector<std::vector<int>>& quantum_numbers);

}  // namespace sdq
