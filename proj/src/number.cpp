#include "sdq/number.hpp"

#include <cmath>
#include <map>

#include "sdq/brackets.hpp"

namespace sdq {

namespace {

const GaussianRational kI = GaussianRational::i();

std::string charge_name(const ChargeVector& q) {
    std::string s = "(";
    for (std::size_t i = 0; i < q.size(); ++i) s += (i ? "," : "") + std::to_string(q[i]);
    return s + ")";
}

/// R^i = H2^i - K2^i - (Omega_{ij} o I) N2^j in the domain basis.
struct Residual2 {
    std::vector<PhasePoly> R;
    std::vector<PhasePoly> K2;
    std::vector<std::vector<PhasePoly>> Omega;
};

Residual2 second_order_residual(const QuantumIntegrableSystem& Q, const std::vector<HbarSeries>& N, K2Source src) {
    Residual2 out;
    K2Omega ko = k2_omega(Q.f, N, Q.chart);
    out.K2 = src == K2Source::Engine ? ko.K2 : k2_transcribed(Q.f, Q.chart, +1);
    out.Omega = ko.Omega;
    for (int i = 0; i < Q.M; ++i) {
        PhasePoly r = Q.H[i][2] - out.K2[i];
        for (int j = 0; j < Q.M; ++j) r -= action_to_domain(out.Omega[i][j], Q.chart) * N[j][2];
        out.R.push_back(r);
    }
    return out;
}

}  // namespace

LadderSeries ladder_series(const SDarbouxSet& S, int min_order) {
    auto D = sdarboux_defect(S);
    if (!D.order_at_least(min_order)) {
        throw Error("ladder_series: s'Darboux defect at order " + std::to_string(*D.first_nonzero_order()) +
                    ", need at least " + std::to_string(min_order));
    }
    const int M = S.chart.M;
    const GaussianRational si = kI * GaussianRational(S.chart.ladder_sign);
    LadderSeries L;
    for (int i = 0; i < M; ++i) {
        L.a.push_back(S.Z[i] + S.Z[i + M] * si);
        L.abar.push_back(S.Z[i] - S.Z[i + M] * si);
    }
    return L;
}

std::optional<int> DefectList::first_nonzero_order() const {
    const NamedDefect* w = worst();
    if (!w) return std::nullopt;
    return w->defect.first_nonzero_order;
}

bool DefectList::order_at_least(int k) const {
    auto o = first_nonzero_order();
    return !o || *o >= k;
}

const NamedDefect* DefectList::worst() const {
    const NamedDefect* best = nullptr;
    for (const auto& e : entries) {
        if (!e.defect.first_nonzero_order) continue;
        if (!best || *e.defect.first_nonzero_order < *best->defect.first_nonzero_order) best = &e;
    }
    return best;
}

DefectList dirac_defect(const LadderSeries& L) {
    DefectList out;
    const int M = static_cast<int>(L.a.size());
    const GaussianRational half = GaussianRational::frac(1, 2);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            HbarSeries r = star_commutator(L.a[i], L.abar[j]) * half;
            if (i == j) r[1] -= PhasePoly::constant(r.M(), r.basis(), GaussianRational(1));
            out.entries.push_back({"{A" + std::to_string(i + 1) + ",Abar" + std::to_string(j + 1) + "}", StarDefect(r)});
        }
        for (int j = i + 1; j < M; ++j) {
            out.entries.push_back({"{A" + std::to_string(i + 1) + ",A" + std::to_string(j + 1) + "}",
                                   StarDefect(star_commutator(L.a[i], L.a[j]) * half)});
            out.entries.push_back({"{Abar" + std::to_string(i + 1) + ",Abar" + std::to_string(j + 1) + "}",
                                   StarDefect(star_commutator(L.abar[i], L.abar[j]) * half)});
        }
    }
    return out;
}

std::vector<HbarSeries> number_series(const LadderSeries& L) {
    std::vector<HbarSeries> N;
    for (std::size_t i = 0; i < L.a.size(); ++i) N.push_back(moyal_star(L.abar[i], L.a[i]) * GaussianRational::frac(1, 2));
    return N;
}

std::vector<PhasePoly> n2_closed_form(const DarbouxChart& chart) {
    const int M = chart.M, n = 2 * M;
    GammaTensor up = gamma(chart);
    GammaTensor down = up.lowered();
    auto I = actions(chart);
    auto lad = ladder(chart);
    std::vector<PhasePoly> out;
    for (int i = 0; i < M; ++i) {
        PhasePoly n2 = higher_bracket(lad.abar[i], lad.a[i], 2) * GaussianRational::frac(-1, 16);
        PhasePoly g(M, chart.domain);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    if (down(a, b, c).is_zero() || up(a, b, c).is_zero()) continue;
                    g += down(a, b, c) * poisson_bracket(I[i], up(a, b, c));
                }
        out.push_back(n2 + g * GaussianRational::frac(1, 48));
    }
    return out;
}

DefectList number_commutators(const std::vector<HbarSeries>& N) {
    DefectList out;
    for (std::size_t i = 0; i < N.size(); ++i)
        for (std::size_t j = i + 1; j < N.size(); ++j)
            out.entries.push_back({"{N" + std::to_string(i + 1) + ",N" + std::to_string(j + 1) + "}",
                                   StarDefect(star_commutator(N[i], N[j]))});
    return out;
}

HbarSeries star_compose(const PhasePoly& F, const std::vector<HbarSeries>& N, bool shift) {
    if (F.basis() != Basis::Action) throw Error("star_compose: F must be an action polynomial");
    const int M = F.M();
    if (static_cast<int>(N.size()) != M) throw Error("star_compose: need one number symbol per action");
    if (M > 1) {
        auto comm = number_commutators(N);
        if (!comm.order_at_least(5)) {
            throw Error("star_compose: number symbols do not commute; " + comm.worst()->name + " at order " +
                        std::to_string(*comm.first_nonzero_order()));
        }
    }
    const HbarSeries& N0 = N.front();
    std::vector<HbarSeries> base;
    for (const auto& Ni : N) {
        HbarSeries b = Ni;
        if (shift && b.order() >= 1) b[1] += PhasePoly::constant(b.M(), b.basis(), GaussianRational::frac(1, 2));
        base.push_back(b);
    }
    std::vector<std::vector<HbarSeries>> powers(M);
    auto power = [&](int i, unsigned k) -> const HbarSeries& {
        auto& p = powers[i];
        if (p.empty()) p.push_back(HbarSeries(PhasePoly::constant(N0.M(), N0.basis(), GaussianRational(1)), N0.order()));
        while (p.size() <= k) p.push_back(moyal_star(p.back(), base[i]));
        return p[k];
    };
    HbarSeries out(N0.M(), N0.basis(), N0.order());
    for (const auto& [m, c] : F.terms()) {
        HbarSeries term = power(0, m[0]);
        for (int i = 1; i < M; ++i) {
            if (m[i] > 0) term = moyal_star(term, power(i, m[i]));
        }
        out += term * c;
    }
    return out;
}

K2Omega k2_omega(const std::vector<PhasePoly>& f, const std::vector<HbarSeries>& N, const DarbouxChart& chart) {
    K2Omega out;
    const int M = chart.M;
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::vector<PhasePoly> row;
        for (int j = 0; j < M; ++j) row.push_back(f[i].derivative(j));
        HbarSeries composed = star_compose(f[i], N, true);
        PhasePoly k2 = composed[2];
        for (int j = 0; j < M; ++j) k2 -= action_to_domain(row[j], chart) * N[j][2];
        out.K2.push_back(k2);
        out.Omega.push_back(std::move(row));
    }
    return out;
}

std::vector<PhasePoly> k2_transcribed(const std::vector<PhasePoly>& f, const DarbouxChart& chart, int sign) {
    const int M = chart.M, n = 2 * M;
    auto I = actions(chart);
    // v[j][b] = sum_a d_a I^j J^{ab}
    std::vector<std::vector<PhasePoly>> v(M, std::vector<PhasePoly>(n, PhasePoly(M, chart.domain)));
    for (int j = 0; j < M; ++j)
        for (int b = 0; b < n; ++b) {
            int a = symplectic_partner(M, b);
            v[j][b] = I[j].derivative(a) * GaussianRational(poisson_tensor(M, a, b));
        }
    std::vector<PhasePoly> out;
    for (const auto& fi : f) {
        PhasePoly two(M, chart.domain), three(M, chart.domain);
        for (int j = 0; j < M; ++j)
            for (int k = 0; k < M; ++k) {
                PhasePoly d2 = fi.derivative(j).derivative(k);
                if (!d2.is_zero()) two += higher_bracket(I[j], I[k], 2) * action_to_domain(d2, chart);
                for (int l = 0; l < M; ++l) {
                    PhasePoly d3 = d2.derivative(l);
                    if (d3.is_zero()) continue;
                    PhasePoly diagram(M, chart.domain);
                    for (int b = 0; b < n; ++b)
                        for (int d = 0; d < n; ++d) diagram += v[j][b] * v[l][d] * I[k].derivative(b).derivative(d);
                    three += diagram * action_to_domain(d3, chart);
                }
            }
        out.push_back((two * GaussianRational::frac(1, 16) + three * GaussianRational::frac(1, 24)) *
                      GaussianRational(sign));
    }
    return out;
}

std::vector<std::string> validate_system(const QuantumIntegrableSystem& Q) {
    std::vector<std::string> failures;
    if (static_cast<int>(Q.H.size()) != Q.M || static_cast<int>(Q.f.size()) != Q.M || Q.chart.M != Q.M) {
        failures.push_back("system needs M Hamiltonians, M action polynomials and an M-dimensional chart");
        return failures;
    }
    for (int i = 0; i < Q.M; ++i) {
        const std::string tag = "H" + std::to_string(i + 1);
        if (!Q.H[i].is_even()) failures.push_back(tag + " is not even in hbar");
        if (Q.H[i].order() < 3) failures.push_back(tag + " truncation below 3");
        if (!(Q.H[i][0] == action_to_domain(Q.f[i], Q.chart)))
            failures.push_back("principal symbol of " + tag + " differs from f" + std::to_string(i + 1) + " o I");
    }
    for (int i = 0; i < Q.M; ++i)
        for (int j = i + 1; j < Q.M; ++j) {
            StarDefect d(star_commutator(Q.H[i], Q.H[j]));
            if (!d.vanishes())
                failures.push_back("{H" + std::to_string(i + 1) + ",H" + std::to_string(j + 1) + "}_* nonzero at order " +
                                   std::to_string(*d.first_nonzero_order));
        }
    return failures;
}

NumberSystem number_system(const DarbouxChart& chart, int order) {
    NumberSystem NS{SDarbouxSet::corrected(chart, order), {}, {}, {}, PhasePoly(chart.M, chart.domain), std::nullopt};
    NS.L = ladder_series(NS.S, std::min(order, 5));
    NS.N = number_series(NS.L);
    for (int i = 0; i < chart.M; ++i) NS.G_gradients.push_back(PhasePoly(chart.M, Basis::Ladder));
    return NS;
}

DefectList compatibility_defect(const std::vector<HbarSeries>& N, const std::vector<HbarSeries>& H) {
    DefectList out;
    for (std::size_t i = 0; i < N.size(); ++i)
        for (std::size_t j = 0; j < H.size(); ++j)
            out.entries.push_back({"{N" + std::to_string(i + 1) + ",H" + std::to_string(j + 1) + "}",
                                   StarDefect(star_commutator(N[i], H[j]))});
    return out;
}

NumberSystem good_number_correction(const QuantumIntegrableSystem& Q, const NumberSystem& NS, K2Source k2) {
    const int M = Q.M;
    const auto& chart = Q.chart;
    const int s = chart.ladder_sign;
    auto pre = compatibility_defect(NS.N, Q.H);
    if (!pre.order_at_least(3)) {
        throw Error("good_number_correction: " + pre.worst()->name + " nonzero at order " +
                    std::to_string(*pre.first_nonzero_order()) + ", need O(hbar^3)");
    }
    Residual2 res = second_order_residual(Q, NS.N, k2);

    std::vector<PhasePoly> fluct;
    std::map<ChargeVector, bool> all_charges;
    for (int i = 0; i < M; ++i) {
        fluct.push_back(angle_fluctuation(to_ladder(res.R[i], chart)));
        for (const auto& q : charges(fluct.back())) all_charges[q] = true;
    }

    const GaussianRational minus_si = kI * GaussianRational(-s);
    PhasePoly G_ladder(M, Basis::Ladder);
    for (const auto& [q, unused] : all_charges) {
        std::vector<PhasePoly> Rq, w;
        for (int i = 0; i < M; ++i) {
            Rq.push_back(charge_component(fluct[i], q));
            PhasePoly wi(M, Basis::Action);
            for (int k = 0; k < M; ++k) wi += res.Omega[i][k] * GaussianRational(q[k]);
            w.push_back(wi);
        }
        std::optional<PhasePoly> Gq;
        for (int i = 0; i < M && !Gq; ++i) {
            if (Rq[i].is_zero() || w[i].is_zero()) continue;
            auto div = divide_by_action(Rq[i], w[i]);
            if (!div) {
                throw Error("good_number_correction: non-polynomial correction at charge " + charge_name(q) +
                            " (division by q.Omega is not exact)");
            }
            Gq = *div * (GaussianRational(1) / minus_si);
        }
        if (!Gq) {
            for (int i = 0; i < M; ++i) {
                if (!Rq[i].is_zero())
                    throw Error("good_number_correction: resonance at charge " + charge_name(q) +
                                ": fluctuation lies in the kernel of {., h}");
            }
            continue;
        }
        for (int j = 0; j < M; ++j) {
            if (!(Rq[j] == action_to_ladder(w[j]) * *Gq * minus_si)) {
                throw Error("good_number_correction: inconsistent fluctuations at charge " + charge_name(q));
            }
        }
        G_ladder += *Gq;
    }

    NumberSystem out = NS;
    out.G = from_ladder(G_ladder, chart);
    out.G_gradients.clear();
    for (int i = 0; i < M; ++i) out.G_gradients.push_back(angle_derivative(G_ladder, i, s));
    if (!out.G.is_zero()) {
        for (int a = 0; a < 2 * M; ++a) out.S.Z[a][2] += poisson_bracket(out.G, chart.forward[a]);
        out.L = ladder_series(out.S, std::min(out.S.Z[0].order(), 5));
        out.N = number_series(out.L);
    }
    out.compatibility_order = compatibility_defect(out.N, Q.H).first_nonzero_order();
    return out;
}

EBKRule bs_rule(const QuantumIntegrableSystem& Q, const BSOptions& opts, BSDiagnostics* diag) {
    auto failures = validate_system(Q);
    if (!failures.empty()) throw Error("bs_rule: invalid system: " + failures.front());
    NumberSystem NS = number_system(Q.chart, Q.H.front().order());
    NumberSystem NSp = good_number_correction(Q, NS, opts.k2);
    Residual2 res = second_order_residual(Q, NS.N, opts.k2);

    EBKRule rule;
    rule.M = Q.M;
    rule.f = Q.f;
    for (int i = 0; i < Q.M; ++i) rule.F2.push_back(as_action_polynomial(angle_average(to_ladder(res.R[i], Q.chart))));

    std::optional<int> residual_order;
    for (int i = 0; i < Q.M; ++i) {
        HbarSeries F = star_compose(Q.f[i], NSp.N) + star_compose(rule.F2[i], NSp.N).shifted(2);
        auto o = StarDefect(Q.H[i] - F).first_nonzero_order;
        if (o && (!residual_order || *o < *residual_order)) residual_order = o;
    }
    if (diag) *diag = {NSp, NSp.compatibility_order, residual_order, res.K2};
    if (opts.verify && residual_order && *residual_order < 4) {
        throw Error("bs_rule: H - F o* (N' + hbar/2) nonzero at order " + std::to_string(*residual_order));
    }
    return rule;
}

SpectrumTable spectrum(const EBKRule& rule, double hbar, const std::vector<std::vector<int>>& quantum_numbers) {
    if (!(hbar > 0)) throw Error("spectrum: hbar must be positive");
    SpectrumTable t;
    t.hbar = hbar;
    for (const auto& n : quantum_numbers) {
        if (static_cast<int>(n.size()) != rule.M) throw Error("spectrum: quantum number tuple has wrong length");
        std::vector<double> I(rule.M);
        for (int i = 0; i < rule.M; ++i) {
            if (n[i] < 0) throw Error("spectrum: negative quantum number");
            I[i] = hbar * (n[i] + (rule.half_shift ? 0.5 : 0.0));
        }
        SpectrumRow row{n, {}, std::nullopt, std::nullopt};
        for (int i = 0; i < rule.M; ++i) {
            double e = rule.f[i].evaluate(std::span<const double>(I)).real();
            if (i < static_cast<int>(rule.F2.size())) e += hbar * hbar * rule.F2[i].evaluate(std::span<const double>(I)).real();
            row.E_ebk.push_back(e);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace sdq
