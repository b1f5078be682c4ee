#include "sdq/chart.hpp"

#include <cmath>

#include "sdq/brackets.hpp"

namespace sdq {

namespace {

PhasePoly var(int M, Basis b, int v) { return PhasePoly::variable(M, b, v); }
PhasePoly cst(int M, Basis b, long c) { return PhasePoly::constant(M, b, GaussianRational(c)); }

/// Re-indexes a polynomial into a larger variable set.
PhasePoly embed(const PhasePoly& f, int M_new, const std::vector<int>& var_map) {
    PhasePoly r(M_new, f.basis());
    for (const auto& [m, c] : f.terms()) {
        Monomial e(r.nvars(), 0);
        for (std::size_t v = 0; v < m.size(); ++v) e[var_map[v]] = m[v];
        r.add_term(e, c);
    }
    return r;
}

}  // namespace

DarbouxChart DarbouxChart::identity(int M, Basis domain) {
    DarbouxChart c;
    c.M = M;
    c.domain = domain;
    c.name = "identity";
    for (int a = 0; a < 2 * M; ++a) {
        c.forward.push_back(var(M, domain, a));
        c.inverse.push_back(var(M, Basis::Chart, a));
    }
    return c;
}

DarbouxChart DarbouxChart::shear() {
    DarbouxChart c;
    c.name = "shear";
    const auto x = var(1, Basis::Ambient, 0), p = var(1, Basis::Ambient, 1);
    const auto z1 = var(1, Basis::Chart, 0), z2 = var(1, Basis::Chart, 1);
    c.forward = {x, p + x * x};
    c.inverse = {z1, z2 - z1 * z1};
    return c;
}

DarbouxChart DarbouxChart::twist() {
    DarbouxChart c;
    c.name = "twist";
    const auto x = var(1, Basis::Ambient, 0), p = var(1, Basis::Ambient, 1);
    const auto z1 = var(1, Basis::Chart, 0), z2 = var(1, Basis::Chart, 1);
    const auto v = p + x * x * x;
    c.forward = {x + v * v * v, v};
    const auto xz = z1 - z2 * z2 * z2;
    c.inverse = {xz, z2 - xz * xz * xz};
    return c;
}

DarbouxChart DarbouxChart::coupled() {
    DarbouxChart c;
    c.M = 2;
    c.name = "coupled";
    const auto x1 = var(2, Basis::Ambient, 0), x2 = var(2, Basis::Ambient, 1);
    const auto p1 = var(2, Basis::Ambient, 2), p2 = var(2, Basis::Ambient, 3);
    const auto v1 = p1 + x1 * x2 * x2, v2 = p2 + x1 * x1 * x2;
    c.forward = {x1 + v1 * v2 * v2, x2 + v1 * v1 * v2, v1, v2};
    const auto z1 = var(2, Basis::Chart, 0), z2 = var(2, Basis::Chart, 1);
    const auto z3 = var(2, Basis::Chart, 2), z4 = var(2, Basis::Chart, 3);
    const auto X1 = z1 - z3 * z4 * z4, X2 = z2 - z3 * z3 * z4;
    c.inverse = {X1, X2, z3 - X1 * X2 * X2, z4 - X1 * X1 * X2};
    return c;
}

DarbouxChart DarbouxChart::product(const DarbouxChart& first, const DarbouxChart& second) {
    if (first.domain != second.domain) throw Error("product chart: domain bases differ");
    const int M1 = first.M, M2 = second.M, M = M1 + M2;
    DarbouxChart c;
    c.M = M;
    c.domain = first.domain;
    c.name = first.name + "*" + second.name;
    std::vector<int> map1(2 * M1), map2(2 * M2);
    for (int i = 0; i < M1; ++i) {
        map1[i] = i;
        map1[M1 + i] = M + i;
    }
    for (int j = 0; j < M2; ++j) {
        map2[j] = M1 + j;
        map2[M2 + j] = M + M1 + j;
    }
    c.forward.resize(2 * M);
    c.inverse.resize(2 * M);
    for (int a = 0; a < 2 * M1; ++a) {
        c.forward[map1[a]] = embed(first.forward[a], M, map1);
        c.inverse[map1[a]] = embed(first.inverse[a], M, map1);
    }
    for (int a = 0; a < 2 * M2; ++a) {
        c.forward[map2[a]] = embed(second.forward[a], M, map2);
        c.inverse[map2[a]] = embed(second.inverse[a], M, map2);
    }
    return c;
}

PhasePoly DarbouxChart::to_chart(const PhasePoly& f) const {
    if (f.basis() != domain || f.M() != M) throw Error("to_chart: polynomial is not in the chart's domain basis");
    return f.substitute(inverse);
}

PhasePoly DarbouxChart::from_chart(const PhasePoly& g) const {
    if (g.basis() != Basis::Chart || g.M() != M) throw Error("from_chart: polynomial is not in chart basis");
    return g.substitute(forward);
}

ChartReport validate_chart(const DarbouxChart& chart, int grid_points, double grid_radius) {
    ChartReport report;
    auto fail = [&](std::string msg) {
        report.valid = false;
        report.failures.push_back(std::move(msg));
    };
    const int M = chart.M, n = 2 * M;
    if (static_cast<int>(chart.forward.size()) != n || static_cast<int>(chart.inverse.size()) != n) {
        fail("chart must list 2M forward and 2M inverse polynomials");
        return report;
    }
    for (int a = 0; a < n; ++a) {
        if (chart.forward[a].basis() != chart.domain || chart.forward[a].M() != M) {
            fail("forward[" + std::to_string(a) + "] is not in the domain basis");
        }
        if (chart.inverse[a].basis() != Basis::Chart || chart.inverse[a].M() != M) {
            fail("inverse[" + std::to_string(a) + "] is not in chart basis");
        }
    }
    if (!report.valid) return report;

    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            PhasePoly br = poisson_bracket(chart.forward[a], chart.forward[b]);
            PhasePoly expected = cst(M, chart.domain, poisson_tensor(M, a, b));
            if (!(br == expected)) {
                fail("{z" + std::to_string(a + 1) + ",z" + std::to_string(b + 1) + "} = " + br.to_string() +
                     ", expected " + expected.to_string());
            }
        }
    }
    for (int a = 0; a < n; ++a) {
        PhasePoly fi = chart.forward[a].substitute(chart.inverse);
        if (!(fi == var(M, Basis::Chart, a))) {
            fail("forward(inverse(z)) differs from z" + std::to_string(a + 1) + ": " + fi.to_string());
        }
        PhasePoly iff = chart.inverse[a].substitute(chart.forward);
        if (!(iff == var(M, chart.domain, a))) {
            fail("inverse(forward) differs from coordinate " + std::to_string(a + 1) + ": " + iff.to_string());
        }
    }
    // Actions are sums of squares of the forward maps; a complex forward map can break that.
    auto I = actions(chart);
    std::vector<double> pt(n);
    const int total = static_cast<int>(std::pow(grid_points, n));
    for (int idx = 0; idx < total; ++idx) {
        int rem = idx;
        for (int v = 0; v < n; ++v) {
            int k = rem % grid_points;
            rem /= grid_points;
            pt[v] = grid_points == 1 ? 0.0 : -grid_radius + 2.0 * grid_radius * k / (grid_points - 1);
        }
        for (int i = 0; i < M; ++i) {
            auto val = I[i].evaluate(std::span<const double>(pt));
            if (val.real() < -1e-12 || std::abs(val.imag()) > 1e-12) {
                fail("action I" + std::to_string(i + 1) + " negative or complex at a sample point");
                return report;
            }
        }
    }
    return report;
}

GammaTensor::GammaTensor(int M, Basis basis) : M_(M), basis_(basis) {
    entries_.assign(static_cast<std::size_t>(dim()) * dim() * dim(), PhasePoly(M, basis));
}

bool GammaTensor::is_zero() const {
    for (const auto& e : entries_) {
        if (!e.is_zero()) return false;
    }
    return true;
}

bool GammaTensor::is_symmetric() const {
    const int n = dim();
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                const auto& v = (*this)(a, b, c);
                if (!(v == (*this)(b, a, c)) || !(v == (*this)(a, c, b))) return false;
            }
        }
    }
    return true;
}

namespace {

GammaTensor move_indices(const GammaTensor& t, int (*tensor)(int, int, int)) {
    const int M = t.M(), n = t.dim();
    GammaTensor r(M, t.basis());
    // Each J row has a single nonzero entry, so every index maps to its partner with a sign.
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                int pa = symplectic_partner(M, a), pb = symplectic_partner(M, b), pc = symplectic_partner(M, c);
                int sign = tensor(M, a, pa) * tensor(M, b, pb) * tensor(M, c, pc);
                r(a, b, c) = t(pa, pb, pc) * GaussianRational(sign);
            }
        }
    }
    return r;
}

}  // namespace

GammaTensor GammaTensor::lowered() const { return move_indices(*this, &poisson_tensor_inverse); }
GammaTensor GammaTensor::raised() const { return move_indices(*this, &poisson_tensor); }

namespace {

/// v^x_j = sum_i d_i z^x J^{ij}, i.e. the arrow out of z^x.
std::vector<std::vector<PhasePoly>> arrow_vectors(const DarbouxChart& chart) {
    const int M = chart.M, n = 2 * M;
    std::vector<std::vector<PhasePoly>> v(n, std::vector<PhasePoly>(n, PhasePoly(M, chart.domain)));
    for (int x = 0; x < n; ++x) {
        for (int i = 0; i < n; ++i) {
            int j = symplectic_partner(M, i);
            v[x][j] += chart.forward[x].derivative(i) * GaussianRational(poisson_tensor(M, i, j));
        }
    }
    return v;
}

GammaTensor gamma_raw(const DarbouxChart& chart) {
    const int M = chart.M, n = 2 * M;
    auto v = arrow_vectors(chart);
    GammaTensor g(M, chart.domain);
    for (int b = 0; b < n; ++b) {
        std::vector<std::vector<PhasePoly>> hess(n, std::vector<PhasePoly>(n));
        for (int j = 0; j < n; ++j) {
            for (int l = 0; l < n; ++l) hess[j][l] = chart.forward[b].derivative(j).derivative(l);
        }
        for (int a = 0; a < n; ++a) {
            for (int c = 0; c < n; ++c) {
                PhasePoly sum(M, chart.domain);
                for (int j = 0; j < n; ++j) {
                    if (v[a][j].is_zero()) continue;
                    for (int l = 0; l < n; ++l) {
                        if (hess[j][l].is_zero() || v[c][l].is_zero()) continue;
                        sum += v[a][j] * hess[j][l] * v[c][l];
                    }
                }
                g(a, b, c) = sum;
            }
        }
    }
    return g;
}

std::vector<MagicResidual> magic_impl(const DarbouxChart& chart, const GammaTensor& g) {
    const int M = chart.M, n = 2 * M;
    auto v = arrow_vectors(chart);
    std::vector<MagicResidual> out;
    for (int d = 0; d < n; ++d) {
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                for (int c = 0; c < n; ++c) {
                    PhasePoly lhs = poisson_bracket(chart.forward[d], g(a, b, c));
                    PhasePoly rhs(M, chart.domain);
                    for (int j = 0; j < n; ++j) {
                        if (v[a][j].is_zero()) continue;
                        for (int m = 0; m < n; ++m) {
                            if (v[b][m].is_zero()) continue;
                            for (int l = 0; l < n; ++l) {
                                if (v[c][l].is_zero()) continue;
                                PhasePoly third = chart.forward[d].derivative(j).derivative(m).derivative(l);
                                if (third.is_zero()) continue;
                                rhs += v[a][j] * v[b][m] * v[c][l] * third;
                            }
                        }
                    }
                    out.push_back({{a, b, c, d}, lhs - rhs});
                }
            }
        }
    }
    return out;
}

}  // namespace

GammaTensor gamma(const DarbouxChart& chart) {
    GammaTensor g = gamma_raw(chart);
    if (!g.is_symmetric()) throw Error("gamma: tensor is not fully symmetric; chart is not Darboux");
    return g;
}

std::vector<MagicResidual> magic_identity_defect(const DarbouxChart& chart) { return magic_impl(chart, gamma(chart)); }

std::vector<MagicResidual> magic_identity_defect_unchecked(const DarbouxChart& chart) {
    return magic_impl(chart, gamma_raw(chart));
}

std::vector<PhasePoly> actions(const DarbouxChart& chart) {
    std::vector<PhasePoly> I;
    const int M = chart.M;
    for (int i = 0; i < M; ++i) {
        const auto& z = chart.forward[i];
        const auto& w = chart.forward[i + M];
        I.push_back((z * z + w * w) * GaussianRational::frac(1, 2));
    }
    return I;
}

ScaledLadder ladder(const DarbouxChart& chart) {
    ScaledLadder l;
    const int M = chart.M;
    const GaussianRational si = GaussianRational::i() * GaussianRational(chart.ladder_sign);
    for (int i = 0; i < M; ++i) {
        const auto& z = chart.forward[i];
        const auto& w = chart.forward[i + M];
        l.a.push_back(z + w * si);
        l.abar.push_back(z - w * si);
    }
    return l;
}

}  // namespace sdq
