#include "sdq/fedosov.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "sdq/brackets.hpp"
#include "sdq/ladder.hpp"

namespace sdq {

namespace {

const GaussianRational kI = GaussianRational::i();

using Christoffel = std::vector<std::vector<std::vector<PhasePoly>>>;  // [d][a][b]

Christoffel christoffel_table(const SymplecticConnection& conn) {
    const int n = conn.dim();
    Christoffel chr(n, std::vector<std::vector<PhasePoly>>(n, std::vector<PhasePoly>(n)));
    for (int d = 0; d < n; ++d)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) chr[d][a][b] = conn.christoffel(d, a, b);
    return chr;
}

/// Calls visit(idx) for every index tuple of the given length over 0..dim-1.
template <class F>
void for_each_tuple(int dim, int len, F&& visit) {
    std::vector<int> idx(len, 0);
    while (true) {
        visit(std::span<const int>(idx));
        int k = 0;
        while (k < len && ++idx[k] == dim) idx[k++] = 0;
        if (k == len) return;
    }
}

std::vector<SymTensor> jets_impl(const PhasePoly& f, int M, const Christoffel& chr, const RiemannTensor* R, int n,
                                 const Rational& c_R) {
    if (n < 0 || n > 3) throw Error("covariant_jets: only orders 0..3 are available");
    if (f.basis() != Basis::Chart) throw Error("covariant_jets: expected a chart-basis polynomial");
    const int dim = 2 * M;
    std::vector<SymTensor> jets;
    SymTensor j0(M, 0);
    j0.at({}) = f;
    jets.push_back(j0);
    if (n == 0) return jets;

    std::vector<PhasePoly> grad(dim);
    SymTensor j1(M, 1);
    for (int a = 0; a < dim; ++a) {
        grad[a] = f.derivative(a);
        int idx[1] = {a};
        j1.at(idx) = grad[a];
    }
    jets.push_back(j1);
    if (n == 1) return jets;

    SymTensor j2(M, 2);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            PhasePoly v = grad[a].derivative(b);
            for (int c = 0; c < dim; ++c)
                if (!chr[c][a][b].is_zero() && !grad[c].is_zero()) v -= chr[c][a][b] * grad[c];
            int idx[2] = {a, b};
            j2.at(idx) = v;
        }
    jets.push_back(j2);
    if (n == 2) return jets;

    auto T = [&](int b, int c) -> const PhasePoly& {
        int idx[2] = {b, c};
        return j2.at(idx);
    };
    SymTensor raw(M, 3);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            for (int c = 0; c < dim; ++c) {
                PhasePoly v = T(b, c).derivative(a);
                for (int e = 0; e < dim; ++e) {
                    if (!chr[e][a][b].is_zero() && !T(e, c).is_zero()) v -= chr[e][a][b] * T(e, c);
                    if (!chr[e][a][c].is_zero() && !T(b, e).is_zero()) v -= chr[e][a][c] * T(b, e);
                }
                int idx[3] = {a, b, c};
                raw.at(idx) = v;
            }
    SymTensor j3 = raw.symmetrized();
    if (R && c_R != 0) {
        const GaussianRational cr(c_R);
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                for (int c = 0; c < dim; ++c) {
                    int idx[3] = {a, b, c};
                    for (int d = 0; d < dim; ++d)
                        if (!(*R)(a, b, c, d).is_zero() && !grad[d].is_zero()) j3.at(idx) -= (*R)(a, b, c, d) * grad[d] * cr;
                }
    }
    jets.push_back(j3);
    return jets;
}

PhasePoly factorial_weight_bracket(const SymTensor& f, const SymTensor& g, int n) {
    // (1/n!) (i/2)^n
    GaussianRational w(1);
    for (int k = 1; k <= n; ++k) w *= kI * GaussianRational::frac(1, 2 * k);
    return covariant_bracket(f, g) * w;
}

}  // namespace

PhasePoly SymplecticConnection::christoffel(int d, int a, int b) const {
    int e = symplectic_partner(M(), d);
    return lower(e, a, b) * GaussianRational(poisson_tensor(M(), d, e));
}

SymplecticConnection SymplecticConnection::flat(int M) { return {GammaTensor(M, Basis::Chart), false}; }

SymplecticConnection SymplecticConnection::from_lower(GammaTensor lower) {
    if (lower.basis() != Basis::Chart) throw Error("SymplecticConnection: Gamma must be in chart basis");
    if (!lower.is_symmetric()) throw Error("SymplecticConnection: Gamma_{abc} is not fully symmetric");
    return {std::move(lower), false};
}

SymplecticConnection connection_from_chart(const DarbouxChart& chart) {
    const int M = chart.M, n = 2 * M;
    std::vector<std::vector<PhasePoly>> jac(n, std::vector<PhasePoly>(n));  // [d][k] = dz^d/dx^k in chart vars
    for (int d = 0; d < n; ++d)
        for (int k = 0; k < n; ++k) jac[d][k] = chart.to_chart(chart.forward[d].derivative(k));
    GammaTensor lower(M, Basis::Chart);
    for (int f = 0; f < n; ++f) {
        int d = symplectic_partner(M, f);
        GaussianRational s(poisson_tensor_inverse(M, f, d));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                PhasePoly up(M, Basis::Chart);
                for (int k = 0; k < n; ++k) {
                    PhasePoly h = chart.inverse[k].derivative(a).derivative(b);
                    if (!h.is_zero()) up += jac[d][k] * h;
                }
                lower(f, a, b) = up * s;
            }
    }
    auto conn = SymplecticConnection::from_lower(std::move(lower));
    conn.derived_from_chart = true;
    return conn;
}

SymTensor::SymTensor(int M, int rank) : M_(M), rank_(rank) {
    std::size_t size = 1;
    for (int k = 0; k < rank; ++k) size *= dim();
    c_.assign(size, PhasePoly(M, Basis::Chart));
}

std::size_t SymTensor::flat(std::span<const int> idx) const {
    std::size_t r = 0;
    for (int k = rank_ - 1; k >= 0; --k) r = r * dim() + idx[k];
    return r;
}

const PhasePoly& SymTensor::operator()(int a, int b, int c) const {
    int idx[3] = {a, b, c};
    return at(std::span<const int>(idx, rank_));
}

bool SymTensor::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const PhasePoly& p) { return p.is_zero(); });
}

bool SymTensor::is_symmetric() const { return symmetrized() == *this; }

SymTensor SymTensor::symmetrized() const {
    if (rank_ < 2) return *this;
    SymTensor out(M_, rank_);
    std::vector<int> perm(rank_);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> perms;
    do perms.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));
    const GaussianRational w = GaussianRational::frac(1, static_cast<long>(perms.size()));
    for_each_tuple(dim(), rank_, [&](std::span<const int> idx) {
        PhasePoly sum(M_, Basis::Chart);
        std::vector<int> p(rank_);
        for (const auto& pm : perms) {
            for (int k = 0; k < rank_; ++k) p[k] = idx[pm[k]];
            sum += at(p);
        }
        out.at(idx) = sum * w;
    });
    return out;
}

RiemannTensor::RiemannTensor(int M) : M_(M) {
    const std::size_t n = dim();
    c_.assign(n * n * n * n, PhasePoly(M, Basis::Chart));
}

bool RiemannTensor::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const PhasePoly& p) { return p.is_zero(); });
}

RiemannTensor riemann(const SymplecticConnection& conn) {
    const int M = conn.M(), n = conn.dim();
    if (!conn.lower.is_symmetric()) throw Error("riemann: Gamma_{abc} is not fully symmetric");
    auto chr = christoffel_table(conn);
    auto raw = [&](int a1, int a2, int a3, int d) {
        PhasePoly v = -chr[d][a1][a2].derivative(a3);
        int e = symplectic_partner(M, d);
        v += conn.lower(a1, a2, a3).derivative(e) * GaussianRational(poisson_tensor(M, d, e));
        for (int h = 0; h < n; ++h) {
            if (!chr[h][a1][a3].is_zero() && !chr[d][h][a2].is_zero()) v += chr[h][a1][a3] * chr[d][h][a2];
            if (!chr[h][a2][a3].is_zero() && !chr[d][h][a1].is_zero()) v += chr[h][a2][a3] * chr[d][h][a1];
        }
        return v;
    };
    RiemannTensor R(M);
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int d = 0; d < n; ++d)
        for (int a1 = 0; a1 < n; ++a1)
            for (int a2 = 0; a2 < n; ++a2)
                for (int a3 = 0; a3 < n; ++a3) {
                    const int a[3] = {a1, a2, a3};
                    PhasePoly sum(M, Basis::Chart);
                    for (const auto& p : perms) sum += raw(a[p[0]], a[p[1]], a[p[2]], d);
                    R(a1, a2, a3, d) = sum * GaussianRational::frac(1, 6);
                }
    return R;
}

std::vector<SymTensor> covariant_jets(const PhasePoly& f, const SymplecticConnection& conn, int n, const Rational& c_R) {
    auto chr = christoffel_table(conn);
    if (n < 3 || c_R == 0) return jets_impl(f, conn.M(), chr, nullptr, n, c_R);
    RiemannTensor R = riemann(conn);
    return jets_impl(f, conn.M(), chr, &R, n, c_R);
}

PhasePoly covariant_bracket(const SymTensor& f, const SymTensor& g) {
    if (f.rank() != g.rank() || f.M() != g.M()) throw Error("covariant_bracket: jet rank mismatch");
    const int M = f.M(), r = f.rank();
    PhasePoly sum(M, Basis::Chart);
    std::vector<int> j(r);
    for_each_tuple(f.dim(), r, [&](std::span<const int> i) {
        const PhasePoly& fi = f.at(i);
        if (fi.is_zero()) return;
        int sign = 1;
        for (int k = 0; k < r; ++k) {
            j[k] = symplectic_partner(M, i[k]);
            sign *= poisson_tensor(M, i[k], j[k]);
        }
        const PhasePoly& gj = g.at(j);
        if (!gj.is_zero()) sum += fi * gj * GaussianRational(sign);
    });
    return sum;
}

HbarSeries fedosov_star(const HbarSeries& F, const HbarSeries& G, const SymplecticConnection& conn, const Rational& c_R) {
    if (F.order() != G.order() || F.M() != G.M() || F.basis() != G.basis())
        throw Error("fedosov_star: mismatched series");
    if (F.basis() != Basis::Chart) throw Error("fedosov_star: series must be in chart basis");
    if (F.order() > 3) throw Error("fedosov_star: jets are only available through hbar^3; truncate to order <= 3");
    const int T = F.order(), M = F.M();
    auto chr = christoffel_table(conn);
    std::optional<RiemannTensor> R;
    if (c_R != 0 && T == 3) R = riemann(conn);
    auto jets = [&](const PhasePoly& p, int n) { return jets_impl(p, M, chr, R ? &*R : nullptr, n, c_R); };
    HbarSeries out(M, Basis::Chart, T);
    for (int k = 0; k <= T; ++k) {
        if (F[k].is_zero()) continue;
        auto fj = jets(F[k], T - k);
        for (int l = 0; k + l <= T; ++l) {
            if (G[l].is_zero()) continue;
            auto gj = jets(G[l], T - k - l);
            for (int n = 0; k + l + n <= T; ++n) out[k + l + n] += factorial_weight_bracket(fj[n], gj[n], n);
        }
    }
    return out;
}

HbarSeries fedosov_commutator(const HbarSeries& F, const HbarSeries& G, const SymplecticConnection& conn,
                              const Rational& c_R) {
    return fedosov_star(F, G, conn, c_R) - fedosov_star(G, F, conn, c_R);
}

std::vector<GMagicResidual> gmagic_defect(const SymplecticConnection& conn) {
    const int M = conn.M(), n = conn.dim();
    RiemannTensor R = riemann(conn);
    auto chr = christoffel_table(conn);
    std::vector<GMagicResidual> out;
    for (int d = 0; d < n; ++d) {
        auto j = jets_impl(PhasePoly::variable(M, Basis::Chart, d), M, chr, nullptr, 3, 0);
        int e = symplectic_partner(M, d);
        GaussianRational s(poisson_tensor(M, d, e));
        for (int a1 = 0; a1 < n; ++a1)
            for (int a2 = 0; a2 < n; ++a2)
                for (int a3 = 0; a3 < n; ++a3) {
                    PhasePoly r = j[3](a1, a2, a3) - R(a1, a2, a3, d) + conn.lower(a1, a2, a3).derivative(e) * s;
                    out.push_back({{a1, a2, a3, d}, r});
                }
    }
    return out;
}

std::vector<PhasePoly> fedosov_z2(const SymplecticConnection& conn) {
    const int M = conn.M(), n = conn.dim();
    GammaTensor up = conn.lower.raised();
    std::vector<PhasePoly> out;
    for (int d = 0; d < n; ++d) {
        auto z = PhasePoly::variable(M, Basis::Chart, d);
        PhasePoly sum(M, Basis::Chart);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    if (conn.lower(a, b, c).is_zero() || up(a, b, c).is_zero()) continue;
                    sum += conn.lower(a, b, c) * poisson_bracket(z, up(a, b, c));
                }
        out.push_back(sum * GaussianRational::frac(1, 48));
    }
    return out;
}

std::vector<HbarSeries> fedosov_sdarboux_set(const SymplecticConnection& conn) {
    auto z2 = fedosov_z2(conn);
    std::vector<HbarSeries> Z;
    for (int d = 0; d < conn.dim(); ++d) {
        HbarSeries s(PhasePoly::variable(conn.M(), Basis::Chart, d), 3);
        s[2] += z2[d];
        Z.push_back(s);
    }
    return Z;
}

SDarbouxDefect fedosov_sdarboux_defect(const std::vector<HbarSeries>& Z, const SymplecticConnection& conn,
                                       const Rational& c_R) {
    SDarbouxDefect out;
    const int M = conn.M(), n = conn.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            HbarSeries r = fedosov_commutator(Z[i], Z[j], conn, c_R);
            int J = poisson_tensor(M, i, j);
            if (J != 0) r[1] -= PhasePoly::constant(M, Basis::Chart, kI * GaussianRational(J));
            out.pairs.push_back({i, j, StarDefect(std::move(r))});
        }
    return out;
}

std::vector<PhasePoly> fedosov_n2(const SymplecticConnection& conn, int ladder_sign) {
    const int M = conn.M(), n = conn.dim();
    auto chart = DarbouxChart::identity(M, Basis::Chart);
    chart.ladder_sign = ladder_sign;
    auto lad = ladder(chart);
    auto I = actions(chart);
    GammaTensor up = conn.lower.raised();
    std::vector<PhasePoly> out;
    for (int i = 0; i < M; ++i) {
        auto ja = covariant_jets(lad.a[i], conn, 2);
        auto jb = covariant_jets(lad.abar[i], conn, 2);
        PhasePoly n2 = covariant_bracket(jb[2], ja[2]) * GaussianRational::frac(-1, 16);
        PhasePoly g(M, Basis::Chart);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c) {
                    if (conn.lower(a, b, c).is_zero() || up(a, b, c).is_zero()) continue;
                    g += conn.lower(a, b, c) * poisson_bracket(I[i], up(a, b, c));
                }
        out.push_back(n2 + g * GaussianRational::frac(1, 48));
    }
    return out;
}

std::vector<PhasePoly> fedosov_k2(const std::vector<PhasePoly>& f, const SymplecticConnection& conn) {
    const int M = conn.M(), n = conn.dim();
    auto chart = DarbouxChart::identity(M, Basis::Chart);
    auto I = actions(chart);
    std::vector<std::vector<SymTensor>> jets;
    for (const auto& Ij : I) jets.push_back(covariant_jets(Ij, conn, 2));
    std::vector<std::vector<PhasePoly>> v(M, std::vector<PhasePoly>(n, PhasePoly(M, Basis::Chart)));
    for (int j = 0; j < M; ++j)
        for (int b = 0; b < n; ++b) {
            int a = symplectic_partner(M, b);
            v[j][b] = I[j].derivative(a) * GaussianRational(poisson_tensor(M, a, b));
        }
    std::vector<PhasePoly> out;
    for (const auto& fi : f) {
        PhasePoly two(M, Basis::Chart), three(M, Basis::Chart);
        for (int j = 0; j < M; ++j)
            for (int k = 0; k < M; ++k) {
                PhasePoly d2 = fi.derivative(j).derivative(k);
                if (!d2.is_zero()) two += covariant_bracket(jets[j][2], jets[k][2]) * action_to_domain(d2, chart);
                for (int l = 0; l < M; ++l) {
                    PhasePoly d3 = d2.derivative(l);
                    if (d3.is_zero()) continue;
                    PhasePoly diagram(M, Basis::Chart);
                    for (int b = 0; b < n; ++b)
                        for (int d = 0; d < n; ++d) {
                            int idx[2] = {b, d};
                            diagram += v[j][b] * v[l][d] * jets[k][2].at(idx);
                        }
                    three += diagram * action_to_domain(d3, chart);
                }
            }
        out.push_back(two * GaussianRational::frac(-1, 16) + three * GaussianRational::frac(-1, 24));
    }
    return out;
}

std::vector<PhasePoly> fedosov_f2(const std::vector<PhasePoly>& f, const std::vector<PhasePoly>& H2,
                                  const SymplecticConnection& conn, int ladder_sign) {
    const int M = conn.M();
    auto chart = DarbouxChart::identity(M, Basis::Chart);
    chart.ladder_sign = ladder_sign;
    auto N2 = fedosov_n2(conn, ladder_sign);
    auto K2 = fedosov_k2(f, conn);
    std::vector<PhasePoly> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        PhasePoly r = H2[i] - K2[i];
        for (int j = 0; j < M; ++j) r -= action_to_domain(f[i].derivative(j), chart) * N2[j];
        out.push_back(as_action_polynomial(angle_average(to_ladder(r, chart))));
    }
    return out;
}

}  // namespace sdq
