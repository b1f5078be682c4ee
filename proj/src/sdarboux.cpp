#include "sdq/sdarboux.hpp"

#include <algorithm>

#include "sdq/brackets.hpp"

namespace sdq {

namespace {

const GaussianRational kI = GaussianRational::i();

/// Multiplies each degree-d monomial by 1/(d + shift).
PhasePoly radial_weight(const PhasePoly& p, unsigned shift) {
    PhasePoly out(p.M(), p.basis());
    for (const auto& [m, c] : p.terms()) out.add_term(m, c * GaussianRational(Rational(1, total_degree(m) + shift)));
    return out;
}

}  // namespace

SDarbouxSet SDarbouxSet::bare(const DarbouxChart& chart, int order) {
    SDarbouxSet S{chart, {}};
    for (const auto& z : chart.forward) S.Z.emplace_back(z, order);
    return S;
}

SDarbouxSet SDarbouxSet::corrected(const DarbouxChart& chart, int order) {
    SDarbouxSet S = bare(chart, order);
    if (order < 2) return S;
    auto z2 = z2_correction(chart);
    for (std::size_t a = 0; a < z2.size(); ++a) S.Z[a][2] += z2[a];
    return S;
}

std::vector<PhasePoly> z2_correction(const DarbouxChart& chart) {
    const int n = 2 * chart.M;
    GammaTensor up = gamma(chart);
    GammaTensor down = up.lowered();
    std::vector<PhasePoly> out;
    for (int a = 0; a < n; ++a) {
        PhasePoly sum(chart.M, chart.domain);
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    if (down(b, c, d).is_zero() || up(b, c, d).is_zero()) continue;
                    sum += down(b, c, d) * poisson_bracket(chart.forward[a], up(b, c, d));
                }
        out.push_back(sum * GaussianRational::frac(1, 48));
    }
    return out;
}

std::optional<int> SDarbouxDefect::first_nonzero_order() const {
    std::optional<int> best;
    for (const auto& p : pairs) {
        if (p.defect.first_nonzero_order && (!best || *p.defect.first_nonzero_order < *best))
            best = p.defect.first_nonzero_order;
    }
    return best;
}

bool SDarbouxDefect::order_at_least(int k) const {
    auto o = first_nonzero_order();
    return !o || *o >= k;
}

PhasePoly SDarbouxDefect::coefficient(int i, int j, int k) const {
    for (const auto& p : pairs) {
        if (p.i == i && p.j == j) return p.defect.residual[k];
        if (p.i == j && p.j == i) return -p.defect.residual[k];
    }
    if (pairs.empty()) throw Error("SDarbouxDefect: empty defect");
    const auto& r = pairs.front().defect.residual;
    return PhasePoly(r.M(), r.basis());
}

SDarbouxDefect sdarboux_defect(const SDarbouxSet& S) {
    SDarbouxDefect out;
    const int M = S.chart.M, n = 2 * M;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            HbarSeries r = star_commutator(S.Z[i], S.Z[j]);
            int J = poisson_tensor(M, i, j);
            if (J != 0 && r.order() >= 1) r[1] -= PhasePoly::constant(M, r.basis(), kI * GaussianRational(J));
            out.pairs.push_back({i, j, StarDefect(std::move(r))});
        }
    }
    return out;
}

PolyOneForm::PolyOneForm(int M_) : M(M_), c(2 * M_, PhasePoly(M_, Basis::Chart)) {}

bool PolyOneForm::is_zero() const {
    return std::all_of(c.begin(), c.end(), [](const PhasePoly& p) { return p.is_zero(); });
}

PolyTwoForm::PolyTwoForm(int M) : M_(M), c_(4 * M * M, PhasePoly(M, Basis::Chart)) {}

void PolyTwoForm::set(int a, int b, const PhasePoly& p) {
    if (a == b) {
        if (!p.is_zero()) throw Error("PolyTwoForm: diagonal component must vanish");
        return;
    }
    c_[a * dim() + b] = p;
    c_[b * dim() + a] = -p;
}

bool PolyTwoForm::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const PhasePoly& p) { return p.is_zero(); });
}

bool PolyThreeForm::is_zero() const { return first_nonzero() == nullptr; }

const PolyThreeForm::Component* PolyThreeForm::first_nonzero() const {
    for (const auto& comp : components)
        if (!comp.value.is_zero()) return &comp;
    return nullptr;
}

PolyTwoForm exterior_derivative(const PolyOneForm& theta) {
    PolyTwoForm w(theta.M);
    for (int a = 0; a < theta.dim(); ++a)
        for (int b = a + 1; b < theta.dim(); ++b) w.set(a, b, theta.c[b].derivative(a) - theta.c[a].derivative(b));
    return w;
}

PolyThreeForm exterior_derivative(const PolyTwoForm& w) {
    PolyThreeForm u;
    u.M = w.M();
    const int n = w.dim();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                u.components.push_back(
                    {a, b, c, w(b, c).derivative(a) + w(c, a).derivative(b) + w(a, b).derivative(c)});
    return u;
}

PolyTwoForm defect_two_form(const SDarbouxSet& S) {
    const int M = S.chart.M, n = 2 * M;
    PolyTwoForm w(M);
    SDarbouxDefect D = sdarboux_defect(S);
    auto k = D.first_nonzero_order();
    if (!k) return w;
    const GaussianRational minus_i = -kI;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            int i = symplectic_partner(M, a), j = symplectic_partner(M, b);
            int sign = poisson_tensor_inverse(M, a, i) * poisson_tensor_inverse(M, b, j);
            PhasePoly E = D.coefficient(i, j, *k) * minus_i;
            w.set(a, b, S.chart.to_chart(E) * GaussianRational(sign));
        }
    }
    return w;
}

PolyOneForm poincare_homotopy(const PolyTwoForm& w) {
    PolyThreeForm dw = exterior_derivative(w);
    if (const auto* bad = dw.first_nonzero()) {
        throw Error("poincare_homotopy: form is not closed, (dw)_{" + std::to_string(bad->a + 1) +
                    std::to_string(bad->b + 1) + std::to_string(bad->c + 1) + "} = " + bad->value.to_string());
    }
    const int M = w.M(), n = w.dim();
    PolyOneForm theta(M);
    for (int b = 0; b < n; ++b) {
        PhasePoly sum(M, Basis::Chart);
        for (int a = 0; a < n; ++a) {
            if (w(a, b).is_zero()) continue;
            sum += PhasePoly::variable(M, Basis::Chart, a) * radial_weight(w(a, b), 2);
        }
        theta.c[b] = sum;
    }
    return theta;
}

SDarbouxSet extend_order(const SDarbouxSet& S) {
    auto k = sdarboux_defect(S).first_nonzero_order();
    if (!k) return S;
    if (*k < 2) throw Error("extend_order: principal symbols are not Darboux (defect at order " + std::to_string(*k) + ")");
    const int M = S.chart.M, n = 2 * M;
    PolyTwoForm w = defect_two_form(S);
    PolyTwoForm minus_w(M);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) minus_w.set(a, b, -w(a, b));
    PolyOneForm theta = poincare_homotopy(minus_w);

    SDarbouxSet out = S;
    for (int j = 0; j < n; ++j) {
        int b = symplectic_partner(M, j);
        PhasePoly X = theta.c[b] * GaussianRational(poisson_tensor(M, j, b));
        out.Z[j][*k - 1] += S.chart.from_chart(X);
    }
    return out;
}

}  // namespace sdq
