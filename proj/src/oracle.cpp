#include "sdq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdq {

namespace {

using Mat = Eigen::MatrixXcd;

Mat annihilation(int D) {
    Mat a = Mat::Zero(D, D);
    for (int n = 1; n < D; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

double binomial(int m, int k) {
    double r = 1;
    for (int j = 1; j <= k; ++j) r = r * (m - k + j) / j;
    return r;
}

/// powers[k] = base^k for k = 0..kmax.
std::vector<Mat> powers(const Mat& base, int kmax) {
    std::vector<Mat> out{Mat::Identity(base.rows(), base.cols())};
    for (int k = 1; k <= kmax; ++k) out.push_back(out.back() * base);
    return out;
}

void require_oracle_symbol(const PhasePoly& f) {
    if (f.M() != 1) throw Error("weyl_matrix: only M = 1 symbols are supported");
    if (f.basis() != Basis::Ambient) throw Error("weyl_matrix: expected an ambient-basis polynomial");
}

Mat weyl_sum(const std::vector<std::pair<const PhasePoly*, double>>& parts, int D, double hbar) {
    int deg = 0;
    for (const auto& [p, w] : parts) {
        require_oracle_symbol(*p);
        deg = std::max(deg, p->degree());
    }
    if (D < 1) throw Error("weyl_matrix: dimension must be positive");
    const int big = D + deg;
    const Mat X = position_matrix(big, hbar), P = momentum_matrix(big, hbar);
    const auto Xk = powers(X, deg), Pk = powers(P, deg);
    Mat out = Mat::Zero(big, big);
    for (const auto& [p, w] : parts) {
        for (const auto& [mono, c] : p->terms()) {
            const int m = static_cast<int>(mono[0]), n = static_cast<int>(mono[1]);
            Mat sym = Mat::Zero(big, big);
            for (int k = 0; k <= m; ++k) sym += binomial(m, k) * (Xk[k] * Pk[n] * Xk[m - k]);
            out += (w * std::ldexp(1.0, -m)) * c.to_complex() * sym;
        }
    }
    return out.topLeftCorner(D, D);
}

}  // namespace

double OperatorMatrix::hermiticity_residual() const {
    if (entries.size() == 0) return 0;
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd position_matrix(int D, double hbar) {
    Mat a = annihilation(D);
    return std::sqrt(hbar / 2) * (a + a.adjoint());
}

Eigen::MatrixXcd momentum_matrix(int D, double hbar) {
    Mat a = annihilation(D);
    return std::complex<double>(0, std::sqrt(hbar / 2)) * (a.adjoint() - a);
}

OperatorMatrix weyl_matrix(const PhasePoly& f, int D, double hbar) {
    if (!(hbar > 0)) throw Error("weyl_matrix: hbar must be positive");
    return {D, hbar, weyl_sum({{&f, 1.0}}, D, hbar)};
}

OperatorMatrix weyl_matrix(const HbarSeries& F, int D, double hbar) {
    if (!(hbar > 0)) throw Error("weyl_matrix: hbar must be positive");
    std::vector<std::pair<const PhasePoly*, double>> parts;
    for (int k = 0; k <= F.order(); ++k)
        if (!F[k].is_zero()) parts.emplace_back(&F[k], std::pow(hbar, k));
    if (parts.empty()) return {D, hbar, Mat::Zero(D, D)};
    return {D, hbar, weyl_sum(parts, D, hbar)};
}

std::vector<double> eigenvalues(const OperatorMatrix& A) {
    const double scale = A.entries.size() ? A.entries.cwiseAbs().maxCoeff() : 0.0;
    if (A.hermiticity_residual() > 1e-12 * std::max(scale, 1e-300))
        throw Error("eigenvalues: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> solver(A.entries);
    if (solver.info() != Eigen::Success) throw Error("eigenvalues: eigensolver did not converge");
    const double norm = solver.eigenvalues().cwiseAbs().maxCoeff();
    const auto& V = solver.eigenvectors();
    for (int k = 0; k < A.dim; ++k) {
        double r = (A.entries * V.col(k) - solver.eigenvalues()(k) * V.col(k)).norm();
        if (r > 1e-10 * std::max(norm, 1e-300)) throw Error("eigenvalues: residual bound violated");
    }
    std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + A.dim);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<OracleLevel> converged_levels(const HbarSeries& H, int D, double hbar, int n_max) {
    if (n_max < 0 || n_max >= D) throw Error("converged_levels: n_max must lie in [0, D)");
    auto e1 = eigenvalues(weyl_matrix(H, D, hbar));
    auto e2 = eigenvalues(weyl_matrix(H, 2 * D, hbar));
    std::vector<OracleLevel> out;
    for (int n = 0; n <= n_max; ++n) {
        OracleLevel L{n, e1[n], e2[n], false};
        L.converged = std::abs(e1[n] - e2[n]) < 1e-8 * std::max(std::abs(e2[n]), hbar);
        out.push_back(L);
    }
    return out;
}

ComparisonReport compare(const EBKRule& rule, const HbarSeries& H, int D, const std::vector<double>& hbars, int n_max,
                         bool fit) {
    if (rule.M != 1) throw Error("compare: only M = 1 rules are supported");
    ComparisonReport rep;
    for (double hbar : hbars) {
        auto levels = converged_levels(H, D, hbar, n_max);
        auto full = eigenvalues(weyl_matrix(H, D, hbar));
        const double norm = std::max(std::abs(full.front()), std::abs(full.back()));
        double worst = 0;
        int kept = 0;
        for (const auto& L : levels) {
            if (!L.converged) {
                rep.dropped.emplace_back(hbar, L.n);
                continue;
            }
            double e = spectrum(rule, hbar, {{L.n}}).rows[0].E_ebk[0];
            double d = std::abs(e - L.E_doubled);
            rep.rows.push_back({hbar, L.n, e, L.E_doubled, d});
            worst = std::max(worst, d);
            ++kept;
        }
        if (kept == 0) throw Error("compare: no converged levels up to n_max at hbar = " + std::to_string(hbar));
        rep.max_diff.push_back(worst);
        rep.noise_floor.push_back(100 * std::numeric_limits<double>::epsilon() * std::max(norm, 1.0) * 2 * D);
    }
    if (fit) {
        std::vector<double> xs, ys;
        for (std::size_t k = 0; k < hbars.size(); ++k)
            if (rep.max_diff[k] > rep.noise_floor[k]) {
                xs.push_back(std::log(hbars[k]));
                ys.push_back(std::log(rep.max_diff[k]));
            }
        if (xs.size() >= 2) {
            const double n = static_cast<double>(xs.size());
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                sx += xs[k];
                sy += ys[k];
                sxx += xs[k] * xs[k];
                sxy += xs[k] * ys[k];
            }
            const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            rep.fit = HbarFit{slope, (sy - slope * sx) / n, static_cast<int>(xs.size())};
        }
    }
    return rep;
}

double interior_difference(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, int margin) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) throw Error("interior_difference: shape mismatch");
    const int n = static_cast<int>(A.rows()) - margin;
    if (n <= 0) return 0;
    auto a = A.topLeftCorner(n, n), b = B.topLeftCorner(n, n);
    const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace sdq
