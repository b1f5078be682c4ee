#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sdq/hbar_series.hpp"
#include "sdq/number.hpp"

namespace sdq {

/// Weyl quantization of a symbol in the first D harmonic-oscillator states.
struct OperatorMatrix {
    int dim = 0;
    double hbar = 1.0;
    Eigen::MatrixXcd entries;

    /// max |A - A^dagger|.
    double hermiticity_residual() const;
};

/// Position and momentum matrices, X = sqrt(hbar/2)(a + a^dagger), P = i sqrt(hbar/2)(a^dagger - a).
Eigen::MatrixXcd position_matrix(int D, double hbar);
Eigen::MatrixXcd momentum_matrix(int D, double hbar);

/// x^m p^n -> 2^{-m} sum_k C(m,k) X^k P^n X^{m-k}. The products are formed at size D + degree and
/// cropped, so every entry of the result is exact up to roundoff. M = 1, ambient basis.
OperatorMatrix weyl_matrix(const PhasePoly& f, int D, double hbar);
/// sum_k hbar^k weyl_matrix(F_k).
OperatorMatrix weyl_matrix(const HbarSeries& F, int D, double hbar);

/// All eigenvalues in ascending order. Throws on a non-Hermitian matrix or when an eigenpair
/// misses the residual bound 1e-10 ||A||.
std::vector<double> eigenvalues(const OperatorMatrix& A);

struct OracleLevel {
    int n = 0;
    double E = 0;
    double E_doubled = 0;  // same level at truncation 2D
    bool converged = false;
};

/// Levels 0..n_max at truncation D, each compared against truncation 2D. A level is converged
/// when |E_D - E_2D| < 1e-8 max(|E_2D|, hbar).
std::vector<OracleLevel> converged_levels(const HbarSeries& H, int D, double hbar, int n_max);

struct ComparisonRow {
    double hbar = 0;
    int n = 0;
    double E_ebk = 0;
    double E_oracle = 0;
    double diff = 0;
};

/// Least-squares line through (log hbar, log max_n diff).
struct HbarFit {
    double slope = 0;
    double intercept = 0;
    int points = 0;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;            // converged levels only
    std::vector<std::pair<double, int>> dropped;  // (hbar, n) of unconverged levels
    std::vector<double> max_diff;               // per hbar, in the order given
    /// Diffs at or below this floor are indistinguishable from roundoff.
    std::vector<double> noise_floor;
    std::optional<HbarFit> fit;  // absent when fewer than two hbar values rise above the floor
};

/// EBK energies of `rule` against the oracle spectrum of the Weyl operator of H. Throws when no
/// level up to n_max converges at some hbar.
ComparisonReport compare(const EBKRule& rule, const HbarSeries& H, int D, const std::vector<double>& hbars, int n_max,
                         bool fit = true);

/// Interior block max |A_rc - B_rc| over r, c < D - margin, divided by max(1, max |entry|).
double interior_difference(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, int margin = 4);

}  // namespace sdq
