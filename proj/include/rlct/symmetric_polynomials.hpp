#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace rlct {

/// Coefficients of prod_i (t + b_i) in descending powers of t:
/// coeffs[r] multiplies t^(H - r), so coeffs[0] = 1 and coeffs[H] = prod b_i.
struct SymCoeffs {
    std::vector<double> base;
    std::vector<double> coeffs;

    std::size_t degree() const { return base.size(); }
    /// Evaluates sum_r coeffs[r] t^(H - r) by Horner's rule.
    double evaluate(double t) const;
};

SymCoeffs elem_sym_coeffs(std::span<const double> b);

/// sum_{r=0}^{H} (-1)^r C_r (sum_i a_i b_i^(n-r)); zero in exact arithmetic for n > H.
struct AnnihilationResult {
    double residual = 0.0;
    /// sum_r |C_r| sum_i |a_i| |b_i|^(n-r); the contract is |residual| <= 1e-9 * scale.
    double scale = 0.0;
};

AnnihilationResult annihilation_check(std::span<const double> a, std::span<const double> b, int n);

/// Reconstruction coefficients F_i^(n), i in [1:H], such that
/// sum_i a_i b_i^n = sum_i F_i^(n) (sum_j a_j b_j^i) for every a.
///
/// Built bottom-up: F^(n) is the Kronecker row for n <= H and
/// F^(n) = sum_{r=1}^{H} (-1)^(r+1) C_r F^(n-r) beyond. Immutable once built.
class FTable {
public:
    FTable(std::span<const double> b, int max_n);

    std::size_t components() const { return base_.size(); }
    int max_n() const { return max_n_; }
    const std::vector<double>& base() const { return base_; }
    /// Row F^(n) (index i - 1 holds F_i^(n)); 1 <= n <= max_n.
    std::span<const double> row(int n) const;
    /// R = H prod_i (1 + |b_i|); every entry satisfies |F_i^(n)| < R^n.
    double growth_bound() const;

private:
    std::vector<double> base_;
    int max_n_;
    std::vector<double> table_;  // row-major, (max_n) x H
};

std::vector<double> f_coeffs(std::span<const double> b, int n);

/// Multi-index r in [1:H]^M (1-based, as the reconstruction sums over it).
using MultiIndex = std::vector<int>;

/// F_r^(n) = prod_m F_{r_m}^(n_m)(b_{.m}), stored sparsely: only nonzero
/// products appear. For n_m <= H each column contributes a single delta.
///
/// b is H rows of M columns; n has M entries, each >= 1.
std::map<MultiIndex, double> f_coeffs_multi(const std::vector<std::vector<double>>& b, std::span<const int> n);

}  // namespace rlct
