#include "rlct/symmetric_polynomials.hpp"

#include <cmath>

#include "rlct/error.hpp"

namespace rlct {

double SymCoeffs::evaluate(double t) const {
    double acc = 0.0;
    for (double c : coeffs) acc = acc * t + c;
    return acc;
}

SymCoeffs elem_sym_coeffs(std::span<const double> b) {
    if (b.empty()) throw DomainError("elem_sym_coeffs: need at least one base point");
    // Multiply by (t + b_i) one factor at a time.
    std::vector<double> c{1.0};
    for (double bi : b) {
        c.push_back(0.0);
        for (std::size_t r = c.size() - 1; r > 0; --r) c[r] += bi * c[r - 1];
    }
    return SymCoeffs{std::vector<double>(b.begin(), b.end()), std::move(c)};
}

AnnihilationResult annihilation_check(std::span<const double> a, std::span<const double> b, int n) {
    if (a.size() != b.size()) throw DomainError("annihilation_check: a and b must have equal length");
    const int h = static_cast<int>(b.size());
    if (n <= h) throw DomainError("annihilation_check: requires n > H");
    const SymCoeffs c = elem_sym_coeffs(b);
    AnnihilationResult out;
    for (int r = 0; r <= h; ++r) {
        double moment = 0.0;
        double moment_abs = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double term = a[i] * std::pow(b[i], n - r);
            moment += term;
            moment_abs += std::abs(term);
        }
        const double sign = (r % 2 == 0) ? 1.0 : -1.0;
        out.residual += sign * c.coeffs[static_cast<std::size_t>(r)] * moment;
        out.scale += std::abs(c.coeffs[static_cast<std::size_t>(r)]) * moment_abs;
    }
    return out;
}

FTable::FTable(std::span<const double> b, int max_n) : base_(b.begin(), b.end()), max_n_(max_n) {
    if (base_.empty()) throw DomainError("FTable: need at least one base point");
    if (max_n < 1) throw DomainError("FTable: n must be >= 1");
    const std::size_t h = base_.size();
    const SymCoeffs c = elem_sym_coeffs(base_);
    table_.assign(static_cast<std::size_t>(max_n) * h, 0.0);
    for (int n = 1; n <= max_n; ++n) {
        double* dst = &table_[static_cast<std::size_t>(n - 1) * h];
        if (static_cast<std::size_t>(n) <= h) {
            dst[n - 1] = 1.0;
            continue;
        }
        for (std::size_t r = 1; r <= h; ++r) {
            const double coef = ((r % 2 == 1) ? 1.0 : -1.0) * c.coeffs[r];
            const double* src = &table_[(static_cast<std::size_t>(n) - r - 1) * h];
            for (std::size_t i = 0; i < h; ++i) dst[i] += coef * src[i];
        }
    }
}

std::span<const double> FTable::row(int n) const {
    if (n < 1 || n > max_n_) throw DomainError("FTable::row: n out of range");
    return {&table_[static_cast<std::size_t>(n - 1) * base_.size()], base_.size()};
}

double FTable::growth_bound() const {
    double prod = 1.0;
    for (double bi : base_) prod *= 1.0 + std::abs(bi);
    return static_cast<double>(base_.size()) * prod;
}

std::vector<double> f_coeffs(std::span<const double> b, int n) {
    const FTable table(b, n);
    const auto row = table.row(n);
    return {row.begin(), row.end()};
}

std::map<MultiIndex, double> f_coeffs_multi(const std::vector<std::vector<double>>& b, std::span<const int> n) {
    if (b.empty()) throw DomainError("f_coeffs_multi: need at least one component");
    const std::size_t dim = n.size();
    if (dim == 0) throw DomainError("f_coeffs_multi: empty multi-index");
    for (const auto& row : b) {
        if (row.size() != dim) throw DomainError("f_coeffs_multi: rate rows must have M = |n| columns");
    }

    // Nonzero entries of each column's F row.
    std::vector<std::vector<std::pair<int, double>>> columns(dim);
    for (std::size_t m = 0; m < dim; ++m) {
        if (n[m] < 1) throw DomainError("f_coeffs_multi: every n_m must be >= 1");
        std::vector<double> col;
        col.reserve(b.size());
        for (const auto& row : b) col.push_back(row[m]);
        const auto f = f_coeffs(col, n[m]);
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i] != 0.0) columns[m].emplace_back(static_cast<int>(i + 1), f[i]);
        }
    }

    std::map<MultiIndex, double> out;
    MultiIndex r(dim);
    auto expand = [&](auto&& self, std::size_t m, double value) -> void {
        if (m == dim) {
            out.emplace(r, value);
            return;
        }
        for (const auto& [index, f] : columns[m]) {
            r[m] = index;
            self(self, m + 1, value * f);
        }
    };
    expand(expand, 0, 1.0);
    return out;
}

}  // namespace rlct
