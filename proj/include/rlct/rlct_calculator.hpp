#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rlct {

/// Exact rational number in lowest terms with positive denominator.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& q);

enum class RlctSource { ClosedForm, Enumerated, Combinator };

const char* to_string(RlctSource source);

/// A learning coefficient: positive, denominator in {1, 2, 4}.
class RlctValue {
public:
    RlctValue(Rational lambda, RlctSource source);

    const Rational& lambda() const { return lambda_; }
    RlctSource source() const { return source_; }
    double to_double() const { return lambda_.to_double(); }

    /// Value equality; the source tag is provenance, not part of the number.
    friend bool operator==(const RlctValue& a, const RlctValue& b) { return a.lambda_ == b.lambda_; }

private:
    Rational lambda_;
    RlctSource source_;
};

/// (M, H, r): data dimension, model components, true components.
struct ModelSignature {
    int M;
    int H;
    int r;

    /// Throws DomainError unless M >= 1, H >= 1 and 1 <= r <= H.
    ModelSignature(int dim, int components, int true_components);

    /// d = H - 1 + H M, the parameter count of the mixture.
    int parameter_count() const { return H - 1 + H * M; }
    friend bool operator==(const ModelSignature&, const ModelSignature&) = default;
};

/// Component collapse pattern near a point of the realizing set: sizes[j] model
/// components sit on true component j for j < r, and on ghost center j for
/// j >= r (those carry zero weight).
struct PartitionShape {
    int r = 1;
    std::vector<int> sizes;

    int total() const;
    int true_mass() const;   // sum_{j < r} sizes[j]
    int ghost_mass() const;  // sum_{j >= r} sizes[j]
    int groups() const { return static_cast<int>(sizes.size()); }
    /// Throws DomainError unless every size >= 1 and there are at least r groups.
    void validate() const;
    friend bool operator==(const PartitionShape&, const PartitionShape&) = default;
};

RlctValue rlct_closed_form(const ModelSignature& sig);

/// Local lower bound at a point with collapse pattern `shape`:
/// M = 1: r - 1/2 + (sum_{j<=r} H_j - r)/4 + (sum_{j>r} H_j)/2;
/// M > 1: (M r + H - 1)/2, independent of the pattern.
RlctValue local_lambda(const PartitionShape& shape, int dim);

struct EnumerationRow {
    PartitionShape shape;
    RlctValue lambda;
};

struct EnumerationResult {
    RlctValue minimum;
    PartitionShape argmin;
    std::vector<EnumerationRow> rows;
};

/// Largest H the partition enumeration accepts.
constexpr int kEnumerationBudget = 12;

/// Minimum of local_lambda over every pattern with H_j >= 1 for the true
/// groups, sum H_j = H, ghost groups unordered (nonincreasing sizes).
/// Throws BudgetExceeded for H > kEnumerationBudget.
EnumerationResult rlct_enumerate(const ModelSignature& sig);

RlctValue combine_sum(const RlctValue& a, const RlctValue& b);
RlctValue combine_product(const RlctValue& a, const RlctValue& b);

/// d / 2 = (H - 1 + H M) / 2, the regular-model coefficient.
RlctValue regular_reference(const ModelSignature& sig);

}  // namespace rlct
