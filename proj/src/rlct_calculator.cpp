#include "rlct/rlct_calculator.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "rlct/error.hpp"

namespace rlct {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw DomainError("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

std::string Rational::str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
}

std::ostream& operator<<(std::ostream& os, const Rational& q) { return os << q.str(); }

const char* to_string(RlctSource source) {
    switch (source) {
        case RlctSource::ClosedForm: return "closed-form";
        case RlctSource::Enumerated: return "enumerated";
        case RlctSource::Combinator: return "combinator";
    }
    return "unknown";
}

RlctValue::RlctValue(Rational lambda, RlctSource source) : lambda_(lambda), source_(source) {
    if (lambda_ <= Rational(0)) throw DomainError("RlctValue: lambda must be > 0, got " + lambda_.str());
    if (4 % lambda_.den() != 0) throw DomainError("RlctValue: denominator must divide 4, got " + lambda_.str());
}

ModelSignature::ModelSignature(int dim, int components, int true_components)
    : M(dim), H(components), r(true_components) {
    if (M < 1) throw DomainError("ModelSignature: M must be >= 1");
    if (H < 1) throw DomainError("ModelSignature: H must be >= 1");
    if (r < 1) throw DomainError("ModelSignature: r must be >= 1");
    if (r > H) throw DomainError("ModelSignature: r > H, the model cannot realize the truth");
}

int PartitionShape::total() const { return std::accumulate(sizes.begin(), sizes.end(), 0); }

int PartitionShape::true_mass() const {
    return std::accumulate(sizes.begin(), sizes.begin() + std::min<std::ptrdiff_t>(r, groups()), 0);
}

int PartitionShape::ghost_mass() const { return total() - true_mass(); }

void PartitionShape::validate() const {
    if (r < 1) throw DomainError("PartitionShape: r must be >= 1");
    if (groups() < r) throw DomainError("PartitionShape: fewer groups than true components");
    for (int s : sizes) {
        if (s < 1) throw DomainError("PartitionShape: every group needs at least one component");
    }
}

namespace {

void check_regular_bound(const RlctValue& value, const ModelSignature& sig) {
    if (value.lambda() > regular_reference(sig).lambda())
        throw DomainError("lambda exceeds d/2 for this signature");
}

// Ghost sizes: partitions of `remaining` into parts <= cap, nonincreasing.
void ghost_partitions(int remaining, int cap, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    if (remaining == 0) {
        out.push_back(current);
        return;
    }
    for (int part = std::min(remaining, cap); part >= 1; --part) {
        current.push_back(part);
        ghost_partitions(remaining - part, part, current, out);
        current.pop_back();
    }
}

// True sizes: compositions of `remaining` into `slots` ordered parts >= 1.
void true_compositions(int remaining, int slots, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    if (slots == 0) {
        if (remaining == 0) out.push_back(current);
        return;
    }
    for (int part = remaining - (slots - 1); part >= 1; --part) {
        current.push_back(part);
        true_compositions(remaining - part, slots - 1, current, out);
        current.pop_back();
    }
}

}  // namespace

RlctValue rlct_closed_form(const ModelSignature& sig) {
    const RlctValue value = sig.M == 1 ? RlctValue(Rational(3 * sig.r + sig.H - 2, 4), RlctSource::ClosedForm)
                                       : RlctValue(Rational(sig.M * sig.r + sig.H - 1, 2), RlctSource::ClosedForm);
    check_regular_bound(value, sig);
    return value;
}

RlctValue local_lambda(const PartitionShape& shape, int dim) {
    shape.validate();
    if (dim < 1) throw DomainError("local_lambda: M must be >= 1");
    if (dim > 1) return RlctValue(Rational(dim * shape.r + shape.total() - 1, 2), RlctSource::Enumerated);
    // In quarters: 4r - 2 + (S - r) + 2G.
    return RlctValue(Rational(3 * shape.r - 2 + shape.true_mass() + 2 * shape.ghost_mass(), 4),
                     RlctSource::Enumerated);
}

EnumerationResult rlct_enumerate(const ModelSignature& sig) {
    if (sig.H > kEnumerationBudget)
        throw BudgetExceeded("rlct_enumerate: H = " + std::to_string(sig.H) + " exceeds the budget of " +
                             std::to_string(kEnumerationBudget));
    std::vector<EnumerationRow> rows;
    for (int true_mass = sig.H; true_mass >= sig.r; --true_mass) {
        std::vector<std::vector<int>> trues;
        std::vector<int> scratch;
        true_compositions(true_mass, sig.r, scratch, trues);
        std::vector<std::vector<int>> ghosts;
        scratch.clear();
        ghost_partitions(sig.H - true_mass, sig.H - true_mass, scratch, ghosts);
        for (const auto& t : trues) {
            for (const auto& g : ghosts) {
                PartitionShape shape{sig.r, t};
                shape.sizes.insert(shape.sizes.end(), g.begin(), g.end());
                rows.push_back({shape, local_lambda(shape, sig.M)});
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].lambda.lambda() < rows[best].lambda.lambda()) best = i;
    }
    RlctValue minimum = rows[best].lambda;
    check_regular_bound(minimum, sig);
    return EnumerationResult{minimum, rows[best].shape, std::move(rows)};
}

RlctValue combine_sum(const RlctValue& a, const RlctValue& b) {
    return RlctValue(a.lambda() + b.lambda(), RlctSource::Combinator);
}

RlctValue combine_product(const RlctValue& a, const RlctValue& b) {
    return RlctValue(std::min(a.lambda(), b.lambda()), RlctSource::Combinator);
}

RlctValue regular_reference(const ModelSignature& sig) {
    return RlctValue(Rational(sig.parameter_count(), 2), RlctSource::ClosedForm);
}

}  // namespace rlct
