#include "rlct/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

namespace rlct {

namespace {

constexpr std::size_t kLogFactorialTable = 1024;

const std::array<double, kLogFactorialTable>& log_factorial_table() {
    static const auto table = [] {
        std::array<double, kLogFactorialTable> t{};
        t[0] = 0.0;
        for (std::size_t k = 1; k < t.size(); ++k) t[k] = t[k - 1] + std::log(static_cast<double>(k));
        return t;
    }();
    return table;
}

}  // namespace

double log_factorial(std::int64_t k) {
    if (k < 0) return std::numeric_limits<double>::quiet_NaN();
    if (static_cast<std::size_t>(k) < kLogFactorialTable) return log_factorial_table()[static_cast<std::size_t>(k)];
    return boost::math::lgamma(static_cast<double>(k) + 1.0);
}

double poisson_upper_tail(std::int64_t k, double rate) {
    if (k < 0) return 1.0;
    // P(X > k) = P(X >= k + 1) = regularized lower incomplete gamma P(k + 1, rate).
    return boost::math::gamma_p(static_cast<double>(k) + 1.0, rate);
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    const double hi = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - hi);
    return hi + std::log(acc);
}

double expm1_minus_identity(double d) {
    if (std::abs(d) < 1e-3) {
        const double d2 = d * d;
        return d2 * (0.5 + d * (1.0 / 6.0 + d * (1.0 / 24.0 + d * (1.0 / 120.0 + d / 720.0))));
    }
    return std::expm1(d) - d;
}

}  // namespace rlct
