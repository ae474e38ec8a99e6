#pragma once

#include <cstdint>
#include <span>

namespace rlct {

/// log(k!) from a precomputed table, falling back to lgamma for large k.
/// Thread-safe (std::lgamma may write the global signgam).
double log_factorial(std::int64_t k);

/// P(X > k) for X ~ Poisson(rate).
double poisson_upper_tail(std::int64_t k, double rate);

/// log(sum(exp(values))); -inf for an empty range or all -inf.
double log_sum_exp(std::span<const double> values);

/// expm1(d) - d, accurate for small |d|. This is t - log1p(t) with t = expm1(d).
double expm1_minus_identity(double d);

}  // namespace rlct
