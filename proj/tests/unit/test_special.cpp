#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "rlct/special.hpp"

using namespace rlct;

TEST_CASE("log_factorial table and fallback agree with lgamma") {
    for (std::int64_t k : {0, 1, 2, 10, 1023, 1024, 5000}) {
        CHECK(log_factorial(k) == doctest::Approx(std::lgamma(static_cast<double>(k) + 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("poisson upper tail") {
    // P(X > 0) = 1 - e^{-b}
    CHECK(poisson_upper_tail(0, 2.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
    CHECK(poisson_upper_tail(-1, 2.0) == 1.0);
    CHECK(poisson_upper_tail(40, 2.0) < 1e-30);
}

TEST_CASE("log_sum_exp") {
    const std::vector<double> v{std::log(0.25), std::log(0.75)};
    CHECK(log_sum_exp(v) == doctest::Approx(0.0));
    const std::vector<double> big{1000.0, 1000.0};
    CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(log_sum_exp({}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("expm1_minus_identity is accurate on both sides of the series cutoff") {
    for (double d : {1e-8, -1e-8, 9.9e-4, 1.1e-3, -0.5, 2.0}) {
        long double exact = 0.0L, term = d;
        for (int k = 2; k < 40; ++k) exact += (term *= static_cast<long double>(d) / k);
        CHECK(expm1_minus_identity(d) == doctest::Approx(static_cast<double>(exact)).epsilon(1e-12));
        CHECK(expm1_minus_identity(d) >= 0.0);
    }
    CHECK(expm1_minus_identity(0.0) == 0.0);
}
