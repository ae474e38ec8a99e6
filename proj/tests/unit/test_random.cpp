#include "doctest.h"

#include <cmath>
#include <vector>

#include "rlct/error.hpp"
#include "rlct/random.hpp"

using namespace rlct;

TEST_CASE("philox known-answer vectors") {
    using W = std::array<std::uint32_t, 4>;
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    RandomStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
        CHECK(x != d());
    }
}

TEST_CASE("uniform ranges") {
    RandomStream rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        const double v = rng.uniform_open();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

namespace {

template <class F>
std::pair<double, double> moments(F draw, int n) {
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = draw();
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    return {mean, s2 / n - mean * mean};
}

}  // namespace

TEST_CASE("variate moments") {
    RandomStream rng(11);
    constexpr int n = 200000;
    SUBCASE("normal") {
        auto [m, v] = moments([&] { return rng.normal(); }, n);
        CHECK(std::abs(m) < 0.01);
        CHECK(std::abs(v - 1.0) < 0.02);
    }
    SUBCASE("gamma") {
        for (double shape : {0.3, 1.0, 2.5, 40.0}) {
            auto [m, v] = moments([&] { return rng.gamma(shape); }, n);
            CHECK(m == doctest::Approx(shape).epsilon(0.02));
            CHECK(v == doctest::Approx(shape).epsilon(0.05));
        }
    }
    SUBCASE("poisson below and above the inversion cutoff") {
        for (double rate : {0.05, 2.0, 17.0, 45.0, 400.0}) {
            auto [m, v] = moments([&] { return static_cast<double>(rng.poisson(rate)); }, n);
            CHECK(m == doctest::Approx(rate).epsilon(0.02));
            CHECK(v == doctest::Approx(rate).epsilon(0.05));
        }
    }
}

TEST_CASE("categorical frequencies") {
    RandomStream rng(5);
    const std::vector<double> w{0.1, 0.0, 0.6, 0.3};
    std::vector<int> counts(4, 0);
    for (int i = 0; i < 100000; ++i) ++counts[rng.categorical(w)];
    CHECK(counts[1] == 0);
    CHECK(counts[0] / 1e5 == doctest::Approx(0.1).epsilon(0.05));
    CHECK(counts[2] / 1e5 == doctest::Approx(0.6).epsilon(0.02));
}

TEST_CASE("invalid variate parameters") {
    RandomStream rng(1);
    CHECK_THROWS_AS(rng.gamma(0.0), DomainError);
    CHECK_THROWS_AS(rng.poisson(-1.0), DomainError);
}

TEST_CASE("mix64 spreads nearby inputs") {
    CHECK(mix64(0) != mix64(1));
    CHECK(mix64(1) != 1);
}
