#include "doctest.h"

#include <cmath>
#include <vector>

#include "rlct/error.hpp"
#include "rlct/random.hpp"
#include "rlct/symmetric_polynomials.hpp"

using namespace rlct;

TEST_CASE("elementary symmetric coefficients") {
    const std::vector<double> b{1.0, 2.0, 3.0};
    const auto c = elem_sym_coeffs(b);
    CHECK(c.coeffs == std::vector<double>{1.0, 6.0, 11.0, 6.0});
    CHECK(c.degree() == 3);
    // prod (t + b_i) vanishes at t = -b_i
    for (double v : b) CHECK(c.evaluate(-v) == doctest::Approx(0.0));
    CHECK_THROWS_AS(elem_sym_coeffs(std::vector<double>{}), DomainError);
}

TEST_CASE("annihilation identity") {
    SUBCASE("H = 3, n = 7") {
        const std::vector<double> a{0.7, -1.3, 1.9}, b{-1.5, 0.4, 1.8};
        const auto res = annihilation_check(a, b, 7);
        CHECK(std::abs(res.residual) <= 1e-9 * res.scale);
    }
    SUBCASE("zero weights give an exact zero") {
        const std::vector<double> a{0.0, 0.0}, b{1.2, 2.5};
        CHECK(annihilation_check(a, b, 5).residual == 0.0);
    }
    SUBCASE("n must exceed H") {
        const std::vector<double> a{1.0, 1.0}, b{1.0, 2.0};
        CHECK_THROWS_AS(annihilation_check(a, b, 2), DomainError);
    }
}

TEST_CASE("F recursion") {
    const std::vector<double> b{1.0, 2.0};
    SUBCASE("Kronecker rows up to H") {
        CHECK(f_coeffs(b, 1) == std::vector<double>{1.0, 0.0});
        CHECK(f_coeffs(b, 2) == std::vector<double>{0.0, 1.0});
    }
    SUBCASE("t^3 = 3 t^2 - 2 t modulo (t - 1)(t - 2)") {
        CHECK(f_coeffs(b, 3) == std::vector<double>{-2.0, 3.0});
        CHECK(f_coeffs(b, 4) == std::vector<double>{-6.0, 7.0});
    }
    SUBCASE("reconstruction for random weights") {
        RandomStream rng(3);
        const std::vector<double> bb{0.3, 1.7, 2.2, 2.9};
        const FTable table(bb, 20);
        for (int n = 1; n <= 20; ++n) {
            const auto row = table.row(n);
            for (double v : row) CHECK(std::abs(v) < std::pow(table.growth_bound(), n));
            std::vector<double> a(4);
            for (auto& v : a) v = rng.uniform() * 2 - 1;
            double lhs = 0.0, rhs = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < 4; ++i) lhs += a[i] * std::pow(bb[i], n);
            for (int i = 1; i <= 4; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < 4; ++j) s += a[j] * std::pow(bb[j], i);
                rhs += row[static_cast<std::size_t>(i - 1)] * s;
                scale += std::abs(row[static_cast<std::size_t>(i - 1)] * s);
            }
            CHECK(std::abs(lhs - rhs) <= 1e-12 * (scale + std::abs(lhs)));
        }
    }
    SUBCASE("invalid requests") {
        CHECK_THROWS_AS(f_coeffs(b, 0), DomainError);
        const FTable table(b, 5);
        CHECK_THROWS_AS(table.row(6), DomainError);
    }
}

TEST_CASE("multidimensional F") {
    const std::vector<std::vector<double>> b{{1.0, 0.5}, {2.0, 1.5}};
    SUBCASE("small exponents reduce to a single delta") {
        const std::vector<int> n{1, 2};
        const auto f = f_coeffs_multi(b, n);
        REQUIRE(f.size() == 1);
        CHECK(f.begin()->first == MultiIndex{1, 2});
        CHECK(f.begin()->second == 1.0);
    }
    SUBCASE("n = (4, 3) reconstruction") {
        const std::vector<int> n{4, 3};
        const std::vector<double> a{0.8, -0.35};
        double lhs = 0.0;
        for (std::size_t i = 0; i < 2; ++i) lhs += a[i] * std::pow(b[i][0], 4) * std::pow(b[i][1], 3);
        double rhs = 0.0;
        for (const auto& [r, c] : f_coeffs_multi(b, n)) {
            double s = 0.0;
            for (std::size_t j = 0; j < 2; ++j) s += a[j] * std::pow(b[j][0], r[0]) * std::pow(b[j][1], r[1]);
            rhs += c * s;
        }
        CHECK(rhs == doctest::Approx(lhs).epsilon(1e-12));
    }
    SUBCASE("entries are products of column coefficients") {
        const std::vector<int> n{3, 4};
        const auto f0 = f_coeffs(std::vector<double>{1.0, 2.0}, 3);
        const auto f1 = f_coeffs(std::vector<double>{0.5, 1.5}, 4);
        for (const auto& [r, c] : f_coeffs_multi(b, n))
            CHECK(c == doctest::Approx(f0[static_cast<std::size_t>(r[0] - 1)] * f1[static_cast<std::size_t>(r[1] - 1)]));
    }
}
