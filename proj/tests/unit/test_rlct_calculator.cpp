#include "doctest.h"

#include "rlct/error.hpp"
#include "rlct/random.hpp"
#include "rlct/rlct_calculator.hpp"

using namespace rlct;

namespace {

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }
RlctValue v(std::int64_t n, std::int64_t d = 1) { return RlctValue(q(n, d), RlctSource::Combinator); }

}  // namespace

TEST_CASE("rationals") {
    CHECK(q(6, 8) == q(3, 4));
    CHECK(q(-2, -4) == q(1, 2));
    CHECK(q(3, 4) + q(7, 4) == q(5, 2));
    CHECK(q(1, 2) < q(3, 4));
    CHECK(q(7, 4).str() == "7/4");
    CHECK(q(2).str() == "2");
    CHECK_THROWS_AS(Rational(1, 0), DomainError);
}

TEST_CASE("value invariants") {
    CHECK_THROWS_AS(v(0), DomainError);
    CHECK_THROWS_AS(RlctValue(q(1, 3), RlctSource::ClosedForm), DomainError);
    CHECK_THROWS_AS(ModelSignature(1, 1, 2), DomainError);
    CHECK_THROWS_AS(ModelSignature(0, 1, 1), DomainError);
    CHECK(ModelSignature(2, 3, 1).parameter_count() == 2 + 6);
}

TEST_CASE("closed form") {
    CHECK(rlct_closed_form({1, 2, 1}).lambda() == q(3, 4));
    CHECK(rlct_closed_form({1, 3, 2}).lambda() == q(7, 4));
    CHECK(rlct_closed_form({2, 4, 2}).lambda() == q(7, 2));
    CHECK(rlct_closed_form({2, 2, 1}).lambda() == q(3, 2));
    CHECK(rlct_closed_form({1, 5, 5}).lambda() == q(9, 2));
    CHECK(rlct_closed_form({1, 2, 1}).source() == RlctSource::ClosedForm);
}

TEST_CASE("grid properties") {
    for (int M = 1; M <= 3; ++M) {
        for (int H = 1; H <= 8; ++H) {
            for (int r = 1; r <= H; ++r) {
                const auto lam = rlct_closed_form({M, H, r}).lambda();
                const auto reg = regular_reference({M, H, r}).lambda();
                CHECK(lam <= reg);
                if (H == r) CHECK(lam == reg);
                if (H > r) CHECK(lam < reg);
                if (H > 1 && r < H) CHECK(rlct_closed_form({M, H - 1, r}).lambda() <= lam);
                if (r > 1) CHECK(rlct_closed_form({M, H, r - 1}).lambda() <= lam);
            }
        }
    }
}

TEST_CASE("local lambda") {
    CHECK(local_lambda({2, {1, 1}}, 1).lambda() == q(3, 2));
    CHECK(local_lambda({1, {5}}, 1).lambda() == q(6, 4));
    CHECK(local_lambda({2, {2, 1, 1}}, 1).lambda() == q(9, 4));
    CHECK(local_lambda({2, {2, 1, 1}}, 3).lambda() == q(3 * 2 + 4 - 1, 2));
    CHECK_THROWS_AS(local_lambda({2, {2}}, 1), DomainError);
    CHECK_THROWS_AS(local_lambda({1, {2, 0}}, 1), DomainError);
}

TEST_CASE("enumeration oracle") {
    SUBCASE("M=1, H=4, r=2") {
        const auto res = rlct_enumerate({1, 4, 2});
        CHECK(res.minimum.lambda() == q(2));
        CHECK(res.argmin.ghost_mass() == 0);
        CHECK(res.minimum.source() == RlctSource::Enumerated);
        bool saw_ghost = false;
        for (const auto& row : res.rows) {
            if (row.shape.sizes == std::vector<int>{1, 1, 2}) saw_ghost = true;
            CHECK(res.minimum.lambda() <= row.lambda.lambda());
        }
        CHECK(saw_ghost);
    }
    SUBCASE("H = r has a single partition") {
        const auto res = rlct_enumerate({1, 3, 3});
        CHECK(res.rows.size() == 1);
        CHECK(res.minimum == rlct_closed_form({1, 3, 3}));
    }
    SUBCASE("M >= 2 is partition independent") {
        const auto res = rlct_enumerate({2, 5, 2});
        for (const auto& row : res.rows) CHECK(row.lambda == res.minimum);
    }
    SUBCASE("budget") {
        CHECK_NOTHROW(rlct_enumerate({1, 12, 1}));
        CHECK_THROWS_AS(rlct_enumerate({1, 13, 1}), BudgetExceeded);
    }
}

TEST_CASE("combinators") {
    CHECK(combine_sum(v(1, 2), v(1, 2)).lambda() == q(1));
    CHECK(combine_sum(v(3, 4), v(7, 4)).lambda() == q(5, 2));
    CHECK(combine_product(v(1, 2), v(2)).lambda() == q(1, 2));
    CHECK(combine_product(v(3, 4), v(3, 4)).lambda() == q(3, 4));
    RandomStream rng(2);
    for (int i = 0; i < 50; ++i) {
        const auto a = v(1 + static_cast<int>(rng.uniform() * 20), 4);
        const auto b = v(1 + static_cast<int>(rng.uniform() * 20), 4);
        const auto c = v(1 + static_cast<int>(rng.uniform() * 20), 4);
        CHECK(combine_product(a, b) == combine_product(b, a));
        CHECK(combine_product(combine_product(a, b), c) == combine_product(a, combine_product(b, c)));
        CHECK(combine_sum(a, b) == combine_sum(b, a));
    }
}

TEST_CASE("regular reference") {
    CHECK(regular_reference({1, 2, 1}).lambda() == q(3, 2));
    CHECK(regular_reference({3, 2, 1}).lambda() == q(7, 2));
}
