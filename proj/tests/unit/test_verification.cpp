#include "doctest.h"

#include "rlct/verification.hpp"

using namespace rlct;

namespace {

void require_pass(const SuiteReport& rep) {
    for (const auto& c : rep.checks) {
        INFO(rep.suite << "/" << c.name << " worst " << c.worst << " threshold " << c.threshold);
        CHECK(c.passed());
    }
    CHECK(rep.passed());
}

}  // namespace

TEST_CASE("polynomial identities") {
    const auto rep = verify_polynomials(1, 100);
    CHECK(rep.suite == "polynomials");
    CHECK(rep.checks.size() >= 3);
    require_pass(rep);
}

TEST_CASE("variety predicates") {
    const auto rep = verify_variety(kDefaultVerifySeed, 200);
    require_pass(rep);
    for (const auto& c : rep.checks) CHECK(c.instances > 0);
}

TEST_CASE("ratio probes") {
    const auto rep = verify_ratio(kDefaultVerifySeed, 5, 20);
    require_pass(rep);
    CHECK(rep.probes.size() == 3 * 5 * 2);
    for (const auto& p : rep.probes) {
        CHECK(p.min_ratio > 0.0);
        CHECK(p.spread_growth < kMaxSpreadGrowth);
    }
}

TEST_CASE("suites are reproducible") {
    const auto a = verify_polynomials(5, 30);
    const auto b = verify_polynomials(5, 30);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) CHECK(a.checks[i].worst == b.checks[i].worst);
}

TEST_CASE("empty checks do not pass") {
    SuiteCheck c;
    CHECK_FALSE(c.passed());
    c.instances = 1;
    CHECK(c.passed());
    c.failures = 1;
    CHECK_FALSE(c.passed());
}
