#include <cmath>

#include "doctest.h"

#include "rlct/error.hpp"
#include "rlct/poisson_model.hpp"
#include "rlct/vandermonde_singularity.hpp"

using namespace rlct;

namespace {

MixtureParams mix(std::vector<double> w, std::vector<std::vector<double>> b) {
    return MixtureParams::from_rows(std::move(w), b);
}

TrueModel truth(std::vector<double> w, std::vector<std::vector<double>> b) { return TrueModel(mix(std::move(w), b)); }

}  // namespace

TEST_CASE("h function by hand") {
    CHECK(h_function(VandermondeInstance(mix({1.0}, {{2.0}}), truth({1.0}, {{1.0}}))) == doctest::Approx(1.0));
    // x = 0, 1 cancel; x = 2 leaves 0.5 + 4.5 - 4.
    const VandermondeInstance inst(mix({0.5, 0.5}, {{1.0}, {3.0}}), truth({1.0}, {{2.0}}));
    CHECK(inst.max_exponent() == 2);
    CHECK(h_function(inst) == doctest::Approx(1.0));
    CHECK(vandermonde_form(inst.model(), inst.truth(), 1) == doctest::Approx(0.0));

    // 2-D box [0:1]^2: b^x = 1, 2, 3, 6 against 1.
    CHECK(h_function(VandermondeInstance(mix({1.0}, {{2.0, 3.0}}), truth({1.0}, {{1.0, 1.0}}))) ==
          doctest::Approx(0 + 1 + 4 + 25));
}

TEST_CASE("instance checks dimensions") {
    CHECK_THROWS_AS(VandermondeInstance(mix({1.0}, {{2.0, 1.0}}), truth({1.0}, {{1.0}})), DomainError);
    CHECK_THROWS_AS(VandermondeInstance(mix({1.0}, {{2.0}}), truth({0.5, 0.5}, {{1.0}, {2.0}})), DomainError);
}

TEST_CASE("membership") {
    const auto q = truth({0.4, 0.6}, {{1.0}, {3.0}});
    SUBCASE("split true component") {
        const auto res = variety_membership(VandermondeInstance(mix({0.1, 0.3, 0.6}, {{1.0}, {1.0}, {3.0}}), q));
        CHECK(res.member);
        CHECK(res.inv.inv.size() == 2);
        CHECK(res.inv.inv[0] == std::vector<std::size_t>{0, 1});
        CHECK(res.inv.inv[1] == std::vector<std::size_t>{2});
        CHECK(res.inv.inv0.empty());
    }
    SUBCASE("zero-weight ghost") {
        const auto res = variety_membership(VandermondeInstance(mix({0.4, 0.6, 0.0}, {{1.0}, {3.0}, {7.0}}), q));
        CHECK(res.member);
        CHECK(res.inv.inv0 == std::vector<std::size_t>{2});
    }
    SUBCASE("weighted ghost") {
        const auto res = variety_membership(VandermondeInstance(mix({0.3, 0.6, 0.1}, {{1.0}, {3.0}, {7.0}}), q));
        CHECK_FALSE(res.member);
        bool ghost = false;
        for (const auto& v : res.violations) ghost = ghost || v.kind == MembershipViolation::Kind::GhostWeight;
        CHECK(ghost);
    }
    SUBCASE("missing true component") {
        const auto res = variety_membership(VandermondeInstance(mix({0.4, 0.6}, {{1.0}, {2.0}}), q));
        CHECK_FALSE(res.member);
        CHECK(res.violations.front().kind == MembershipViolation::Kind::EmptyInv);
        CHECK(res.violations.front().index == 1);
        CHECK_FALSE(res.violations.front().describe().empty());
    }
    SUBCASE("ambiguous match") {
        const auto close = truth({0.5, 0.5}, {{1.0}, {1.0 + 2e-7}});
        const VandermondeInstance inst(mix({0.5, 0.5}, {{1.0 + 1e-7}, {5.0}}), close);
        CHECK_THROWS_AS(compute_inv_sets(inst, 1e-6), AmbiguityError);
        CHECK_NOTHROW(compute_inv_sets(inst));
    }
}

TEST_CASE("variety points") {
    const auto q = truth({0.3, 0.7}, {{1.0, 2.0}, {2.5, 0.8}});
    PartitionShape shape{2, {2, 1, 2}};
    const auto spec = make_partition_spec(shape, q, 17);
    CHECK_NOTHROW(spec.validate(q));
    CHECK(spec.ghost_centers.size() == 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto w = sample_variety_point(spec, q, seed);
        CHECK(w.components() == 5);
        const VandermondeInstance inst(w, q);
        CHECK(variety_membership(inst).member);
        CHECK(h_function(inst) < 1e-20);
        for (double part : aoyagi_local_split(inst, spec)) CHECK(part < 1e-20);
    }

    PartitionSpec bad = spec;
    bad.ghost_centers = {q.params().rate(0)};
    CHECK_THROWS_AS(bad.validate(q), DomainError);
    bad.ghost_centers.clear();
    CHECK_THROWS_AS(bad.validate(q), DomainError);
}

TEST_CASE("ratio probe") {
    const auto q = truth({1.0}, {{2.0}});
    const auto center = mix({0.5, 0.5}, {{2.0}, {2.0}});
    const auto K = [&](const MixtureParams& w) { return kl_mean_error(w, q, 1e-10); };
    const auto twice = [&](const MixtureParams& w) { return 2.0 * kl_mean_error(w, q, 1e-10); };
    const std::vector<double> scales{1e-1, 1e-2, 1e-3};
    const auto rep = ratio_bound_probe(K, twice, center, 10, scales, 3);
    CHECK(rep.finite());
    CHECK(rep.per_scale.size() == 3);
    CHECK(rep.min_ratio == doctest::Approx(4.0));
    CHECK(rep.max_ratio == doctest::Approx(4.0));
    CHECK(rep.spread_growth() == doctest::Approx(1.0));

    const auto H = [&](const MixtureParams& w) { return std::sqrt(h_function(VandermondeInstance(w, q))); };
    const auto rep2 = ratio_bound_probe(K, H, center, 20, scales, 4);
    CHECK(rep2.finite());
    CHECK(rep2.spread_growth() < 10.0);
}

TEST_CASE("probe ratios settle near a slow point") {
    // Ghost center close to the true rate: the ratios keep moving until
    // eps ~ 1e-4 and are flat below it.
    const auto q = truth({1.0}, {{1.776}});
    const auto center = mix({0.482, 0.518, 0.0}, {{1.776}, {1.776}, {1.959}});
    const auto K = [&](const MixtureParams& w) { return kl_mean_error(w, q, 1e-12); };
    const auto H = [&](const MixtureParams& w) { return h_function(VandermondeInstance(w, q)); };
    const std::vector<double> scales{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    const auto rep = ratio_bound_probe(K, H, center, 20, scales, 5);
    REQUIRE(rep.finite());
    const auto& a = rep.per_scale[4];
    const auto& b = rep.per_scale[5];
    CHECK(a.evaluated == 20);
    CHECK(b.min_ratio == doctest::Approx(a.min_ratio).epsilon(0.01));
    CHECK(b.max_ratio == doctest::Approx(a.max_ratio).epsilon(0.01));
}
