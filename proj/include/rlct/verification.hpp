#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rlct {

/// One property checked over many random instances. `worst` is the largest
/// observed statistic, compared against `threshold`.
struct SuiteCheck {
    std::string name;
    std::size_t instances = 0;
    std::size_t failures = 0;
    double worst = 0.0;
    double threshold = 0.0;
    std::vector<std::string> notes;  // first few failing instances

    bool passed() const { return failures == 0 && instances > 0; }
};

/// Interval reported by one ratio probe.
struct ProbeSummary {
    int M = 1, H = 1, r = 1;
    std::size_t point = 0;
    std::string comparison;  // "K_vs_H" or "H_vs_split"
    std::vector<int> sizes;  // partition shape of the center
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double spread_growth = 0.0;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<SuiteCheck> checks;
    std::vector<ProbeSummary> probes;
    double seconds = 0.0;

    bool passed() const;
};

constexpr std::uint64_t kDefaultVerifySeed = 20240501;

/// Annihilation, one-dimensional and multidimensional reconstruction on
/// `instances` random cases each (H <= 6, M <= 3, n <= 20, b in (0, 3]).
/// Scaled residuals must stay below 1e-8.
SuiteReport verify_polynomials(std::uint64_t seed = kDefaultVerifySeed, std::size_t instances = 500);

/// Constructed realizing points alternating with points pushed off the
/// variety by 1e-3. Membership must agree with the construction and with the
/// small-value predicates h < 1e-12 / h > 1e-10 (same for sq_surrogate).
SuiteReport verify_variety(std::uint64_t seed = kDefaultVerifySeed, std::size_t points = 200);

/// Ratio probes for K vs H and H vs the Aoyagi split sum at `points` variety
/// points of (1,3,1), (1,3,2) and (2,2,1).
SuiteReport verify_ratio(std::uint64_t seed = kDefaultVerifySeed, std::size_t points = 5, std::size_t directions = 20);

/// Largest allowed spread growth across the probe scales.
constexpr double kMaxSpreadGrowth = 10.0;

}  // namespace rlct
