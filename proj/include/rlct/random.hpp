#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace rlct {

/// Philox4x32-10 block function (Salmon et al., Random123). Pure: same
/// (counter, key) always gives the same four words.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; used to derive per-cell and per-chain seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based random stream. The 64-bit seed is the Philox key, the
/// stream id occupies the upper half of the counter and the lower half
/// counts blocks, so streams with different (seed, stream) never overlap.
///
/// Satisfies UniformRandomBitGenerator, but the variate generators below are
/// used instead of <random> distributions so output is identical across
/// standard library implementations.
class RandomStream {
public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1); safe to take the log of.
    double uniform_open();
    double normal();
    /// Gamma(shape, rate = 1).
    double gamma(double shape);
    /// Poisson(rate): sequential CDF inversion below 30, PTRS rejection above.
    std::int64_t poisson(double rate);
    /// Index k with probability weights[k] / sum(weights).
    std::size_t categorical(std::span<const double> weights);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

}  // namespace rlct
