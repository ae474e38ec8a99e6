#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rlct {

/// Poisson intensities, one per data coordinate. Every entry is strictly positive.
class RateVector {
public:
    explicit RateVector(std::vector<double> values);
    RateVector(std::initializer_list<double> values) : RateVector(std::vector<double>(values)) {}

    std::size_t dim() const { return values_.size(); }
    double operator[](std::size_t m) const { return values_[m]; }
    std::span<const double> values() const { return values_; }

    friend bool operator==(const RateVector&, const RateVector&) = default;

private:
    std::vector<double> values_;
};

/// One observation x in (Z_{>=0})^M.
class Count {
public:
    explicit Count(std::vector<std::int64_t> values);
    Count(std::initializer_list<std::int64_t> values) : Count(std::vector<std::int64_t>(values)) {}

    std::size_t dim() const { return values_.size(); }
    std::int64_t operator[](std::size_t m) const { return values_[m]; }
    std::span<const std::int64_t> values() const { return values_; }

    friend bool operator==(const Count&, const Count&) = default;
    friend auto operator<=>(const Count&, const Count&) = default;

private:
    std::vector<std::int64_t> values_;
};

/// Mixture parameter w = (a, b): H weights on the simplex and H rate vectors of
/// a common dimension M.
class MixtureParams {
public:
    /// Weights must be nonnegative and sum to 1 within this absolute tolerance.
    static constexpr double kWeightSumTolerance = 1e-12;

    MixtureParams(std::vector<double> weights, std::vector<RateVector> rates);
    static MixtureParams from_rows(std::vector<double> weights, const std::vector<std::vector<double>>& rows);

    std::size_t components() const { return weights_.size(); }
    std::size_t dim() const { return rates_.front().dim(); }

    double weight(std::size_t k) const { return weights_[k]; }
    std::span<const double> weights() const { return weights_; }
    const RateVector& rate(std::size_t k) const { return rates_[k]; }
    double rate(std::size_t k, std::size_t m) const { return rates_[k][m]; }
    const std::vector<RateVector>& rates() const { return rates_; }
    std::vector<std::vector<double>> rate_rows() const;

    double max_rate() const;

    /// Component k of the result is component perm[k] of this.
    MixtureParams permuted(std::span<const std::size_t> perm) const;

private:
    std::vector<double> weights_;
    std::vector<RateVector> rates_;
};

/// The data-generating mixture q(x): r components with strictly positive
/// weights and pairwise-distinct rate vectors.
class TrueModel {
public:
    /// Minimum L-infinity distance between true rate vectors: 100x the
    /// default rate-matching tolerance of the Inv-set computation.
    static constexpr double kMinSeparation = 1e-7;

    explicit TrueModel(MixtureParams params);

    const MixtureParams& params() const { return params_; }
    std::size_t components() const { return params_.components(); }
    std::size_t dim() const { return params_.dim(); }

private:
    MixtureParams params_;
};

/// The box [0, x_max]^M that stands in for (Z_{>=0})^M in every lattice sum.
struct Lattice {
    std::size_t dim = 1;
    std::int64_t x_max = 0;
    /// Upper bound on the q-mass outside the box: dim * P(X > x_max | largest rate).
    double tail_bound = 0.0;

    std::size_t side() const { return static_cast<std::size_t>(x_max + 1); }
    std::size_t size() const;
    /// Coordinates of the point with row-major index idx (last coordinate fastest).
    Count point(std::size_t idx) const;
};

/// Smallest box whose per-coordinate Poisson tail beyond x_max, at max_rate,
/// is below tol / (components * dim).
Lattice make_lattice(double max_rate, std::size_t components, std::size_t dim, double tol);
/// Lattice for comparing w against q: largest rate over both, H = w's components.
Lattice make_lattice(const MixtureParams& w, const TrueModel& q, double tol);

double poisson_log_pmf(std::int64_t x, double rate);
double poisson_pmf(std::int64_t x, double rate);

double mixture_log_pmf(std::span<const std::int64_t> x, const MixtureParams& w);
double mixture_log_pmf(const Count& x, const MixtureParams& w);

/// log p(x | w) at every lattice point, in Lattice::point order.
std::vector<double> lattice_log_pmf(const MixtureParams& w, const Lattice& lattice);
/// Same, from raw weights (H) and row-major rates (H x M) into out (lattice.size()).
void lattice_log_pmf(std::span<const double> weights, std::span<const double> rates, const Lattice& lattice,
                     std::span<double> out);

/// count i.i.d. draws from p(. | w); deterministic in seed.
std::vector<Count> sample(const MixtureParams& w, std::size_t count, std::uint64_t seed);

/// L(w) = -sum_x q(x) log p(x | w) over the truncated lattice. tol in (0, 1e-6].
double log_loss(const MixtureParams& w, const TrueModel& q, double tol);

/// K(w) = sum_x q(x) log(q(x) / p(x | w)).
///
/// Computed on the lattice plus one lumped tail bin, as sum q * (expm1(d) - d)
/// with d = log p - log q. Every term is nonnegative, so the result is >= 0
/// and keeps full relative precision near the realizing set.
double kl_mean_error(const MixtureParams& w, const TrueModel& q, double tol);

/// sum_x (p(x | w) - q(x))^2 over the truncated lattice.
double sq_surrogate(const MixtureParams& w, const TrueModel& q, double tol);

}  // namespace rlct
