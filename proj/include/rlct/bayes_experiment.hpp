#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rlct/poisson_model.hpp"
#include "rlct/rlct_calculator.hpp"

namespace rlct {

/// phi(w): Dirichlet(alpha) on the weights times independent Gamma(shape, rate)
/// on every rate coordinate, restricted to [b_lo, b_hi]. Positive on the
/// interior of the (compact) parameter set.
struct PriorSpec {
    double alpha = 1.0;
    double shape = 2.0;
    double rate = 1.0;
    double b_lo = 0.05;
    double b_hi = 30.0;

    void validate() const;
    /// Unnormalized log density; -inf outside the support.
    double log_density(const MixtureParams& w) const;
};

/// Random-walk step sizes: the weight block moves additive log-ratios, each
/// rate block moves the log rates of one component.
struct ProposalScales {
    double weights = 1.0;
    double rates = 0.3;
};

struct SamplerSettings {
    std::size_t chains = 4;
    std::size_t iterations = 3000;  // per chain, burn-in included
    std::size_t burn_in = 1000;
    std::size_t thinning = 2;
    ProposalScales scales;
    std::uint64_t seed = 1;

    void validate() const;
    /// Retained draws per chain.
    std::size_t kept_per_chain() const { return (iterations - burn_in + thinning - 1) / thinning; }
};

/// Observations compressed to (distinct count, multiplicity) pairs. The
/// likelihood only depends on this histogram, so sampler cost does not grow
/// with n.
class CountData {
public:
    explicit CountData(std::span<const Count> data);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return n_; }
    std::size_t distinct() const { return multiplicity_.size(); }
    std::span<const std::int64_t> value(std::size_t u) const { return {&values_[u * dim_], dim_}; }
    std::size_t multiplicity(std::size_t u) const { return multiplicity_[u]; }
    /// -sum_i sum_m log(x_im!), the rate-independent part of the log likelihood.
    double log_likelihood_constant() const { return log_const_; }

    /// sum_i log p(x_i | w).
    double log_likelihood(const MixtureParams& w) const;

private:
    std::size_t dim_ = 0;
    std::size_t n_ = 0;
    std::vector<std::int64_t> values_;
    std::vector<std::size_t> multiplicity_;
    double log_const_ = 0.0;
};

struct ChainDiagnostics {
    double accept_weights = 1.0;  // 1 when H = 1 (no weight block)
    double accept_rates = 0.0;    // averaged over components
    double scale_weights = 0.0;   // frozen values after burn-in
    std::vector<double> scale_rates;
};

/// Retained posterior draws, chain-major: draws [c * per_chain, (c+1) * per_chain) belong to chain c.
class PosteriorSamples {
public:
    PosteriorSamples(std::size_t components, std::size_t dim, std::size_t chains, std::size_t per_chain);

    std::size_t components() const { return h_; }
    std::size_t dim() const { return m_; }
    std::size_t chains() const { return chains_; }
    std::size_t per_chain() const { return per_chain_; }
    std::size_t size() const { return chains_ * per_chain_; }

    MixtureParams draw(std::size_t s) const;
    std::span<const double> weights(std::size_t s) const { return {&weights_[s * h_], h_}; }
    std::span<const double> rates(std::size_t s) const { return {&rates_[s * h_ * m_], h_ * m_}; }
    /// sum_i log p(X_i | w_s) (untempered) for each draw.
    std::span<const double> log_likelihood() const { return log_lik_; }
    const std::vector<ChainDiagnostics>& diagnostics() const { return diagnostics_; }

    double mean_accept_weights() const;
    double mean_accept_rates() const;
    /// Effective sample size of the log-likelihood trace, summed over chains.
    double ess_proxy() const;

    /// Builds a sample set from explicit draws (one chain); used for degenerate
    /// and test posteriors.
    static PosteriorSamples from_draws(std::span<const MixtureParams> draws);

    void set_draw(std::size_t s, std::span<const double> weights, std::span<const double> rates, double log_lik);
    void set_diagnostics(std::vector<ChainDiagnostics> diagnostics) { diagnostics_ = std::move(diagnostics); }

private:
    std::size_t h_, m_, chains_, per_chain_;
    std::vector<double> weights_;
    std::vector<double> rates_;
    std::vector<double> log_lik_;
    std::vector<ChainDiagnostics> diagnostics_;
};

/// Metropolis-within-Gibbs for p(w | X^n) proportional to phi(w) prod p(X_i | w)^beta.
/// Proposal scales adapt during burn-in toward 20-40% acceptance and are then
/// frozen. Chain c draws from RandomStream(settings.seed, c + 1). Throws
/// TuningError if a block rejects every post-burn-in proposal.
PosteriorSamples posterior_mcmc(const CountData& data, const ModelSignature& sig, const PriorSpec& prior,
                                const SamplerSettings& settings, double beta = 1.0);
PosteriorSamples posterior_mcmc(std::span<const Count> data, const ModelSignature& sig, const PriorSpec& prior,
                                const SamplerSettings& settings, double beta = 1.0);

/// A Monte Carlo estimate with its standard error.
struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
    double ess = 0.0;
};

/// Initial-monotone-sequence ESS (Geyer 1992) of one chain, capped at its length.
double effective_sample_size(std::span<const double> chain);
/// Mean over `chains` equal-length consecutive chains with ESS-based standard error.
McEstimate mc_mean(std::span<const double> series, std::size_t chains);

/// E_w[p(x | w)] over the posterior draws.
double predictive_density(const PosteriorSamples& samples, const Count& x);
McEstimate predictive_estimate(const PosteriorSamples& samples, const Count& x);
/// Posterior mean of rate (k, m).
McEstimate posterior_rate_mean(const PosteriorSamples& samples, std::size_t k, std::size_t m);

/// G_n = -sum_x q(x) log E_w[p(x | w)] over the truth's truncated lattice.
double estimate_generalization(const PosteriorSamples& samples, const TrueModel& truth, double tol);

/// Truth padded to H components with zero weights; a realizing parameter w0.
MixtureParams embed_truth(const TrueModel& truth, std::size_t components);

struct ExperimentRecord {
    std::string config_hash;
    int M = 1, H = 1, r = 1;
    std::size_t n = 0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    double gn = 0.0;
    double l0 = 0.0;
    std::optional<double> wbic_lambda;
    double accept_w = 0.0;
    double accept_b = 0.0;
    double ess_proxy = 0.0;
    std::int64_t wall_ms = 0;
};

struct FitPoint {
    std::size_t n = 0;
    std::size_t reps = 0;
    double inv_n = 0.0;
    double mean_delta = 0.0;  // mean of G_n - L(w0)
    double se_delta = 0.0;    // standard error of that mean
};

struct LambdaFit {
    double lambda_hat = 0.0;
    double se = 0.0;
    std::vector<FitPoint> points;  // increasing n
};

/// Weighted least squares of mean(G_n - L0) on 1/n through the origin with
/// inverse-variance weights. When every group has zero variance the fit is
/// unweighted and the SE comes from the residuals.
LambdaFit fit_lambda(std::span<const ExperimentRecord> records);

struct WbicResult {
    double lambda_hat = 0.0;
    double beta = 0.0;
    double wbic = 0.0;           // E^beta[n L_n(w)]
    double reference_nll = 0.0;  // n L_n at the reference point
};

/// WBIC estimate of lambda: a tempered chain at beta = 1/log n gives
/// E^beta[n L_n(w)], and lambda = (E^beta[n L_n(w)] - n L_n(w_hat)) / log n
/// where w_hat is the best draw of an untempered chain on the same data
/// (seeded from settings.seed + 1). Requires n >= 30.
WbicResult wbic_lambda(const CountData& data, const ModelSignature& sig, const PriorSpec& prior,
                       const SamplerSettings& settings, const TrueModel& truth);

struct ExperimentConfig {
    ModelSignature sig{1, 1, 1};
    TrueModel truth{MixtureParams({1.0}, {RateVector{1.0}})};
    std::vector<std::size_t> n_grid;
    std::size_t replications = 2;
    PriorSpec prior;
    SamplerSettings sampler;
    double truncation_tol = 1e-10;
    std::string output_path;
    bool wbic = false;

    void validate() const;
};

/// seed XOR mix64(n, rep): the seed of one grid cell.
std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::size_t rep);

/// Runs one (n, rep) cell.
ExperimentRecord run_cell(const ExperimentConfig& cfg, std::size_t n, std::size_t rep);

struct ExperimentSummary {
    std::vector<ExperimentRecord> records;  // everything in the CSV for this config, grid order
    std::size_t cells_run = 0;
    std::size_t cells_skipped = 0;
    std::vector<std::string> failures;
};

/// Fills the n x replication grid, appending one CSV row per finished cell in
/// grid order. Cells already present in the output file are skipped. threads
/// = 0 picks min(hardware, RLCT_LAB_THREADS).
ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::size_t threads = 0);

}  // namespace rlct
