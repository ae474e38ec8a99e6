#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "rlct/bayes_experiment.hpp"
#include "rlct/error.hpp"
#include "rlct/random.hpp"
#include "rlct/special.hpp"

namespace rlct {

void PriorSpec::validate() const {
    if (!(alpha > 0.0)) throw DomainError("PriorSpec: alpha must be > 0");
    if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("PriorSpec: Gamma shape and rate must be > 0");
    if (!(b_lo > 0.0)) throw DomainError("PriorSpec: b_lo must be > 0");
    if (!(b_hi > b_lo) || !std::isfinite(b_hi)) throw DomainError("PriorSpec: need b_lo < b_hi < inf");
}

double PriorSpec::log_density(const MixtureParams& w) const {
    double lp = 0.0;
    for (double a : w.weights()) {
        if (a <= 0.0) return alpha == 1.0 ? lp : -std::numeric_limits<double>::infinity();
        lp += (alpha - 1.0) * std::log(a);
    }
    for (const auto& b : w.rates()) {
        for (double v : b.values()) {
            if (v < b_lo || v > b_hi) return -std::numeric_limits<double>::infinity();
            lp += (shape - 1.0) * std::log(v) - rate * v;
        }
    }
    return lp;
}

void SamplerSettings::validate() const {
    if (chains < 1 || iterations < 1 || thinning < 1) throw DomainError("SamplerSettings: counts must be >= 1");
    if (burn_in >= iterations) throw DomainError("SamplerSettings: burn_in must be < iterations");
    if (!(scales.weights > 0.0) || !(scales.rates > 0.0))
        throw DomainError("SamplerSettings: proposal scales must be > 0");
}

CountData::CountData(std::span<const Count> data) {
    if (data.empty()) throw DomainError("CountData: data must be nonempty");
    dim_ = data.front().dim();
    std::map<std::vector<std::int64_t>, std::size_t> hist;
    for (const auto& x : data) {
        if (x.dim() != dim_) throw DomainError("CountData: observations must share a dimension");
        ++hist[std::vector<std::int64_t>(x.values().begin(), x.values().end())];
        for (auto v : x.values()) log_const_ -= log_factorial(v);
    }
    n_ = data.size();
    for (const auto& [x, count] : hist) {
        values_.insert(values_.end(), x.begin(), x.end());
        multiplicity_.push_back(count);
    }
}

double CountData::log_likelihood(const MixtureParams& w) const {
    if (w.dim() != dim_) throw DomainError("log_likelihood: dimension mismatch");
    double ll = 0.0;
    for (std::size_t u = 0; u < distinct(); ++u)
        ll += static_cast<double>(multiplicity_[u]) * mixture_log_pmf(value(u), w);
    return ll;
}

PosteriorSamples::PosteriorSamples(std::size_t components, std::size_t dim, std::size_t chains, std::size_t per_chain)
    : h_(components), m_(dim), chains_(chains), per_chain_(per_chain),
      weights_(chains * per_chain * components), rates_(chains * per_chain * components * dim),
      log_lik_(chains * per_chain, 0.0) {
    if (components == 0 || dim == 0 || chains == 0 || per_chain == 0)
        throw DomainError("PosteriorSamples: empty sample set");
}

void PosteriorSamples::set_draw(std::size_t s, std::span<const double> weights, std::span<const double> rates,
                                double log_lik) {
    std::copy(weights.begin(), weights.end(), weights_.begin() + static_cast<std::ptrdiff_t>(s * h_));
    std::copy(rates.begin(), rates.end(), rates_.begin() + static_cast<std::ptrdiff_t>(s * h_ * m_));
    log_lik_[s] = log_lik;
}

MixtureParams PosteriorSamples::draw(std::size_t s) const {
    std::vector<double> w(weights(s).begin(), weights(s).end());
    std::vector<RateVector> b;
    for (std::size_t k = 0; k < h_; ++k) {
        const auto row = rates(s).subspan(k * m_, m_);
        b.emplace_back(std::vector<double>(row.begin(), row.end()));
    }
    return MixtureParams(std::move(w), std::move(b));
}

double PosteriorSamples::mean_accept_weights() const {
    if (diagnostics_.empty()) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (const auto& d : diagnostics_) acc += d.accept_weights;
    return acc / static_cast<double>(diagnostics_.size());
}

double PosteriorSamples::mean_accept_rates() const {
    if (diagnostics_.empty()) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (const auto& d : diagnostics_) acc += d.accept_rates;
    return acc / static_cast<double>(diagnostics_.size());
}

double PosteriorSamples::ess_proxy() const { return mc_mean(log_lik_, chains_).ess; }

PosteriorSamples PosteriorSamples::from_draws(std::span<const MixtureParams> draws) {
    if (draws.empty()) throw DomainError("from_draws: need at least one draw");
    const std::size_t h = draws.front().components();
    const std::size_t m = draws.front().dim();
    PosteriorSamples out(h, m, 1, draws.size());
    std::vector<double> rates(h * m);
    for (std::size_t s = 0; s < draws.size(); ++s) {
        if (draws[s].components() != h || draws[s].dim() != m) throw DomainError("from_draws: shape mismatch");
        for (std::size_t k = 0; k < h; ++k) {
            for (std::size_t j = 0; j < m; ++j) rates[k * m + j] = draws[s].rate(k, j);
        }
        out.set_draw(s, draws[s].weights(), rates, std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

namespace {

constexpr std::size_t kAdaptBatch = 50;
constexpr double kTargetAccept = 0.3;
constexpr double kMinScale = 1e-4;
constexpr double kMaxScale = 10.0;
constexpr std::size_t kMinProposalsForTuningCheck = 100;

void adapt(double& scale, std::size_t accepted, std::size_t proposed) {
    if (proposed == 0) return;
    const double rate = static_cast<double>(accepted) / static_cast<double>(proposed);
    scale = std::clamp(scale * std::exp(rate - kTargetAccept), kMinScale, kMaxScale);
}

// One Metropolis-within-Gibbs chain. Works on log weights and log rates and
// keeps per-component log pmfs at each distinct observed count, so every move
// costs O(distinct counts x H).
class Chain {
public:
    Chain(const CountData& data, std::size_t components, const PriorSpec& prior, double beta,
          const ProposalScales& scales, RandomStream rng)
        : data_(data), h_(components), m_(data.dim()), u_(data.distinct()), prior_(prior), beta_(beta),
          rng_(std::move(rng)), log_w_(h_), log_b_(h_ * m_), b_(h_ * m_), comp_(h_ * u_), mix_(u_),
          scratch_comp_(u_), scratch_mix_(u_), scratch_log_w_(h_), scale_w_(scales.weights),
          scale_b_(h_, scales.rates) {
        initialize();
    }

    void run(std::size_t iterations, std::size_t burn_in, std::size_t thinning, PosteriorSamples& out,
             std::size_t first_slot) {
        std::size_t batch_acc_w = 0, batch_prop_w = 0;
        std::vector<std::size_t> batch_acc_b(h_, 0), batch_prop_b(h_, 0);
        std::size_t acc_w = 0, prop_w = 0;
        std::vector<std::size_t> acc_b(h_, 0), prop_b(h_, 0);
        std::size_t slot = first_slot;
        std::vector<double> weights(h_);

        for (std::size_t it = 0; it < iterations; ++it) {
            const bool sampling = it >= burn_in;
            if (h_ > 1) {
                const bool ok = move_weights();
                ++batch_prop_w;
                batch_acc_w += ok;
                if (sampling) {
                    ++prop_w;
                    acc_w += ok;
                }
            }
            for (std::size_t k = 0; k < h_; ++k) {
                const bool ok = move_rates(k);
                ++batch_prop_b[k];
                batch_acc_b[k] += ok;
                if (sampling) {
                    ++prop_b[k];
                    acc_b[k] += ok;
                }
            }
            if (!sampling && (it + 1) % kAdaptBatch == 0) {
                adapt(scale_w_, batch_acc_w, batch_prop_w);
                for (std::size_t k = 0; k < h_; ++k) adapt(scale_b_[k], batch_acc_b[k], batch_prop_b[k]);
                batch_acc_w = batch_prop_w = 0;
                std::fill(batch_acc_b.begin(), batch_acc_b.end(), 0);
                std::fill(batch_prop_b.begin(), batch_prop_b.end(), 0);
            }
            if (sampling && (it - burn_in) % thinning == 0) {
                for (std::size_t k = 0; k < h_; ++k) weights[k] = std::exp(log_w_[k]);
                out.set_draw(slot++, weights, b_, log_lik_ + data_.log_likelihood_constant());
            }
        }

        if (h_ > 1 && prop_w >= kMinProposalsForTuningCheck && acc_w == 0)
            throw TuningError(tuning_message("weight block", scale_w_, prop_w));
        diag_.accept_weights = h_ > 1 && prop_w > 0 ? static_cast<double>(acc_w) / static_cast<double>(prop_w) : 1.0;
        double rate_acc = 0.0;
        for (std::size_t k = 0; k < h_; ++k) {
            if (prop_b[k] >= kMinProposalsForTuningCheck && acc_b[k] == 0)
                throw TuningError(tuning_message("rate block " + std::to_string(k + 1), scale_b_[k], prop_b[k]));
            rate_acc += prop_b[k] > 0 ? static_cast<double>(acc_b[k]) / static_cast<double>(prop_b[k]) : 0.0;
        }
        diag_.accept_rates = rate_acc / static_cast<double>(h_);
        diag_.scale_weights = scale_w_;
        diag_.scale_rates = scale_b_;
    }

    const ChainDiagnostics& diagnostics() const { return diag_; }

private:
    static std::string tuning_message(const std::string& block, double scale, std::size_t proposals) {
        std::ostringstream os;
        os << "posterior_mcmc: " << block << " rejected all " << proposals << " proposals after burn-in (scale "
           << scale << ")";
        return os.str();
    }

    void initialize() {
        // Weights ~ Dirichlet(alpha), rates ~ Gamma(shape, rate) restricted to [b_lo, b_hi].
        double total = 0.0;
        std::vector<double> g(h_);
        for (auto& v : g) total += (v = rng_.gamma(prior_.alpha));
        for (std::size_t k = 0; k < h_; ++k) log_w_[k] = std::log(g[k] / total);
        for (std::size_t i = 0; i < h_ * m_; ++i) {
            double b;
            int attempts = 0;
            do {
                b = rng_.gamma(prior_.shape) / prior_.rate;
            } while ((b < prior_.b_lo || b > prior_.b_hi) && ++attempts < 1000);
            b_[i] = std::clamp(b, prior_.b_lo, prior_.b_hi);
            log_b_[i] = std::log(b_[i]);
        }
        for (std::size_t k = 0; k < h_; ++k) component_log_pmf(k, &log_b_[k * m_], &comp_[k * u_]);
        log_lik_ = mixture(log_w_.data(), nullptr, 0, mix_.data());
    }

    // sum_m (x_m log b_m - b_m) at every distinct count.
    void component_log_pmf(std::size_t, const double* log_b, double* out) const {
        for (std::size_t u = 0; u < u_; ++u) {
            const auto x = data_.value(u);
            double lp = 0.0;
            for (std::size_t m = 0; m < m_; ++m) lp += static_cast<double>(x[m]) * log_b[m] - std::exp(log_b[m]);
            out[u] = lp;
        }
    }

    // Fills mix with log sum_k w_k exp(comp_k) and returns the core log
    // likelihood. Component `replaced` uses `replacement` when it is non-null.
    double mixture(const double* log_w, const double* replacement, std::size_t replaced, double* mix) const {
        double ll = 0.0;
        for (std::size_t u = 0; u < u_; ++u) {
            double hi = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < h_; ++k) {
                const double c = (replacement && k == replaced) ? replacement[u] : comp_[k * u_ + u];
                hi = std::max(hi, log_w[k] + c);
            }
            double acc = 0.0;
            for (std::size_t k = 0; k < h_; ++k) {
                const double c = (replacement && k == replaced) ? replacement[u] : comp_[k * u_ + u];
                acc += std::exp(log_w[k] + c - hi);
            }
            mix[u] = hi + std::log(acc);
            ll += static_cast<double>(data_.multiplicity(u)) * mix[u];
        }
        return ll;
    }

    std::size_t uniform_index(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(rng_.uniform() * static_cast<double>(n)));
    }

    // Random walk on additive log-ratios against a uniformly chosen reference
    // component. With the ALR Jacobian prod_k a_k, the Dirichlet(alpha) prior
    // contributes alpha * sum_k log a_k to the target in these coordinates.
    bool move_weights() {
        const std::size_t ref = uniform_index(h_);
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < h_; ++k) {
            scratch_log_w_[k] = log_w_[k] - log_w_[ref];
            if (k != ref) scratch_log_w_[k] += scale_w_ * rng_.normal();
            hi = std::max(hi, scratch_log_w_[k]);
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < h_; ++k) acc += std::exp(scratch_log_w_[k] - hi);
        const double norm = hi + std::log(acc);
        double sum_new = 0.0, sum_old = 0.0;
        for (std::size_t k = 0; k < h_; ++k) {
            scratch_log_w_[k] -= norm;
            sum_new += scratch_log_w_[k];
            sum_old += log_w_[k];
        }
        if (!std::isfinite(sum_new)) return false;
        const double ll_new = mixture(scratch_log_w_.data(), nullptr, 0, scratch_mix_.data());
        const double log_ratio = beta_ * (ll_new - log_lik_) + prior_.alpha * (sum_new - sum_old);
        if (std::log(rng_.uniform_open()) < log_ratio) {
            log_w_.swap(scratch_log_w_);
            mix_.swap(scratch_mix_);
            log_lik_ = ll_new;
            return true;
        }
        return false;
    }

    // Random walk on the log rates of component k. Gamma(shape, rate) prior
    // plus the log Jacobian gives shape * log b - rate * b per coordinate.
    bool move_rates(std::size_t k) {
        double proposal[8];
        std::vector<double> heap;
        double* lb = m_ <= 8 ? proposal : (heap.resize(m_), heap.data());
        double log_ratio = 0.0;
        for (std::size_t m = 0; m < m_; ++m) {
            lb[m] = log_b_[k * m_ + m] + scale_b_[k] * rng_.normal();
            const double b = std::exp(lb[m]);
            if (b < prior_.b_lo || b > prior_.b_hi) return false;
            log_ratio += prior_.shape * (lb[m] - log_b_[k * m_ + m]) - prior_.rate * (b - b_[k * m_ + m]);
        }
        component_log_pmf(k, lb, scratch_comp_.data());
        const double ll_new = mixture(log_w_.data(), scratch_comp_.data(), k, scratch_mix_.data());
        log_ratio += beta_ * (ll_new - log_lik_);
        if (std::log(rng_.uniform_open()) < log_ratio) {
            for (std::size_t m = 0; m < m_; ++m) {
                log_b_[k * m_ + m] = lb[m];
                b_[k * m_ + m] = std::exp(lb[m]);
            }
            std::copy(scratch_comp_.begin(), scratch_comp_.end(), comp_.begin() + static_cast<std::ptrdiff_t>(k * u_));
            mix_.swap(scratch_mix_);
            log_lik_ = ll_new;
            return true;
        }
        return false;
    }

    const CountData& data_;
    std::size_t h_, m_, u_;
    const PriorSpec& prior_;
    double beta_;
    RandomStream rng_;
    std::vector<double> log_w_, log_b_, b_;
    std::vector<double> comp_, mix_;
    std::vector<double> scratch_comp_, scratch_mix_, scratch_log_w_;
    double log_lik_ = 0.0;  // without the log-factorial constant
    double scale_w_;
    std::vector<double> scale_b_;
    ChainDiagnostics diag_;
};

}  // namespace

PosteriorSamples posterior_mcmc(const CountData& data, const ModelSignature& sig, const PriorSpec& prior,
                                const SamplerSettings& settings, double beta) {
    prior.validate();
    settings.validate();
    if (data.dim() != static_cast<std::size_t>(sig.M)) throw DomainError("posterior_mcmc: data dimension != M");
    if (!(beta > 0.0)) throw DomainError("posterior_mcmc: inverse temperature must be > 0");
    const std::size_t per_chain = settings.kept_per_chain();
    PosteriorSamples out(static_cast<std::size_t>(sig.H), data.dim(), settings.chains, per_chain);
    std::vector<ChainDiagnostics> diags;
    for (std::size_t c = 0; c < settings.chains; ++c) {
        Chain chain(data, static_cast<std::size_t>(sig.H), prior, beta, settings.scales,
                    RandomStream(settings.seed, c + 1));
        chain.run(settings.iterations, settings.burn_in, settings.thinning, out, c * per_chain);
        diags.push_back(chain.diagnostics());
    }
    out.set_diagnostics(std::move(diags));
    return out;
}

PosteriorSamples posterior_mcmc(std::span<const Count> data, const ModelSignature& sig, const PriorSpec& prior,
                                const SamplerSettings& settings, double beta) {
    return posterior_mcmc(CountData(data), sig, prior, settings, beta);
}

double effective_sample_size(std::span<const double> chain) {
    const std::size_t n = chain.size();
    if (n < 4) return static_cast<double>(n);
    double mean = 0.0;
    for (double v : chain) mean += v;
    mean /= static_cast<double>(n);
    auto autocov = [&](std::size_t lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) acc += (chain[i] - mean) * (chain[i + lag] - mean);
        return acc / static_cast<double>(n);
    };
    const double var = autocov(0);
    if (!(var > 0.0)) return static_cast<double>(n);
    // Geyer's initial monotone sequence over pair sums rho(2t) + rho(2t+1).
    double tau = -1.0;
    double previous_pair = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; 2 * t + 1 < n; ++t) {
        double pair = (autocov(2 * t) + autocov(2 * t + 1)) / var;
        if (pair <= 0.0) break;
        pair = std::min(pair, previous_pair);
        tau += 2.0 * pair;
        previous_pair = pair;
    }
    return std::min(static_cast<double>(n), static_cast<double>(n) / std::max(tau, 1e-12));
}

McEstimate mc_mean(std::span<const double> series, std::size_t chains) {
    if (series.empty() || chains == 0 || series.size() % chains != 0)
        throw DomainError("mc_mean: series must split into equal chains");
    const std::size_t len = series.size() / chains;
    McEstimate out;
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    var /= static_cast<double>(series.size() > 1 ? series.size() - 1 : 1);
    for (std::size_t c = 0; c < chains; ++c) out.ess += effective_sample_size(series.subspan(c * len, len));
    out.mean = mean;
    out.se = std::sqrt(var / out.ess);
    return out;
}

namespace {

double draw_log_pmf(const PosteriorSamples& samples, std::size_t s, std::span<const std::int64_t> x) {
    const auto w = samples.weights(s);
    const auto b = samples.rates(s);
    const std::size_t m = samples.dim();
    double hi = -std::numeric_limits<double>::infinity();
    double terms[64];
    std::size_t active = 0;
    for (std::size_t k = 0; k < samples.components() && active < 64; ++k) {
        if (w[k] <= 0.0) continue;
        double lp = std::log(w[k]);
        for (std::size_t j = 0; j < m; ++j) lp += poisson_log_pmf(x[j], b[k * m + j]);
        terms[active++] = lp;
        hi = std::max(hi, lp);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < active; ++i) acc += std::exp(terms[i] - hi);
    return hi + std::log(acc);
}

}  // namespace

double predictive_density(const PosteriorSamples& samples, const Count& x) {
    if (x.dim() != samples.dim()) throw DomainError("predictive_density: dimension mismatch");
    std::vector<double> lp(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) lp[s] = draw_log_pmf(samples, s, x.values());
    return std::exp(log_sum_exp(lp) - std::log(static_cast<double>(samples.size())));
}

McEstimate predictive_estimate(const PosteriorSamples& samples, const Count& x) {
    if (x.dim() != samples.dim()) throw DomainError("predictive_estimate: dimension mismatch");
    std::vector<double> p(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) p[s] = std::exp(draw_log_pmf(samples, s, x.values()));
    return mc_mean(p, samples.chains());
}

McEstimate posterior_rate_mean(const PosteriorSamples& samples, std::size_t k, std::size_t m) {
    if (k >= samples.components() || m >= samples.dim()) throw DomainError("posterior_rate_mean: index out of range");
    std::vector<double> v(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) v[s] = samples.rates(s)[k * samples.dim() + m];
    return mc_mean(v, samples.chains());
}

double estimate_generalization(const PosteriorSamples& samples, const TrueModel& truth, double tol) {
    if (truth.dim() != samples.dim()) throw DomainError("estimate_generalization: dimension mismatch");
    const Lattice lat = make_lattice(truth.params().max_rate(), truth.components(), truth.dim(), tol);
    const auto lq = lattice_log_pmf(truth.params(), lat);
    const std::size_t points = lat.size();

    // Streaming log-sum-exp over draws at every lattice point.
    std::vector<double> hi(points, -std::numeric_limits<double>::infinity());
    std::vector<double> acc(points, 0.0);
    std::vector<double> lp(points);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        lattice_log_pmf(samples.weights(s), samples.rates(s), lat, lp);
        for (std::size_t p = 0; p < points; ++p) {
            const double v = lp[p];
            if (v <= hi[p]) {
                acc[p] += std::exp(v - hi[p]);
            } else {
                acc[p] = acc[p] * std::exp(hi[p] - v) + 1.0;
                hi[p] = v;
            }
        }
    }
    const double log_count = std::log(static_cast<double>(samples.size()));
    double gn = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
        const double q = std::exp(lq[p]);
        const double log_pred = hi[p] + std::log(acc[p]) - log_count;
        if (!std::isfinite(log_pred)) {
            if (q > tol) throw NumericalError("estimate_generalization: predictive density vanished where q > tol");
            continue;
        }
        gn -= q * log_pred;
    }
    return gn;
}

MixtureParams embed_truth(const TrueModel& truth, std::size_t components) {
    const auto& q = truth.params();
    if (components < q.components()) throw DomainError("embed_truth: H < r");
    std::vector<double> w(q.weights().begin(), q.weights().end());
    std::vector<RateVector> b(q.rates());
    while (w.size() < components) {
        w.push_back(0.0);
        b.push_back(q.rate(0));
    }
    return MixtureParams(std::move(w), std::move(b));
}

}  // namespace rlct
