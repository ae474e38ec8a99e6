#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "rlct/bayes_experiment.hpp"
#include "rlct/error.hpp"
#include "rlct/experiment_io.hpp"
#include "rlct/random.hpp"

namespace rlct {

LambdaFit fit_lambda(std::span<const ExperimentRecord> records) {
    std::map<std::size_t, std::vector<double>> groups;
    for (const auto& rec : records) {
        if (rec.n == 0) throw DomainError("fit_lambda: record with n = 0");
        groups[rec.n].push_back(rec.gn - rec.l0);
    }
    if (groups.size() < 3) throw DomainError("fit_lambda: need at least 3 distinct n");

    LambdaFit fit;
    std::size_t zero_var = 0;
    for (const auto& [n, deltas] : groups) {
        if (deltas.size() < 2) throw DomainError("fit_lambda: need at least 2 replications at n = " + std::to_string(n));
        FitPoint pt;
        pt.n = n;
        pt.reps = deltas.size();
        pt.inv_n = 1.0 / static_cast<double>(n);
        for (double d : deltas) pt.mean_delta += d;
        pt.mean_delta /= static_cast<double>(pt.reps);
        double var = 0.0;
        for (double d : deltas) var += (d - pt.mean_delta) * (d - pt.mean_delta);
        var /= static_cast<double>(pt.reps - 1);
        pt.se_delta = std::sqrt(var / static_cast<double>(pt.reps));
        zero_var += pt.se_delta == 0.0;
        fit.points.push_back(pt);
    }

    if (zero_var == fit.points.size()) {
        double sxy = 0.0, sxx = 0.0;
        for (const auto& p : fit.points) {
            sxy += p.inv_n * p.mean_delta;
            sxx += p.inv_n * p.inv_n;
        }
        fit.lambda_hat = sxy / sxx;
        double rss = 0.0;
        for (const auto& p : fit.points) rss += std::pow(p.mean_delta - fit.lambda_hat * p.inv_n, 2);
        fit.se = std::sqrt(rss / static_cast<double>(fit.points.size() - 1) / sxx);
        return fit;
    }
    if (zero_var > 0) throw DomainError("fit_lambda: some sample sizes have zero variance across replications");

    double swxy = 0.0, swxx = 0.0;
    for (const auto& p : fit.points) {
        const double w = 1.0 / (p.se_delta * p.se_delta);
        swxy += w * p.inv_n * p.mean_delta;
        swxx += w * p.inv_n * p.inv_n;
    }
    fit.lambda_hat = swxy / swxx;
    fit.se = 1.0 / std::sqrt(swxx);
    return fit;
}

WbicResult wbic_lambda(const CountData& data, const ModelSignature& sig, const PriorSpec& prior,
                       const SamplerSettings& settings, const TrueModel& truth) {
    if (data.size() < 30) throw DomainError("wbic_lambda: need n >= 30");
    if (truth.dim() != data.dim()) throw DomainError("wbic_lambda: truth dimension differs from data");
    const double log_n = std::log(static_cast<double>(data.size()));
    WbicResult out;
    out.beta = 1.0 / log_n;

    const PosteriorSamples tempered = posterior_mcmc(data, sig, prior, settings, out.beta);
    double mean_nll = 0.0;
    for (double ll : tempered.log_likelihood()) mean_nll -= ll;
    out.wbic = mean_nll / static_cast<double>(tempered.size());

    SamplerSettings ref_settings = settings;
    ref_settings.seed = settings.seed + 1;
    const PosteriorSamples untempered = posterior_mcmc(data, sig, prior, ref_settings, 1.0);
    const auto ll = untempered.log_likelihood();
    out.reference_nll = -*std::max_element(ll.begin(), ll.end());
    out.lambda_hat = (out.wbic - out.reference_nll) / log_n;
    return out;
}

void ExperimentConfig::validate() const {
    if (truth.components() != static_cast<std::size_t>(sig.r))
        throw DomainError("config: truth has " + std::to_string(truth.components()) + " components but r = " +
                          std::to_string(sig.r));
    if (truth.dim() != static_cast<std::size_t>(sig.M)) throw DomainError("config: truth dimension differs from M");
    if (n_grid.empty()) throw DomainError("config: n_grid is empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] == 0) throw DomainError("config: n_grid entries must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw DomainError("config: n_grid must be strictly increasing");
    }
    if (replications < 2) throw DomainError("config: replications must be >= 2");
    prior.validate();
    sampler.validate();
    for (const auto& b : truth.params().rates()) {
        for (double v : b.values()) {
            if (v < prior.b_lo || v > prior.b_hi) throw DomainError("config: true rates must lie in [b_lo, b_hi]");
        }
    }
    if (!(truncation_tol > 0.0) || truncation_tol > 1e-6) throw DomainError("config: truncation_tol must lie in (0, 1e-6]");
    if (wbic && n_grid.front() < 30) throw DomainError("config: wbic needs every n >= 30");
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::size_t rep) {
    return seed ^ mix64((static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(rep));
}

ExperimentRecord run_cell(const ExperimentConfig& cfg, std::size_t n, std::size_t rep) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentRecord rec;
    rec.config_hash = config_hash(cfg);
    rec.M = cfg.sig.M;
    rec.H = cfg.sig.H;
    rec.r = cfg.sig.r;
    rec.n = n;
    rec.rep = rep;
    rec.seed = cell_seed(cfg.sampler.seed, n, rep);

    // Stream 0 of the cell seed generates the data; chains use streams 1..chains.
    const CountData data(sample(cfg.truth.params(), n, rec.seed));
    SamplerSettings settings = cfg.sampler;
    settings.seed = rec.seed;
    const PosteriorSamples samples = posterior_mcmc(data, cfg.sig, cfg.prior, settings);

    rec.gn = estimate_generalization(samples, cfg.truth, cfg.truncation_tol);
    rec.l0 = log_loss(embed_truth(cfg.truth, static_cast<std::size_t>(cfg.sig.H)), cfg.truth, cfg.truncation_tol);
    if (!std::isfinite(rec.gn)) throw NumericalError("run_cell: G_n is not finite");
    rec.accept_w = samples.mean_accept_weights();
    rec.accept_b = samples.mean_accept_rates();
    rec.ess_proxy = samples.ess_proxy();
    if (cfg.wbic) {
        SamplerSettings wbic_settings = settings;
        wbic_settings.seed = mix64(rec.seed);
        rec.wbic_lambda = wbic_lambda(data, cfg.sig, cfg.prior, wbic_settings, cfg.truth).lambda_hat;
    }
    rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

namespace {

std::size_t resolve_threads(std::size_t requested, std::size_t cells) {
    std::size_t threads = requested;
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
        if (const char* env = std::getenv("RLCT_LAB_THREADS")) {
            char* end = nullptr;
            const long cap = std::strtol(env, &end, 10);
            if (end != env && *end == '\0' && cap >= 1) threads = std::min(threads, static_cast<std::size_t>(cap));
        }
    }
    return std::max<std::size_t>(1, std::min(threads, cells));
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::size_t threads) {
    cfg.validate();
    if (cfg.output_path.empty()) throw ConfigError("run_experiment: output_path is empty");
    const std::string hash = config_hash(cfg);

    ExperimentSummary summary;
    std::set<std::pair<std::size_t, std::size_t>> done;
    const bool exists = std::filesystem::exists(cfg.output_path) && std::filesystem::file_size(cfg.output_path) > 0;
    if (exists) {
        for (auto& rec : read_records(cfg.output_path)) {
            if (rec.config_hash != hash)
                throw ConfigError("run_experiment: " + cfg.output_path + " holds results of config " + rec.config_hash +
                                  ", not " + hash);
            done.emplace(rec.n, rec.rep);
            summary.records.push_back(std::move(rec));
        }
    }

    std::ofstream out(cfg.output_path, std::ios::app);
    if (!out) throw ConfigError("run_experiment: cannot write " + cfg.output_path);
    if (!exists) out << csv_header() << '\n' << std::flush;

    std::vector<std::pair<std::size_t, std::size_t>> todo;
    for (std::size_t n : cfg.n_grid) {
        for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
            if (done.count({n, rep})) {
                ++summary.cells_skipped;
            } else {
                todo.emplace_back(n, rep);
            }
        }
    }

    // Cells finish out of order; rows are written once every earlier cell is settled.
    std::vector<std::optional<ExperimentRecord>> results(todo.size());
    std::vector<char> settled(todo.size(), 0);
    std::size_t flushed = 0;
    std::mutex mu;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= todo.size()) return;
            std::optional<ExperimentRecord> rec;
            std::string failure;
            try {
                rec = run_cell(cfg, todo[i].first, todo[i].second);
            } catch (const std::exception& e) {
                failure = "n=" + std::to_string(todo[i].first) + " rep=" + std::to_string(todo[i].second) + ": " + e.what();
            }
            std::lock_guard lock(mu);
            results[i] = std::move(rec);
            settled[i] = 1;
            if (!failure.empty()) summary.failures.push_back(std::move(failure));
            while (flushed < todo.size() && settled[flushed]) {
                if (results[flushed]) {
                    out << format_record(*results[flushed]) << '\n';
                    ++summary.cells_run;
                }
                ++flushed;
            }
            out.flush();
        }
    };

    const std::size_t pool_size = resolve_threads(threads, todo.size());
    if (pool_size <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < pool_size; ++t) pool.emplace_back(worker);
    }
    if (!out) throw ConfigError("run_experiment: write to " + cfg.output_path + " failed");

    std::sort(summary.failures.begin(), summary.failures.end());
    for (auto& rec : results) {
        if (rec) summary.records.push_back(std::move(*rec));
    }
    std::map<std::size_t, std::size_t> order;
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) order[cfg.n_grid[i]] = i;
    std::stable_sort(summary.records.begin(), summary.records.end(), [&](const auto& a, const auto& b) {
        const auto ia = order.count(a.n) ? order[a.n] : order.size();
        const auto ib = order.count(b.n) ? order[b.n] : order.size();
        return std::tie(ia, a.rep) < std::tie(ib, b.rep);
    });
    return summary;
}

}  // namespace rlct
