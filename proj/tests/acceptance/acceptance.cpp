#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rlct/bayes_experiment.hpp"
#include "rlct/experiment_io.hpp"
#include "rlct/poisson_model.hpp"
#include "rlct/rlct_calculator.hpp"
#include "rlct/verification.hpp"

using namespace rlct;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string suite_detail(const SuiteReport& rep) {
    std::string s;
    for (const auto& c : rep.checks) {
        if (!s.empty()) s += ", ";
        s += fmt("%s %zu/%zu worst %.3g", c.name.c_str(), c.instances - c.failures, c.instances, c.worst);
    }
    return s;
}

Outcome closed_form_vs_enumeration() {
    std::size_t checked = 0, mismatched = 0;
    for (int M = 1; M <= 3; ++M) {
        for (int H = 1; H <= 8; ++H) {
            for (int r = 1; r <= H; ++r) {
                const ModelSignature sig(M, H, r);
                ++checked;
                if (!(rlct_enumerate(sig).minimum == rlct_closed_form(sig))) ++mismatched;
            }
        }
    }
    return {mismatched == 0, fmt("%zu signatures, %zu mismatches", checked, mismatched)};
}

Outcome suite(const SuiteReport& rep) { return {rep.passed(), suite_detail(rep)}; }

Outcome ratio_probes() {
    const auto rep = verify_ratio(kDefaultVerifySeed, 5, 20);
    double worst_growth = 0.0;
    for (const auto& p : rep.probes) worst_growth = std::max(worst_growth, p.spread_growth);
    return {rep.passed(), fmt("%zu probes, largest spread growth %.3g (limit %.0f)", rep.probes.size(), worst_growth,
                              kMaxSpreadGrowth)};
}

ExperimentConfig prepare(const fs::path& config_dir, const std::string& name, const fs::path& work) {
    ExperimentConfig cfg = load_config((config_dir / (name + ".json")).string());
    cfg.output_path = (work / (name + ".csv")).string();
    fs::remove(cfg.output_path);
    return cfg;
}

Outcome slope(const fs::path& config_dir, const fs::path& work, const std::string& name, double band) {
    const ExperimentConfig cfg = prepare(config_dir, name, work);
    const double theory = rlct_closed_form(cfg.sig).to_double();
    const auto summary = run_experiment(cfg);
    if (!summary.failures.empty())
        return {false, fmt("%zu failed cells, first: %s", summary.failures.size(), summary.failures.front().c_str())};
    const LambdaFit fit = fit_lambda(summary.records);
    const double allowed = std::max(band, 3.0 * fit.se);
    const double err = std::abs(fit.lambda_hat - theory);
    return {err <= allowed, fmt("lambda_hat %.4f se %.4f theory %.4f |err| %.4f <= %.4f", fit.lambda_hat, fit.se,
                                theory, err, allowed)};
}

Outcome wbic(const fs::path& config_dir, const fs::path& work) {
    bool ok = true;
    std::string detail;
    for (const char* name : {"wbic_m1h2", "wbic_m2h2", "wbic_m1h1"}) {
        const ExperimentConfig cfg = prepare(config_dir, name, work);
        const double theory = rlct_closed_form(cfg.sig).to_double();
        const auto summary = run_experiment(cfg);
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& rec : summary.records) {
            if (rec.wbic_lambda) {
                sum += *rec.wbic_lambda;
                ++count;
            }
        }
        const double mean = count > 0 ? sum / static_cast<double>(count) : NAN;
        const bool pass = summary.failures.empty() && count == cfg.replications && std::abs(mean - theory) <= 0.3;
        ok = ok && pass;
        if (!detail.empty()) detail += "; ";
        detail += fmt("(%d,%d,%d) mean %.3f theory %.3f over %zu", cfg.sig.M, cfg.sig.H, cfg.sig.r, mean, theory, count);
    }
    return {ok, detail};
}

Outcome conjugate() {
    const PriorSpec prior;
    const std::size_t n = 20;
    const Count probe{2};
    std::size_t mean_fail = 0, pred_fail = 0;
    double worst = 0.0;
    std::string misses;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto xs = sample(MixtureParams::from_rows({1.0}, {{2.0}}), n, seed);
        double total = 0.0;
        for (const auto& x : xs) total += static_cast<double>(x[0]);
        const double a = prior.shape + total;
        const double b = prior.rate + static_cast<double>(n);

        SamplerSettings s;
        s.seed = seed;
        const auto post = posterior_mcmc(xs, ModelSignature(1, 1, 1), prior, s);

        const auto rate = posterior_rate_mean(post, 0, 0);
        const double z_mean = std::abs(rate.mean - a / b) / rate.se;
        const double nb = std::exp(std::lgamma(a + 2.0) - std::lgamma(a) - std::lgamma(3.0) +
                                   a * std::log(b / (b + 1.0)) - 2.0 * std::log(b + 1.0));
        const auto pred = predictive_estimate(post, probe);
        const double z_pred = std::abs(pred.mean - nb) / pred.se;
        if (!(z_mean <= 3.0)) {
            ++mean_fail;
            misses += fmt(" seed %llu mean z %.2f", static_cast<unsigned long long>(seed), z_mean);
        }
        if (!(z_pred <= 3.0)) {
            ++pred_fail;
            misses += fmt(" seed %llu predictive z %.2f", static_cast<unsigned long long>(seed), z_pred);
        }
        worst = std::max({worst, z_mean, z_pred});
    }
    return {mean_fail == 0 && pred_fail == 0,
            fmt("50 seeds, mean outside 3 SE: %zu, predictive outside 3 SE: %zu, largest |z| %.2f", mean_fail,
                pred_fail, worst) + misses};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks for rlct-lab"};
    std::string config_dir = RLCT_CONFIG_DIR;
    std::string work_dir;
    std::vector<int> only;
    app.add_option("--configs", config_dir, "Directory holding the experiment configs");
    app.add_option("--work", work_dir, "Scratch directory for result files");
    app.add_option("--only", only, "Run only these criteria")->delimiter(',')->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const fs::path work = work_dir.empty() ? fs::temp_directory_path() / "rlct_acceptance" : fs::path(work_dir);
    fs::create_directories(work);

    struct Criterion {
        int id;
        std::string title;
        double max_seconds;
        std::function<Outcome()> run;
    };
    const fs::path cdir(config_dir);
    const std::vector<Criterion> criteria{
        {1, "closed form equals enumeration", 10.0, closed_form_vs_enumeration},
        {2, "polynomial identities", 5.0, [] { return suite(verify_polynomials(kDefaultVerifySeed, 500)); }},
        {3, "variety characterization", 30.0, [] { return suite(verify_variety(kDefaultVerifySeed, 200)); }},
        {4, "ratio-bound probes", 0.0, ratio_probes},
        {5, "singular slope M=1 H=2 r=1", 1800.0, [&] { return slope(cdir, work, "singular_m1h2", 0.19); }},
        {6, "singular slope M=2 H=2 r=1", 1800.0, [&] { return slope(cdir, work, "singular_m2h2", 0.38); }},
        {7, "regular slope M=1 H=1 r=1", 0.0, [&] { return slope(cdir, work, "regular_m1h1", 0.13); }},
        {8, "WBIC cross-check at n=1000", 0.0, [&] { return wbic(cdir, work); }},
        {9, "conjugate oracle", 0.0, conjugate},
    };

    const std::set<int> selected(only.begin(), only.end());
    int failed = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.contains(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.max_seconds > 0.0 && secs > c.max_seconds) {
            o.passed = false;
            o.detail += fmt(" (over the %.0f s budget)", c.max_seconds);
        }
        std::printf("%s criterion %d: %s | %s | %.1f s\n", o.passed ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.passed) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
