#include "rlct/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rlct/bayes_experiment.hpp"
#include "rlct/error.hpp"
#include "rlct/experiment_io.hpp"
#include "rlct/rlct_calculator.hpp"
#include "rlct/vandermonde_singularity.hpp"
#include "rlct/verification.hpp"

namespace rlct::cli {

using nlohmann::json;

namespace {

json rational_json(const Rational& q) {
    return {{"num", q.num()}, {"den", q.den()}, {"value", q.to_double()}, {"text", q.str()}};
}

// JSON has no infinities; non-finite values become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int cmd_rlct(int M, int H, int r, std::ostream& out) {
    const ModelSignature sig(M, H, r);
    const RlctValue lambda = rlct_closed_form(sig);
    const RlctValue half_d = regular_reference(sig);
    out << json{{"M", M},
                {"H", H},
                {"r", r},
                {"lambda_num", lambda.lambda().num()},
                {"lambda_den", lambda.lambda().den()},
                {"lambda", lambda.to_double()},
                {"lambda_text", lambda.lambda().str()},
                {"d_half", half_d.to_double()},
                {"d_half_text", half_d.lambda().str()},
                {"branch", M == 1 ? "M=1" : "M>1"}}
               .dump(2)
        << '\n';
    return kOk;
}

int cmd_enumerate(int M, int H, int r, std::ostream& out) {
    const ModelSignature sig(M, H, r);
    const EnumerationResult res = rlct_enumerate(sig);
    json rows = json::array();
    for (const auto& row : res.rows) {
        rows.push_back({{"sizes", row.shape.sizes},
                        {"ghost_groups", row.shape.groups() - row.shape.r},
                        {"lambda", rational_json(row.lambda.lambda())},
                        {"is_min", row.lambda == res.minimum}});
    }
    out << json{{"M", M},
                {"H", H},
                {"r", r},
                {"minimum", rational_json(res.minimum.lambda())},
                {"argmin", res.argmin.sizes},
                {"closed_form", rational_json(rlct_closed_form(sig).lambda())},
                {"matches_closed_form", res.minimum == rlct_closed_form(sig)},
                {"rows", rows}}
               .dump(2)
        << '\n';
    return kOk;
}

json report_json(const SuiteReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"name", c.name},
                          {"passed", c.passed()},
                          {"instances", c.instances},
                          {"failures", c.failures},
                          {"worst", number(c.worst)},
                          {"threshold", c.threshold},
                          {"notes", c.notes}});
    }
    json j{{"suite", report.suite},
           {"seed", report.seed},
           {"passed", report.passed()},
           {"seconds", report.seconds},
           {"checks", checks}};
    if (!report.probes.empty()) {
        json probes = json::array();
        for (const auto& p : report.probes) {
            probes.push_back({{"M", p.M},
                              {"H", p.H},
                              {"r", p.r},
                              {"point", p.point},
                              {"comparison", p.comparison},
                              {"sizes", p.sizes},
                              {"ratio_interval", {number(p.min_ratio), number(p.max_ratio)}},
                              {"spread_growth", number(p.spread_growth)}});
        }
        j["probes"] = probes;
    }
    return j;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::ostream& out) {
    std::vector<SuiteReport> reports;
    if (suite == "polynomials" || suite == "all") reports.push_back(verify_polynomials(seed));
    if (suite == "variety" || suite == "all") reports.push_back(verify_variety(seed));
    if (suite == "ratio" || suite == "all") reports.push_back(verify_ratio(seed));
    bool ok = true;
    json suites = json::array();
    for (const auto& r : reports) {
        ok = ok && r.passed();
        suites.push_back(report_json(r));
    }
    out << json{{"passed", ok}, {"suites", suites}}.dump(2) << '\n';
    return ok ? kOk : kFailure;
}

MixtureParams params_from_json(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("weights") || !j.contains("rates"))
        throw ConfigError(std::string("variety: ") + what + " needs \"weights\" and \"rates\"");
    try {
        return MixtureParams::from_rows(j.at("weights").get<std::vector<double>>(),
                                        j.at("rates").get<std::vector<std::vector<double>>>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("variety: malformed ") + what + ": " + e.what());
    }
}

int cmd_variety(const std::string& path, std::ostream& out) {
    std::ifstream in(path);
    if (!in) throw ConfigError("variety: cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("variety: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("model") || !doc.contains("truth"))
        throw ConfigError("variety: point file needs \"model\" and \"truth\"");
    const double tol = doc.value("tol", kDefaultRateMatchTol);
    const VandermondeInstance inst(params_from_json(doc["model"], "model"), TrueModel(params_from_json(doc["truth"], "truth")));
    const MembershipResult res = variety_membership(inst, tol);

    json inv = json::array();
    for (const auto& set : res.inv.inv) {
        json s = json::array();
        for (auto k : set) s.push_back(k + 1);
        inv.push_back(s);
    }
    json inv0 = json::array();
    for (auto k : res.inv.inv0) inv0.push_back(k + 1);
    json violations = json::array();
    for (const auto& v : res.violations) violations.push_back(v.describe());
    out << json{{"member", res.member},
                {"inv", inv},
                {"inv0", inv0},
                {"violations", violations},
                {"h", h_function(inst)},
                {"max_exponent", inst.max_exponent()},
                {"tol", tol}}
               .dump(2)
        << '\n';
    return kOk;
}

int cmd_simulate(const std::string& config_path, const std::string& output, std::optional<std::uint64_t> seed,
                 std::size_t threads, bool verbose, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg = load_config(config_path);
    if (!output.empty()) cfg.output_path = output;
    if (seed) cfg.sampler.seed = *seed;
    const ExperimentSummary summary = run_experiment(cfg, threads);
    for (const auto& f : summary.failures) err << "cell failed: " << f << '\n';
    if (verbose) {
        std::int64_t ms = 0;
        for (const auto& rec : summary.records) ms += rec.wall_ms;
        err << "cells run " << summary.cells_run << ", skipped " << summary.cells_skipped << ", cell time " << ms
            << " ms\n";
    }
    out << json{{"config_hash", config_hash(cfg)},
                {"output_path", cfg.output_path},
                {"cells_run", summary.cells_run},
                {"cells_skipped", summary.cells_skipped},
                {"records", summary.records.size()},
                {"failures", summary.failures}}
               .dump(2)
        << '\n';
    return summary.failures.empty() ? kOk : kPartial;
}

int cmd_fit(const std::string& csv_path, std::string plot_path, std::ostream& out) {
    const auto records = read_records(csv_path);
    if (records.empty()) throw ConfigError("fit: " + csv_path + " has no rows");
    const auto& first = records.front();
    for (const auto& rec : records) {
        if (rec.config_hash != first.config_hash || rec.M != first.M || rec.H != first.H || rec.r != first.r)
            throw ConfigError("fit: " + csv_path + " mixes results of different configs");
    }
    const LambdaFit fit = fit_lambda(records);
    const double theory = rlct_closed_form(ModelSignature(first.M, first.H, first.r)).to_double();
    double z = 0.0;
    if (fit.se > 0.0) {
        z = (fit.lambda_hat - theory) / fit.se;
    } else if (fit.lambda_hat != theory) {
        z = fit.lambda_hat > theory ? HUGE_VAL : -HUGE_VAL;
    }

    if (plot_path.empty()) {
        std::filesystem::path p(csv_path);
        plot_path = (p.parent_path() / (p.stem().string() + "_plot.csv")).string();
    }
    std::ofstream plot(plot_path);
    if (!plot) throw ConfigError("fit: cannot write " + plot_path);
    plot << "inv_n,mean_delta_gn\n";
    plot.precision(17);
    json points = json::array();
    for (const auto& p : fit.points) {
        plot << p.inv_n << ',' << p.mean_delta << '\n';
        points.push_back({{"n", p.n}, {"reps", p.reps}, {"inv_n", p.inv_n}, {"mean_delta_gn", p.mean_delta},
                          {"se", p.se_delta}});
    }

    json j{{"lambda_hat", fit.lambda_hat},
           {"se", fit.se},
           {"lambda_theory", theory},
           {"z_score", number(z)},
           {"M", first.M},
           {"H", first.H},
           {"r", first.r},
           {"config_hash", first.config_hash},
           {"plot_path", plot_path},
           {"points", points}};
    double wbic = 0.0;
    std::size_t wbic_count = 0;
    for (const auto& rec : records) {
        if (rec.wbic_lambda) {
            wbic += *rec.wbic_lambda;
            ++wbic_count;
        }
    }
    if (wbic_count > 0) j["wbic_lambda_mean"] = wbic / static_cast<double>(wbic_count);
    out << j.dump(2) << '\n';
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Learning coefficients of Poisson mixtures: exact values, identity checks and simulations",
                 "rlct-lab"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Progress and timing on stderr");

    int M = 1, H = 1, r = 1;
    auto add_signature = [&](CLI::App* sub) {
        sub->add_option("--M", M, "Data dimension")->required()->check(CLI::PositiveNumber);
        sub->add_option("--H", H, "Model components")->required()->check(CLI::PositiveNumber);
        sub->add_option("--r", r, "True components")->required()->check(CLI::PositiveNumber);
    };
    auto* rlct_cmd = app.add_subcommand("rlct", "Closed-form learning coefficient and the regular baseline d/2");
    add_signature(rlct_cmd);
    auto* enum_cmd = app.add_subcommand("enumerate", "Local coefficient of every partition and their minimum");
    add_signature(enum_cmd);

    std::string suite = "all";
    std::uint64_t verify_seed = kDefaultVerifySeed;
    auto* verify_cmd = app.add_subcommand("verify", "Run the identity and property suites");
    verify_cmd->add_option("suite", suite, "polynomials | variety | ratio | all")
        ->check(CLI::IsMember({"polynomials", "variety", "ratio", "all"}));
    verify_cmd->add_option("--seed", verify_seed, "Seed of the random instances");

    std::string point_path;
    auto* variety_cmd = app.add_subcommand("variety", "Membership certificate for one parameter point");
    variety_cmd->add_option("point", point_path, "JSON file with \"model\", \"truth\" and optional \"tol\"")
        ->required()
        ->check(CLI::ExistingFile);

    std::string config_path, output_path;
    std::optional<std::uint64_t> seed_override;
    std::size_t threads = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Run (or resume) an experiment grid");
    sim_cmd->add_option("config", config_path, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("-o,--output", output_path, "Override the config's output_path");
    sim_cmd->add_option("--seed", seed_override, "Override the sampler seed");
    sim_cmd->add_option("-j,--threads", threads, "Worker threads (default: hardware, capped by RLCT_LAB_THREADS)");

    std::string csv_path, plot_path;
    auto* fit_cmd = app.add_subcommand("fit", "Fit lambda from an experiment CSV");
    fit_cmd->add_option("csv", csv_path, "Experiment results")->required()->check(CLI::ExistingFile);
    fit_cmd->add_option("--plot", plot_path, "Plot data output (default: <csv stem>_plot.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*rlct_cmd) return cmd_rlct(M, H, r, out);
        if (*enum_cmd) return cmd_enumerate(M, H, r, out);
        if (*verify_cmd) return cmd_verify(suite, verify_seed, out);
        if (*variety_cmd) return cmd_variety(point_path, out);
        if (*sim_cmd) return cmd_simulate(config_path, output_path, seed_override, threads, verbose, out, err);
        if (*fit_cmd) return cmd_fit(csv_path, plot_path, out);
    } catch (const BudgetExceeded& e) {
        err << e.what() << '\n';
        return kBudget;
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace rlct::cli
