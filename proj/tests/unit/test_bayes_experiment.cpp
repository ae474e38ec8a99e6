#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "rlct/bayes_experiment.hpp"
#include "rlct/error.hpp"
#include "rlct/experiment_io.hpp"
#include "rlct/random.hpp"

using namespace rlct;

namespace {

ExperimentRecord record(std::size_t n, std::size_t rep, double delta) {
    ExperimentRecord r;
    r.config_hash = "0000000000000001";
    r.n = n;
    r.rep = rep;
    r.l0 = 1.5;
    r.gn = 1.5 + delta;
    return r;
}

ExperimentConfig small_config(const std::string& path) {
    ExperimentConfig cfg;
    cfg.sig = ModelSignature(1, 2, 1);
    cfg.truth = TrueModel(MixtureParams::from_rows({1.0}, {{2.0}}));
    cfg.n_grid = {20, 40, 80};
    cfg.replications = 3;
    cfg.sampler.chains = 2;
    cfg.sampler.iterations = 600;
    cfg.sampler.burn_in = 200;
    cfg.sampler.seed = 3;
    cfg.output_path = path;
    return cfg;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_wall(const std::string& csv) {
    std::stringstream in(csv), out;
    std::string line;
    while (std::getline(in, line)) out << line.substr(0, line.rfind(',')) << '\n';
    return out.str();
}

}  // namespace

TEST_CASE("fit through the origin") {
    SUBCASE("exact data") {
        std::vector<ExperimentRecord> recs;
        for (std::size_t n : {10, 20, 40, 80})
            for (std::size_t rep = 0; rep < 3; ++rep) recs.push_back(record(n, rep, 2.0 / static_cast<double>(n)));
        const auto fit = fit_lambda(recs);
        CHECK(fit.lambda_hat == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(fit.se == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(fit.points.size() == 4);
        CHECK(fit.points.front().n == 10);
        CHECK(fit.points.front().reps == 3);
    }
    SUBCASE("noisy data recovers the slope") {
        RandomStream rng(8, 0);
        std::vector<ExperimentRecord> recs;
        for (std::size_t n : {50, 100, 200, 400, 800})
            for (std::size_t rep = 0; rep < 400; ++rep)
                recs.push_back(record(n, rep, (0.75 + 0.3 * rng.normal()) / static_cast<double>(n)));
        const auto fit = fit_lambda(recs);
        CHECK(fit.se > 0.0);
        CHECK(fit.se < 0.02);
        CHECK(std::abs(fit.lambda_hat - 0.75) < 4.0 * fit.se);
    }
    SUBCASE("degenerate inputs") {
        std::vector<ExperimentRecord> one_n{record(10, 0, 0.1), record(10, 1, 0.2)};
        CHECK_THROWS_AS(fit_lambda(one_n), DomainError);
        std::vector<ExperimentRecord> one_rep{record(10, 0, 0.1), record(20, 0, 0.2), record(40, 0, 0.1)};
        CHECK_THROWS_AS(fit_lambda(one_rep), DomainError);
        std::vector<ExperimentRecord> mixed{record(10, 0, 0.1), record(10, 1, 0.1), record(20, 0, 0.1),
                                            record(20, 1, 0.2), record(40, 0, 0.1), record(40, 1, 0.3)};
        CHECK_THROWS_AS(fit_lambda(mixed), DomainError);
    }
}

TEST_CASE("cell seeds") {
    CHECK(cell_seed(1, 100, 0) != cell_seed(1, 100, 1));
    CHECK(cell_seed(1, 100, 0) != cell_seed(1, 200, 0));
    CHECK((cell_seed(1, 100, 3) ^ cell_seed(2, 100, 3)) == 3);
}

TEST_CASE("config validation") {
    auto cfg = small_config("x.csv");
    CHECK_NOTHROW(cfg.validate());
    cfg.replications = 1;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = small_config("x.csv");
    cfg.truth = TrueModel(MixtureParams::from_rows({1.0}, {{50.0}}));
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = small_config("x.csv");
    cfg.truncation_tol = 1e-3;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("single cell") {
    const auto cfg = small_config("unused.csv");
    const auto a = run_cell(cfg, 40, 1);
    const auto b = run_cell(cfg, 40, 1);
    CHECK(a.gn == b.gn);
    CHECK(a.seed == cell_seed(3, 40, 1));
    CHECK(a.l0 == doctest::Approx(log_loss(embed_truth(cfg.truth, 2), cfg.truth, cfg.truncation_tol)));
    CHECK(a.gn > a.l0);
    CHECK_FALSE(a.wbic_lambda.has_value());
    CHECK(a.config_hash == config_hash(cfg));
}

TEST_CASE("wbic estimate") {
    const TrueModel q(MixtureParams::from_rows({1.0}, {{2.0}}));
    const CountData data(sample(q.params(), 200, 5));
    SamplerSettings s;
    s.chains = 2;
    s.iterations = 2000;
    s.burn_in = 500;
    s.seed = 9;
    const auto res = wbic_lambda(data, ModelSignature(1, 1, 1), PriorSpec{}, s, q);
    CHECK(res.beta == doctest::Approx(1.0 / std::log(200.0)));
    CHECK(res.wbic >= res.reference_nll);
    CHECK(res.lambda_hat > 0.1);
    CHECK(res.lambda_hat < 1.5);
    CHECK_THROWS_AS(wbic_lambda(CountData(sample(q.params(), 10, 5)), ModelSignature(1, 1, 1), PriorSpec{}, s, q),
                    DomainError);
}

TEST_CASE("experiment grid, resume and determinism") {
    const auto dir = std::filesystem::temp_directory_path() / "rlct_experiment_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto first = (dir / "a.csv").string();
    const auto second = (dir / "b.csv").string();

    auto cfg = small_config(first);
    const auto full = run_experiment(cfg, 2);
    CHECK(full.failures.empty());
    CHECK(full.cells_run == 9);
    CHECK(full.records.size() == 9);
    CHECK(full.records.front().n == 20);
    CHECK(full.records.back().n == 80);
    CHECK(full.records.back().rep == 2);

    const auto again = run_experiment(cfg, 2);
    CHECK(again.cells_run == 0);
    CHECK(again.cells_skipped == 9);
    CHECK(read_records(first).size() == 9);

    // Interrupted run: keep the header and three rows, then resume.
    cfg.output_path = second;
    {
        std::stringstream in(read_file(first));
        std::ofstream out(second);
        std::string line;
        for (int i = 0; i < 4 && std::getline(in, line); ++i) out << line << '\n';
    }
    const auto resumed = run_experiment(cfg, 1);
    CHECK(resumed.cells_skipped == 3);
    CHECK(resumed.cells_run == 6);
    CHECK(strip_wall(read_file(first)) == strip_wall(read_file(second)));

    auto other = small_config(first);
    other.sampler.seed = 4;
    CHECK_THROWS_AS(run_experiment(other, 1), ConfigError);

    other.output_path = "";
    CHECK_THROWS_AS(run_experiment(other, 1), ConfigError);
    std::filesystem::remove_all(dir);
}
