#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "rlct/bayes_experiment.hpp"
#include "rlct/error.hpp"
#include "rlct/experiment_io.hpp"
#include "rlct/poisson_model.hpp"
#include "rlct/rlct_calculator.hpp"
#include "rlct/symmetric_polynomials.hpp"
#include "rlct/vandermonde_singularity.hpp"
#include "rlct/verification.hpp"

namespace py = pybind11;
using namespace rlct;

namespace {

using Rows = std::vector<std::vector<double>>;

MixtureParams params(const std::vector<double>& weights, const Rows& rates) {
    return MixtureParams::from_rows(weights, rates);
}

py::dict rlct_dict(const RlctValue& v) {
    py::dict d;
    d["num"] = v.lambda().num();
    d["den"] = v.lambda().den();
    d["value"] = v.to_double();
    d["source"] = to_string(v.source());
    return d;
}

py::dict suite_dict(const SuiteReport& r) {
    py::list checks;
    for (const auto& c : r.checks) {
        py::dict d;
        d["name"] = c.name;
        d["passed"] = c.passed();
        d["instances"] = c.instances;
        d["failures"] = c.failures;
        d["worst"] = c.worst;
        d["threshold"] = c.threshold;
        checks.append(d);
    }
    py::dict out;
    out["suite"] = r.suite;
    out["passed"] = r.passed();
    out["checks"] = checks;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Learning coefficients of Poisson mixtures";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
    py::register_exception<AmbiguityError>(m, "AmbiguityError", PyExc_RuntimeError);
    py::register_exception<TuningError>(m, "TuningError", PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("rlct_closed_form", [](int M, int H, int r) { return rlct_dict(rlct_closed_form(ModelSignature(M, H, r))); },
          py::arg("M"), py::arg("H"), py::arg("r"));
    m.def("regular_reference", [](int M, int H, int r) { return rlct_dict(regular_reference(ModelSignature(M, H, r))); },
          py::arg("M"), py::arg("H"), py::arg("r"));
    m.def(
        "local_lambda",
        [](int r, const std::vector<int>& sizes, int M) { return rlct_dict(local_lambda(PartitionShape{r, sizes}, M)); },
        py::arg("r"), py::arg("sizes"), py::arg("M"));
    m.def(
        "rlct_enumerate",
        [](int M, int H, int r) {
            const auto res = rlct_enumerate(ModelSignature(M, H, r));
            py::list rows;
            for (const auto& row : res.rows) rows.append(py::make_tuple(row.shape.sizes, rlct_dict(row.lambda)));
            py::dict d;
            d["minimum"] = rlct_dict(res.minimum);
            d["argmin"] = res.argmin.sizes;
            d["rows"] = rows;
            return d;
        },
        py::arg("M"), py::arg("H"), py::arg("r"));

    m.def("elem_sym_coeffs", [](const std::vector<double>& b) { return elem_sym_coeffs(b).coeffs; }, py::arg("b"));
    m.def(
        "annihilation_check",
        [](const std::vector<double>& a, const std::vector<double>& b, int n) {
            const auto res = annihilation_check(a, b, n);
            return py::make_tuple(res.residual, res.scale);
        },
        py::arg("a"), py::arg("b"), py::arg("n"));
    m.def("f_coeffs", [](const std::vector<double>& b, int n) { return f_coeffs(b, n); }, py::arg("b"), py::arg("n"));
    m.def(
        "f_coeffs_multi", [](const Rows& b, const std::vector<int>& n) { return f_coeffs_multi(b, n); }, py::arg("b"),
        py::arg("n"));

    m.def(
        "mixture_pmf",
        [](const std::vector<std::int64_t>& x, const std::vector<double>& weights, const Rows& rates) {
            return std::exp(mixture_log_pmf(x, params(weights, rates)));
        },
        py::arg("x"), py::arg("weights"), py::arg("rates"));
    m.def(
        "sample",
        [](const std::vector<double>& weights, const Rows& rates, std::size_t count, std::uint64_t seed) {
            std::vector<std::vector<std::int64_t>> out;
            for (const auto& x : sample(params(weights, rates), count, seed))
                out.emplace_back(x.values().begin(), x.values().end());
            return out;
        },
        py::arg("weights"), py::arg("rates"), py::arg("count"), py::arg("seed"));

    auto pair_fn = [&m](const char* name, double (*fn)(const MixtureParams&, const TrueModel&, double)) {
        m.def(
            name,
            [fn](const std::vector<double>& w, const Rows& b, const std::vector<double>& qw, const Rows& qb,
                 double tol) { return fn(params(w, b), TrueModel(params(qw, qb)), tol); },
            py::arg("weights"), py::arg("rates"), py::arg("true_weights"), py::arg("true_rates"),
            py::arg("tol") = 1e-10);
    };
    pair_fn("log_loss", &log_loss);
    pair_fn("kl_mean_error", &kl_mean_error);
    pair_fn("sq_surrogate", &sq_surrogate);

    m.def(
        "h_function",
        [](const std::vector<double>& w, const Rows& b, const std::vector<double>& qw, const Rows& qb) {
            return h_function(VandermondeInstance(params(w, b), TrueModel(params(qw, qb))));
        },
        py::arg("weights"), py::arg("rates"), py::arg("true_weights"), py::arg("true_rates"));
    m.def(
        "variety_membership",
        [](const std::vector<double>& w, const Rows& b, const std::vector<double>& qw, const Rows& qb, double tol) {
            const auto res = variety_membership(VandermondeInstance(params(w, b), TrueModel(params(qw, qb))), tol);
            std::vector<std::string> violations;
            for (const auto& v : res.violations) violations.push_back(v.describe());
            py::dict d;
            d["member"] = res.member;
            d["inv"] = res.inv.inv;
            d["inv0"] = res.inv.inv0;
            d["violations"] = violations;
            return d;
        },
        py::arg("weights"), py::arg("rates"), py::arg("true_weights"), py::arg("true_rates"),
        py::arg("tol") = kDefaultRateMatchTol);

    m.def(
        "posterior_rate_mean",
        [](const std::vector<std::vector<std::int64_t>>& data, int H, std::size_t iterations, std::size_t burn_in,
           std::uint64_t seed) {
            std::vector<Count> xs;
            for (const auto& x : data) xs.emplace_back(x);
            SamplerSettings s;
            s.iterations = iterations;
            s.burn_in = burn_in;
            s.seed = seed;
            const auto dim = static_cast<int>(xs.at(0).dim());
            const auto samples = posterior_mcmc(xs, ModelSignature(dim, H, 1), PriorSpec{}, s);
            std::vector<std::vector<double>> means(static_cast<std::size_t>(H), std::vector<double>(xs[0].dim()));
            for (std::size_t k = 0; k < means.size(); ++k) {
                for (std::size_t j = 0; j < xs[0].dim(); ++j) means[k][j] = posterior_rate_mean(samples, k, j).mean;
            }
            return means;
        },
        py::arg("data"), py::arg("H"), py::arg("iterations") = 3000, py::arg("burn_in") = 1000, py::arg("seed") = 1);

    m.def(
        "run_experiment",
        [](const std::string& config_json, std::size_t threads) {
            const auto cfg = parse_config(config_json);
            ExperimentSummary summary;
            {
                py::gil_scoped_release release;
                summary = run_experiment(cfg, threads);
            }
            py::dict d;
            d["cells_run"] = summary.cells_run;
            d["cells_skipped"] = summary.cells_skipped;
            d["failures"] = summary.failures;
            return d;
        },
        py::arg("config_json"), py::arg("threads") = 0);
    m.def(
        "fit_lambda",
        [](const std::string& csv_path) {
            const auto fit = fit_lambda(read_records(csv_path));
            return py::make_tuple(fit.lambda_hat, fit.se);
        },
        py::arg("csv_path"));
    m.def("config_hash", [](const std::string& config_json) { return config_hash(parse_config(config_json)); },
          py::arg("config_json"));

    m.def("verify_polynomials", [](std::uint64_t seed) { return suite_dict(verify_polynomials(seed)); },
          py::arg("seed") = kDefaultVerifySeed);
    m.def("verify_variety", [](std::uint64_t seed) { return suite_dict(verify_variety(seed)); },
          py::arg("seed") = kDefaultVerifySeed);
    m.def("verify_ratio", [](std::uint64_t seed) { return suite_dict(verify_ratio(seed)); },
          py::arg("seed") = kDefaultVerifySeed);
}
