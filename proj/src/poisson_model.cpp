#include "rlct/poisson_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rlct/error.hpp"
#include "rlct/random.hpp"
#include "rlct/special.hpp"

namespace rlct {

RateVector::RateVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("RateVector: dimension must be at least 1");
    for (double v : values_) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("RateVector: rates must be finite and > 0");
    }
}

Count::Count(std::vector<std::int64_t> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("Count: dimension must be at least 1");
    for (auto v : values_) {
        if (v < 0) throw DomainError("Count: entries must be >= 0");
    }
}

MixtureParams::MixtureParams(std::vector<double> weights, std::vector<RateVector> rates)
    : weights_(std::move(weights)), rates_(std::move(rates)) {
    if (weights_.empty()) throw DomainError("MixtureParams: need at least one component");
    if (weights_.size() != rates_.size()) throw DomainError("MixtureParams: weights/rates size mismatch");
    const std::size_t m = rates_.front().dim();
    double total = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        if (!(weights_[k] >= 0.0) || !std::isfinite(weights_[k]))
            throw DomainError("MixtureParams: weights must be finite and >= 0");
        if (rates_[k].dim() != m) throw DomainError("MixtureParams: rate vectors must share a dimension");
        total += weights_[k];
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance)
        throw DomainError("MixtureParams: weights must sum to 1 (got " + std::to_string(total) + ")");
}

MixtureParams MixtureParams::from_rows(std::vector<double> weights, const std::vector<std::vector<double>>& rows) {
    std::vector<RateVector> rates;
    rates.reserve(rows.size());
    for (const auto& row : rows) rates.emplace_back(row);
    return MixtureParams(std::move(weights), std::move(rates));
}

std::vector<std::vector<double>> MixtureParams::rate_rows() const {
    std::vector<std::vector<double>> rows;
    rows.reserve(rates_.size());
    for (const auto& r : rates_) rows.emplace_back(r.values().begin(), r.values().end());
    return rows;
}

double MixtureParams::max_rate() const {
    double hi = 0.0;
    for (const auto& r : rates_) {
        for (double v : r.values()) hi = std::max(hi, v);
    }
    return hi;
}

MixtureParams MixtureParams::permuted(std::span<const std::size_t> perm) const {
    if (perm.size() != components()) throw DomainError("permuted: permutation size mismatch");
    std::vector<double> w;
    std::vector<RateVector> b;
    for (auto k : perm) {
        w.push_back(weights_.at(k));
        b.push_back(rates_.at(k));
    }
    return MixtureParams(std::move(w), std::move(b));
}

TrueModel::TrueModel(MixtureParams params) : params_(std::move(params)) {
    const std::size_t r = params_.components();
    for (std::size_t k = 0; k < r; ++k) {
        if (!(params_.weight(k) > 0.0)) throw DomainError("TrueModel: true weights must be strictly positive");
    }
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = i + 1; j < r; ++j) {
            double dist = 0.0;
            for (std::size_t m = 0; m < params_.dim(); ++m)
                dist = std::max(dist, std::abs(params_.rate(i, m) - params_.rate(j, m)));
            if (dist <= kMinSeparation) throw DomainError("TrueModel: true rate vectors must be pairwise distinct");
        }
    }
}

std::size_t Lattice::size() const {
    std::size_t n = 1;
    for (std::size_t m = 0; m < dim; ++m) n *= side();
    return n;
}

Count Lattice::point(std::size_t idx) const {
    std::vector<std::int64_t> x(dim);
    for (std::size_t m = dim; m-- > 0;) {
        x[m] = static_cast<std::int64_t>(idx % side());
        idx /= side();
    }
    return Count(std::move(x));
}

Lattice make_lattice(double max_rate, std::size_t components, std::size_t dim, double tol) {
    if (!(tol > 0.0) || tol > 1e-6) throw DomainError("lattice tolerance must lie in (0, 1e-6]");
    if (!(max_rate > 0.0)) throw DomainError("lattice: max rate must be positive");
    if (components == 0 || dim == 0) throw DomainError("lattice: empty model");
    const double threshold = tol / static_cast<double>(components * dim);
    auto x = static_cast<std::int64_t>(std::floor(max_rate));
    while (poisson_upper_tail(x, max_rate) >= threshold) ++x;
    Lattice lat;
    lat.dim = dim;
    lat.x_max = x;
    lat.tail_bound = static_cast<double>(dim) * poisson_upper_tail(x, max_rate);
    return lat;
}

Lattice make_lattice(const MixtureParams& w, const TrueModel& q, double tol) {
    if (w.dim() != q.dim()) throw DomainError("model and truth dimensions differ");
    return make_lattice(std::max(w.max_rate(), q.params().max_rate()), w.components(), w.dim(), tol);
}

double poisson_log_pmf(std::int64_t x, double rate) {
    if (!(rate > 0.0)) throw DomainError("poisson_pmf: rate must be > 0");
    if (x < 0) throw DomainError("poisson_pmf: count must be >= 0");
    return static_cast<double>(x) * std::log(rate) - rate - log_factorial(x);
}

double poisson_pmf(std::int64_t x, double rate) { return std::exp(poisson_log_pmf(x, rate)); }

double mixture_log_pmf(std::span<const std::int64_t> x, const MixtureParams& w) {
    if (x.size() != w.dim()) throw DomainError("mixture_log_pmf: dimension mismatch");
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(w.components());
    for (std::size_t k = 0; k < w.components(); ++k) {
        if (w.weight(k) <= 0.0) continue;
        double lp = std::log(w.weight(k));
        for (std::size_t m = 0; m < x.size(); ++m) lp += poisson_log_pmf(x[m], w.rate(k, m));
        terms.push_back(lp);
        hi = std::max(hi, lp);
    }
    if (terms.empty()) throw DomainError("mixture_log_pmf: all weights are zero");
    return log_sum_exp(terms);
}

double mixture_log_pmf(const Count& x, const MixtureParams& w) { return mixture_log_pmf(x.values(), w); }

void lattice_log_pmf(std::span<const double> weights, std::span<const double> rates, const Lattice& lattice,
                     std::span<double> out) {
    const std::size_t h = weights.size();
    const std::size_t dim = lattice.dim;
    if (h == 0 || rates.size() != h * dim) throw DomainError("lattice_log_pmf: weights/rates shape mismatch");
    if (out.size() != lattice.size()) throw DomainError("lattice_log_pmf: output size mismatch");
    const std::size_t side = lattice.side();

    // Per active component: log a_k and a dim x side table of coordinate log pmfs.
    thread_local std::vector<double> log_weight;
    thread_local std::vector<double> coord;  // [active][m][x]
    log_weight.clear();
    coord.clear();
    for (std::size_t k = 0; k < h; ++k) {
        if (weights[k] <= 0.0) continue;
        log_weight.push_back(std::log(weights[k]));
        for (std::size_t m = 0; m < dim; ++m) {
            const double b = rates[k * dim + m];
            const double lb = std::log(b);
            for (std::size_t x = 0; x < side; ++x)
                coord.push_back(static_cast<double>(x) * lb - b - log_factorial(static_cast<std::int64_t>(x)));
        }
    }
    const std::size_t active = log_weight.size();
    if (active == 0) throw DomainError("lattice_log_pmf: all weights are zero");

    const std::size_t stride = dim * side;
    thread_local std::vector<double> terms;
    terms.resize(active);
    std::vector<std::size_t> idx(dim, 0);
    for (std::size_t p = 0; p < out.size(); ++p) {
        double hi = -std::numeric_limits<double>::infinity();
        double* t = terms.data();
        for (std::size_t k = 0; k < active; ++k) {
            double lp = log_weight[k];
            const double* c = &coord[k * stride];
            for (std::size_t m = 0; m < dim; ++m) lp += c[m * side + idx[m]];
            t[k] = lp;
            hi = std::max(hi, lp);
        }
        if (active == 1) {
            out[p] = t[0];
        } else {
            double acc = 0.0;
            for (std::size_t k = 0; k < active; ++k) acc += std::exp(t[k] - hi);
            out[p] = hi + std::log(acc);
        }
        for (std::size_t m = dim; m-- > 0;) {
            if (++idx[m] < side) break;
            idx[m] = 0;
        }
    }
}

std::vector<double> lattice_log_pmf(const MixtureParams& w, const Lattice& lattice) {
    if (w.dim() != lattice.dim) throw DomainError("lattice_log_pmf: dimension mismatch");
    std::vector<double> rates;
    rates.reserve(w.components() * w.dim());
    for (const auto& r : w.rates()) rates.insert(rates.end(), r.values().begin(), r.values().end());
    std::vector<double> out(lattice.size());
    lattice_log_pmf(w.weights(), rates, lattice, out);
    return out;
}

std::vector<Count> sample(const MixtureParams& w, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw DomainError("sample: count must be >= 1");
    RandomStream rng(seed);
    std::vector<Count> out;
    out.reserve(count);
    std::vector<std::int64_t> x(w.dim());
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t k = rng.categorical(w.weights());
        for (std::size_t m = 0; m < w.dim(); ++m) x[m] = rng.poisson(w.rate(k, m));
        out.emplace_back(x);
    }
    return out;
}

double log_loss(const MixtureParams& w, const TrueModel& q, double tol) {
    const Lattice lat = make_lattice(w, q, tol);
    const auto lp = lattice_log_pmf(w, lat);
    const auto lq = lattice_log_pmf(q.params(), lat);
    double loss = 0.0;
    for (std::size_t i = 0; i < lp.size(); ++i) loss -= std::exp(lq[i]) * lp[i];
    return loss;
}

double kl_mean_error(const MixtureParams& w, const TrueModel& q, double tol) {
    const Lattice lat = make_lattice(w, q, tol);
    const auto lp = lattice_log_pmf(w, lat);
    const auto lq = lattice_log_pmf(q.params(), lat);
    double kl = 0.0;
    double q_mass = 0.0;
    double diff_mass = 0.0;  // sum over the box of p - q
    for (std::size_t i = 0; i < lp.size(); ++i) {
        const double qi = std::exp(lq[i]);
        const double d = lp[i] - lq[i];
        kl += qi * expm1_minus_identity(d);
        q_mass += qi;
        diff_mass += qi * std::expm1(d);
    }
    // Lumped tail bin: masses Q_T and P_T = Q_T - diff_mass. Below rounding
    // level of 1 - q_mass the bin carries no information and is dropped.
    const double q_tail = 1.0 - q_mass;
    if (q_tail > 1e-14) {
        const double p_tail = q_tail - diff_mass;
        if (p_tail > 0.0) kl += q_tail * expm1_minus_identity(std::log(p_tail / q_tail));
    }
    return std::max(kl, 0.0);
}

double sq_surrogate(const MixtureParams& w, const TrueModel& q, double tol) {
    const Lattice lat = make_lattice(w, q, tol);
    const auto lp = lattice_log_pmf(w, lat);
    const auto lq = lattice_log_pmf(q.params(), lat);
    double acc = 0.0;
    for (std::size_t i = 0; i < lp.size(); ++i) {
        const double diff = std::exp(lq[i]) * std::expm1(lp[i] - lq[i]);
        acc += diff * diff;
    }
    return acc;
}

}  // namespace rlct
