#include "rlct/vandermonde_singularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rlct/error.hpp"
#include "rlct/random.hpp"

namespace rlct {

namespace {

// pow_table[m * (max_exp + 1) + e] = rate[m]^e
std::vector<double> power_table(const RateVector& rate, int max_exp) {
    const auto side = static_cast<std::size_t>(max_exp + 1);
    std::vector<double> t(rate.dim() * side);
    for (std::size_t m = 0; m < rate.dim(); ++m) {
        double p = 1.0;
        for (std::size_t e = 0; e < side; ++e) {
            t[m * side + e] = p;
            p *= rate[m];
        }
    }
    return t;
}

struct WeightedRate {
    double weight;
    const RateVector* rate;
};

// sum over l in [0:max_exp]^M of (sum_i w_i b_i^l)^2.
double vandermonde_sum(std::span<const WeightedRate> terms, std::size_t dim, int max_exp) {
    if (max_exp < 0 || terms.empty()) return 0.0;
    const auto side = static_cast<std::size_t>(max_exp + 1);
    std::vector<std::vector<double>> powers;
    powers.reserve(terms.size());
    for (const auto& t : terms) powers.push_back(power_table(*t.rate, max_exp));

    std::size_t total = 1;
    for (std::size_t m = 0; m < dim; ++m) total *= side;
    std::vector<std::size_t> idx(dim, 0);
    double acc = 0.0;
    for (std::size_t p = 0; p < total; ++p) {
        double g = 0.0;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            double mono = terms[k].weight;
            for (std::size_t m = 0; m < dim; ++m) mono *= powers[k][m * side + idx[m]];
            g += mono;
        }
        acc += g * g;
        for (std::size_t m = dim; m-- > 0;) {
            if (++idx[m] < side) break;
            idx[m] = 0;
        }
    }
    return acc;
}

double linf_distance(const RateVector& a, const RateVector& b) {
    double d = 0.0;
    for (std::size_t m = 0; m < a.dim(); ++m) d = std::max(d, std::abs(a[m] - b[m]));
    return d;
}

}  // namespace

VandermondeInstance::VandermondeInstance(MixtureParams model, TrueModel truth)
    : model_(std::move(model)), truth_(std::move(truth)) {
    if (model_.dim() != truth_.dim()) throw DomainError("VandermondeInstance: model and truth dimensions differ");
    if (model_.components() < truth_.components())
        throw DomainError("VandermondeInstance: requires H >= r");
}

double vandermonde_form(const MixtureParams& model, const TrueModel& truth, int max_exponent) {
    if (model.dim() != truth.dim()) throw DomainError("vandermonde_form: dimension mismatch");
    std::vector<WeightedRate> terms;
    for (std::size_t k = 0; k < model.components(); ++k) terms.push_back({model.weight(k), &model.rate(k)});
    const auto& q = truth.params();
    for (std::size_t k = 0; k < q.components(); ++k) terms.push_back({-q.weight(k), &q.rate(k)});
    return vandermonde_sum(terms, model.dim(), max_exponent);
}

double h_function(const VandermondeInstance& inst) {
    return vandermonde_form(inst.model(), inst.truth(), inst.max_exponent());
}

InvSets compute_inv_sets(const VandermondeInstance& inst, double tol) {
    if (!(tol > 0.0)) throw DomainError("compute_inv_sets: tol must be > 0");
    const auto& model = inst.model();
    const auto& truth = inst.truth().params();
    InvSets out;
    out.inv.resize(truth.components());
    for (std::size_t kp = 0; kp < model.components(); ++kp) {
        std::size_t matched = truth.components();
        for (std::size_t k = 0; k < truth.components(); ++k) {
            bool all = true;
            for (std::size_t m = 0; m < model.dim() && all; ++m)
                all = std::abs(model.rate(kp, m) - truth.rate(k, m)) <= tol;
            if (!all) continue;
            if (matched != truth.components()) {
                std::ostringstream msg;
                msg << "compute_inv_sets: model component " << kp << " matches true components " << matched
                    << " and " << k << " within tol " << tol;
                throw AmbiguityError(msg.str());
            }
            matched = k;
        }
        if (matched == truth.components()) {
            out.inv0.push_back(kp);
        } else {
            out.inv[matched].push_back(kp);
        }
    }
    return out;
}

std::string MembershipViolation::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::EmptyInv: os << "Inv_" << index + 1 << " is empty"; break;
        case Kind::WeightMismatch:
            os << "sum of weights on Inv_" << index + 1 << " differs from a*_" << index + 1 << " by " << value;
            break;
        case Kind::GhostWeight: os << "component " << index + 1 << " in Inv_0 has weight " << value; break;
    }
    return os.str();
}

MembershipResult variety_membership(const VandermondeInstance& inst, double tol) {
    MembershipResult out;
    out.inv = compute_inv_sets(inst, tol);
    const auto& model = inst.model();
    const auto& truth = inst.truth().params();
    using Kind = MembershipViolation::Kind;
    for (std::size_t i = 0; i < truth.components(); ++i) {
        if (out.inv.inv[i].empty()) {
            out.violations.push_back({Kind::EmptyInv, i, 0.0});
            continue;
        }
        double mass = 0.0;
        for (auto j : out.inv.inv[i]) mass += model.weight(j);
        const double gap = std::abs(mass - truth.weight(i));
        if (gap > tol) out.violations.push_back({Kind::WeightMismatch, i, gap});
    }
    for (auto j : out.inv.inv0) {
        if (model.weight(j) > tol) out.violations.push_back({Kind::GhostWeight, j, model.weight(j)});
    }
    out.member = out.violations.empty();
    return out;
}

void PartitionSpec::validate(const TrueModel& truth) const {
    shape.validate();
    if (static_cast<std::size_t>(shape.r) != truth.components())
        throw DomainError("PartitionSpec: shape.r differs from the number of true components");
    if (ghost_centers.size() != static_cast<std::size_t>(shape.groups() - shape.r))
        throw DomainError("PartitionSpec: need one ghost center per ghost group");
    const auto& q = truth.params();
    for (std::size_t j = 0; j < ghost_centers.size(); ++j) {
        if (ghost_centers[j].dim() != truth.dim()) throw DomainError("PartitionSpec: ghost center dimension mismatch");
        for (std::size_t k = 0; k < q.components(); ++k) {
            if (linf_distance(ghost_centers[j], q.rate(k)) <= TrueModel::kMinSeparation)
                throw DomainError("PartitionSpec: ghost center coincides with a true rate");
        }
        for (std::size_t i = 0; i < j; ++i) {
            if (linf_distance(ghost_centers[j], ghost_centers[i]) <= TrueModel::kMinSeparation)
                throw DomainError("PartitionSpec: ghost centers must be distinct");
        }
    }
}

PartitionSpec make_partition_spec(PartitionShape shape, const TrueModel& truth, std::uint64_t seed, double b_max) {
    shape.validate();
    if (!(b_max > kGhostRateMin)) throw DomainError("make_partition_spec: b_max must exceed the minimum ghost rate");
    RandomStream rng(seed, 1);
    PartitionSpec spec{std::move(shape), {}};
    const auto& q = truth.params();
    const auto ghosts = static_cast<std::size_t>(spec.shape.groups() - spec.shape.r);
    constexpr int kMaxAttempts = 100000;
    for (std::size_t j = 0; j < ghosts; ++j) {
        for (int attempt = 0;; ++attempt) {
            if (attempt == kMaxAttempts) throw DomainError("make_partition_spec: could not place ghost centers");
            std::vector<double> c(truth.dim());
            for (auto& v : c) v = kGhostRateMin + (b_max - kGhostRateMin) * rng.uniform();
            RateVector candidate(std::move(c));
            bool ok = true;
            for (std::size_t k = 0; k < q.components() && ok; ++k)
                ok = linf_distance(candidate, q.rate(k)) >= kGhostMinDistance;
            for (const auto& other : spec.ghost_centers) {
                if (!ok) break;
                ok = linf_distance(candidate, other) >= kGhostMinDistance;
            }
            if (ok) {
                spec.ghost_centers.push_back(std::move(candidate));
                break;
            }
        }
    }
    spec.validate(truth);
    return spec;
}

MixtureParams sample_variety_point(const PartitionSpec& spec, const TrueModel& truth, std::uint64_t seed) {
    spec.validate(truth);
    RandomStream rng(seed, 2);
    const auto& q = truth.params();
    std::vector<double> weights;
    std::vector<RateVector> rates;
    for (int j = 0; j < spec.shape.groups(); ++j) {
        const auto size = static_cast<std::size_t>(spec.shape.sizes[static_cast<std::size_t>(j)]);
        if (j < spec.shape.r) {
            const auto jj = static_cast<std::size_t>(j);
            std::vector<double> g(size);
            double total = 0.0;
            for (auto& v : g) total += (v = rng.gamma(1.0));
            for (auto v : g) {
                weights.push_back(q.weight(jj) * v / total);
                rates.push_back(q.rate(jj));
            }
        } else {
            const auto& center = spec.ghost_centers[static_cast<std::size_t>(j - spec.shape.r)];
            for (std::size_t i = 0; i < size; ++i) {
                weights.push_back(0.0);
                rates.push_back(center);
            }
        }
    }
    // Absorb rounding in the weight sum into the largest weight.
    double total = 0.0;
    for (double w : weights) total += w;
    auto largest = std::max_element(weights.begin(), weights.end());
    *largest += 1.0 - total;
    return MixtureParams(std::move(weights), std::move(rates));
}

double ProbeReport::spread_growth() const {
    if (per_scale.empty()) return std::numeric_limits<double>::quiet_NaN();
    return per_scale.back().spread() / per_scale.front().spread();
}

bool ProbeReport::finite() const {
    return std::isfinite(min_ratio) && std::isfinite(max_ratio) && min_ratio > 0.0;
}

ProbeReport ratio_bound_probe(const ParamFunction& f, const ParamFunction& g, const MixtureParams& center,
                              std::size_t directions, std::span<const double> scales, std::uint64_t seed) {
    if (directions == 0 || scales.empty()) throw DomainError("ratio_bound_probe: need directions and scales");
    const std::size_t h = center.components();
    const std::size_t dim = center.dim();
    RandomStream rng(seed, 3);

    std::vector<std::vector<double>> deltas;
    for (std::size_t d = 0; d < directions; ++d) {
        std::vector<double> delta(h + h * dim);
        for (auto& v : delta) v = rng.normal();
        // Weight part: zero weights may only increase, and the total change is
        // taken out of the positive weights so the point stays on the simplex.
        double shift = 0.0;
        std::size_t positive = 0;
        for (std::size_t k = 0; k < h; ++k) {
            if (center.weight(k) <= 0.0) delta[k] = std::abs(delta[k]);
            else ++positive;
            shift += delta[k];
        }
        if (positive > 0) {
            for (std::size_t k = 0; k < h; ++k) {
                if (center.weight(k) > 0.0) delta[k] -= shift / static_cast<double>(positive);
            }
        }
        double norm = 0.0;
        for (double v : delta) norm += v * v;
        norm = std::sqrt(norm);
        for (auto& v : delta) v /= norm;
        deltas.push_back(std::move(delta));
    }

    // ratios[d][i]: direction d at scale i, NaN where the point was skipped.
    std::vector<std::vector<double>> ratios(deltas.size(), std::vector<double>(scales.size(), NAN));
    for (std::size_t d = 0; d < deltas.size(); ++d) {
        const auto& delta = deltas[d];
        for (std::size_t i = 0; i < scales.size(); ++i) {
            const double eps = scales[i];
            std::vector<double> weights(h);
            std::vector<RateVector> rates;
            bool valid = true;
            double total = 0.0;
            for (std::size_t k = 0; k < h; ++k) {
                weights[k] = center.weight(k) + eps * delta[k];
                if (weights[k] < 0.0) valid = false;
                total += weights[k];
            }
            for (std::size_t k = 0; k < h && valid; ++k) {
                std::vector<double> b(dim);
                for (std::size_t m = 0; m < dim; ++m) {
                    b[m] = center.rate(k, m) + eps * delta[h + k * dim + m];
                    if (!(b[m] > 0.0)) valid = false;
                }
                if (valid) rates.emplace_back(std::move(b));
            }
            if (!valid || std::abs(total - 1.0) > MixtureParams::kWeightSumTolerance) continue;
            const MixtureParams w(std::move(weights), std::move(rates));
            const double fv = f(w);
            const double gv = g(w);
            if (std::abs(fv) < 1e-300 && std::abs(gv) < 1e-300) continue;
            ratios[d][i] = (gv * gv) / (fv * fv);
        }
    }

    // Only directions usable at every scale enter the statistics, so spreads
    // at different scales are taken over the same directions.
    ProbeReport report;
    report.min_ratio = std::numeric_limits<double>::infinity();
    report.max_ratio = 0.0;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        ScaleStats stats;
        stats.scale = scales[i];
        stats.min_ratio = std::numeric_limits<double>::infinity();
        stats.max_ratio = 0.0;
        for (const auto& row : ratios) {
            if (std::any_of(row.begin(), row.end(), [](double v) { return std::isnan(v); })) {
                ++stats.skipped;
                continue;
            }
            stats.min_ratio = std::min(stats.min_ratio, row[i]);
            stats.max_ratio = std::max(stats.max_ratio, row[i]);
            ++stats.evaluated;
        }
        report.min_ratio = std::min(report.min_ratio, stats.min_ratio);
        report.max_ratio = std::max(report.max_ratio, stats.max_ratio);
        report.per_scale.push_back(stats);
    }
    return report;
}

std::vector<double> aoyagi_local_split(const VandermondeInstance& inst, const PartitionSpec& spec) {
    spec.validate(inst.truth());
    if (static_cast<std::size_t>(spec.shape.total()) != inst.components())
        throw DomainError("aoyagi_local_split: group sizes do not add up to H");
    const auto& model = inst.model();
    const auto& q = inst.truth().params();
    std::vector<double> out;
    std::size_t next = 0;
    for (int j = 0; j < spec.shape.groups(); ++j) {
        const int size = spec.shape.sizes[static_cast<std::size_t>(j)];
        std::vector<WeightedRate> terms;
        for (int i = 0; i < size; ++i, ++next) terms.push_back({model.weight(next), &model.rate(next)});
        if (j < spec.shape.r) {
            const auto jj = static_cast<std::size_t>(j);
            terms.push_back({-q.weight(jj), &q.rate(jj)});
            out.push_back(vandermonde_sum(terms, model.dim(), size));
        } else {
            out.push_back(vandermonde_sum(terms, model.dim(), size - 1));
        }
    }
    return out;
}

}  // namespace rlct
