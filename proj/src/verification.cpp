#include "rlct/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rlct/poisson_model.hpp"
#include "rlct/random.hpp"
#include "rlct/symmetric_polynomials.hpp"
#include "rlct/vandermonde_singularity.hpp"

namespace rlct {

bool SuiteReport::passed() const {
    if (checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed(); });
}

namespace {

constexpr std::size_t kMaxNotes = 5;

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

SuiteCheck make_check(std::string name, double threshold) {
    SuiteCheck c;
    c.name = std::move(name);
    c.threshold = threshold;
    return c;
}

void record(SuiteCheck& check, double value, bool ok, const std::string& what) {
    ++check.instances;
    if (std::isfinite(value)) check.worst = std::max(check.worst, value);
    if (!ok) {
        ++check.failures;
        if (check.notes.size() < kMaxNotes) check.notes.push_back(what);
    }
}

int uniform_int(RandomStream& rng, int lo, int hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    return lo + std::min(hi - lo, static_cast<int>(rng.uniform() * span));
}

// b in (0, 3]
double positive_base(RandomStream& rng) { return 3.0 * (1.0 - rng.uniform()); }

double ipow(double b, int e) {
    double p = 1.0;
    for (int i = 0; i < e; ++i) p *= b;
    return p;
}

constexpr double kPolyTolerance = 1e-8;

void check_annihilation(RandomStream& rng, SuiteCheck& check) {
    const int h = uniform_int(rng, 1, 6);
    const int n = uniform_int(rng, h + 1, 20);
    std::vector<double> a(static_cast<std::size_t>(h)), b(static_cast<std::size_t>(h));
    for (auto& v : a) v = 4.0 * rng.uniform() - 2.0;
    for (auto& v : b) v = positive_base(rng);
    const auto res = annihilation_check(a, b, n);
    const double scaled = res.scale > 0.0 ? std::abs(res.residual) / res.scale : std::abs(res.residual);
    std::ostringstream os;
    os << "H=" << h << " n=" << n << " scaled residual " << scaled;
    record(check, scaled, scaled < kPolyTolerance, os.str());
}

void check_reconstruction(RandomStream& rng, SuiteCheck& check) {
    const int h = uniform_int(rng, 1, 6);
    const int n = uniform_int(rng, 1, 20);
    std::vector<double> a(static_cast<std::size_t>(h)), b(static_cast<std::size_t>(h));
    for (auto& v : a) v = 4.0 * rng.uniform() - 2.0;
    for (auto& v : b) v = positive_base(rng);
    const auto f = f_coeffs(b, n);
    double lhs = 0.0, rhs = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) lhs += a[i] * ipow(b[i], n);
    for (int i = 1; i <= h; ++i) {
        double moment = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) moment += a[j] * ipow(b[j], i);
        const double term = f[static_cast<std::size_t>(i - 1)] * moment;
        rhs += term;
        scale += std::abs(term);
    }
    scale += std::abs(lhs);
    const double scaled = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
    std::ostringstream os;
    os << "H=" << h << " n=" << n << " scaled residual " << scaled;
    record(check, scaled, scaled < kPolyTolerance, os.str());
}

void check_multi_reconstruction(RandomStream& rng, SuiteCheck& check) {
    const int h = uniform_int(rng, 1, 6);
    const int m = uniform_int(rng, 1, 3);
    std::vector<int> n(static_cast<std::size_t>(m));
    for (auto& v : n) v = uniform_int(rng, 1, 20);
    std::vector<double> a(static_cast<std::size_t>(h));
    std::vector<std::vector<double>> b(static_cast<std::size_t>(h), std::vector<double>(static_cast<std::size_t>(m)));
    for (auto& v : a) v = 4.0 * rng.uniform() - 2.0;
    for (auto& row : b) {
        for (auto& v : row) v = positive_base(rng);
    }
    auto monomial = [&](std::size_t i, std::span<const int> e) {
        double p = 1.0;
        for (std::size_t c = 0; c < e.size(); ++c) p *= ipow(b[i][c], e[c]);
        return p;
    };
    double lhs = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) lhs += a[i] * monomial(i, n);
    double rhs = 0.0, scale = std::abs(lhs);
    for (const auto& [idx, coeff] : f_coeffs_multi(b, n)) {
        double moment = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) moment += a[j] * monomial(j, idx);
        rhs += coeff * moment;
        scale += std::abs(coeff * moment);
    }
    const double scaled = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
    std::ostringstream os;
    os << "H=" << h << " M=" << m << " scaled residual " << scaled;
    record(check, scaled, scaled < kPolyTolerance, os.str());
}

// Random truth with rates in [lo, hi]^M, L-infinity separation >= min_dist and
// weights bounded away from 0.
TrueModel random_truth(RandomStream& rng, int r, int dim, double lo, double hi, double min_dist) {
    std::vector<double> w(static_cast<std::size_t>(r));
    double total = 0.0;
    for (auto& v : w) total += (v = 0.5 + rng.gamma(1.0));
    for (auto& v : w) v /= total;
    std::vector<RateVector> rates;
    while (rates.size() < static_cast<std::size_t>(r)) {
        std::vector<double> c(static_cast<std::size_t>(dim));
        for (auto& v : c) v = lo + (hi - lo) * rng.uniform();
        bool ok = true;
        for (const auto& other : rates) {
            double d = 0.0;
            for (std::size_t m = 0; m < c.size(); ++m) d = std::max(d, std::abs(c[m] - other[m]));
            ok = ok && d >= min_dist;
        }
        if (ok) rates.emplace_back(std::move(c));
    }
    w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
    return TrueModel(MixtureParams(std::move(w), std::move(rates)));
}

// Every true group starts with one component; the remaining H - r units go to
// a random existing group or open a new ghost group.
PartitionShape random_shape(RandomStream& rng, int h, int r) {
    PartitionShape shape{r, std::vector<int>(static_cast<std::size_t>(r), 1)};
    for (int left = h - r; left > 0; --left) {
        const int choice = uniform_int(rng, 0, shape.groups());
        if (choice == shape.groups()) {
            shape.sizes.push_back(1);
        } else {
            ++shape.sizes[static_cast<std::size_t>(choice)];
        }
    }
    return shape;
}

std::size_t group_offset(const PartitionShape& shape, int group) {
    std::size_t off = 0;
    for (int j = 0; j < group; ++j) off += static_cast<std::size_t>(shape.sizes[static_cast<std::size_t>(j)]);
    return off;
}

std::size_t heaviest_in_group(const MixtureParams& w, const PartitionShape& shape, int group) {
    const std::size_t off = group_offset(shape, group);
    std::size_t best = off;
    for (std::size_t k = off; k < off + static_cast<std::size_t>(shape.sizes[static_cast<std::size_t>(group)]); ++k) {
        if (w.weight(k) > w.weight(best)) best = k;
    }
    return best;
}

// Pushes a realizing point off the variety by eps. kind 0 shifts every rate of
// one true group, kind 1 moves weight onto a ghost component, kind 2 moves
// weight between two true groups. Unavailable kinds fall back to kind 0.
MixtureParams perturb_off_variety(const MixtureParams& w, const PartitionShape& shape, int kind, double eps,
                                  RandomStream& rng, std::string& label) {
    std::vector<double> weights(w.weights().begin(), w.weights().end());
    auto rows = w.rate_rows();
    const int group = uniform_int(rng, 0, shape.r - 1);
    if (kind == 1 && shape.groups() > shape.r) {
        const std::size_t from = heaviest_in_group(w, shape, group);
        const std::size_t to = group_offset(shape, uniform_int(rng, shape.r, shape.groups() - 1));
        weights[from] -= eps;
        weights[to] += eps;
        label = "ghost weight";
    } else if (kind == 2 && shape.r > 1) {
        const int other = (group + 1 + uniform_int(rng, 0, shape.r - 2)) % shape.r;
        weights[heaviest_in_group(w, shape, group)] -= eps;
        weights[heaviest_in_group(w, shape, other)] += eps;
        label = "weight transfer";
    } else {
        const std::size_t off = group_offset(shape, group);
        const auto coord = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(w.dim()) - 1));
        for (std::size_t k = off; k < off + static_cast<std::size_t>(shape.sizes[static_cast<std::size_t>(group)]); ++k)
            rows[k][coord] += eps;
        label = "rate shift";
    }
    return MixtureParams::from_rows(std::move(weights), rows);
}

std::vector<std::size_t> random_permutation(RandomStream& rng, std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(i) - 1))]);
    return p;
}

std::string shape_string(const PartitionShape& shape) {
    std::ostringstream os;
    os << "(";
    for (std::size_t j = 0; j < shape.sizes.size(); ++j) os << (j ? "," : "") << shape.sizes[j];
    os << ")";
    return os.str();
}

}  // namespace

SuiteReport verify_polynomials(std::uint64_t seed, std::size_t instances) {
    Timer timer;
    SuiteReport report;
    report.suite = "polynomials";
    report.seed = seed;
    SuiteCheck annihilation = make_check("annihilation", kPolyTolerance);
    SuiteCheck reconstruction = make_check("reconstruction", kPolyTolerance);
    SuiteCheck multi = make_check("multidimensional_reconstruction", kPolyTolerance);
    RandomStream rng(seed, 100);
    for (std::size_t i = 0; i < instances; ++i) {
        check_annihilation(rng, annihilation);
        check_reconstruction(rng, reconstruction);
        check_multi_reconstruction(rng, multi);
    }
    report.checks = {annihilation, reconstruction, multi};
    report.seconds = timer.seconds();
    return report;
}

SuiteReport verify_variety(std::uint64_t seed, std::size_t points) {
    Timer timer;
    SuiteReport report;
    report.suite = "variety";
    report.seed = seed;
    constexpr double kOnThreshold = 1e-12;
    constexpr double kOffThreshold = 1e-10;
    constexpr double kZeroSetTol = 1e-9;
    constexpr double kPerturbation = 1e-3;
    constexpr double kRateLo = 0.5, kRateHi = 2.5;
    constexpr double kKlTol = 1e-12;

    SuiteCheck construction = make_check("membership_matches_construction", 0.0);
    SuiteCheck h_pred = make_check("h_function_predicate", kOnThreshold);
    SuiteCheck sq_pred = make_check("sq_surrogate_predicate", kOnThreshold);
    SuiteCheck zero_sets = make_check("shared_zero_sets", kZeroSetTol);
    SuiteCheck perm = make_check("permutation_invariance", 1e-9);

    RandomStream rng(seed, 200);
    for (std::size_t i = 0; i < points; ++i) {
        const int dim = uniform_int(rng, 1, 3);
        const int r = uniform_int(rng, 1, dim == 1 ? 3 : 2);
        const int h = uniform_int(rng, r, dim == 1 ? 6 : 4);
        const TrueModel truth = random_truth(rng, r, dim, kRateLo, kRateHi, 0.3);
        const PartitionShape shape = random_shape(rng, h, r);
        const std::uint64_t point_seed = mix64(seed + i);
        const PartitionSpec spec = make_partition_spec(shape, truth, point_seed, kRateHi);
        MixtureParams w = sample_variety_point(spec, truth, point_seed);

        const bool on = i % 2 == 0;
        std::string label = "on variety";
        if (!on) w = perturb_off_variety(w, shape, static_cast<int>((i / 2) % 3), kPerturbation, rng, label);

        const VandermondeInstance inst(w, truth);
        const auto member = variety_membership(inst);
        const double hv = h_function(inst);
        const double sq = sq_surrogate(w, truth, kKlTol);
        const double kl = kl_mean_error(w, truth, kKlTol);

        std::ostringstream what;
        what << "point " << i << " M=" << dim << " H=" << h << " r=" << r << " shape " << shape_string(shape) << " ["
             << label << "] member=" << member.member << " h=" << hv << " sq=" << sq << " K=" << kl;

        record(construction, member.member == on ? 0.0 : 1.0, member.member == on, what.str());
        const bool h_ok = member.member ? hv < kOnThreshold : hv > kOffThreshold;
        record(h_pred, member.member ? hv : 0.0, h_ok, what.str());
        const bool sq_ok = member.member ? sq < kOnThreshold : sq > kOffThreshold;
        record(sq_pred, member.member ? sq : 0.0, sq_ok, what.str());
        // On the variety all three vanish to kZeroSetTol; off it all three stay
        // above the roundoff floor of the on-variety values.
        const double largest = std::max({hv, sq, kl});
        const double smallest = std::min({hv, sq, kl});
        record(zero_sets, member.member ? largest : 0.0,
               member.member ? largest <= kZeroSetTol : smallest > kOnThreshold, what.str());

        const auto p = random_permutation(rng, w.components());
        const VandermondeInstance pinst(w.permuted(p), truth);
        const double hp = h_function(pinst);
        const bool mp = variety_membership(pinst).member;
        const double dev = std::abs(hp - hv) / std::max(1.0, hv);
        record(perm, dev, mp == member.member && dev <= 1e-9, what.str());
    }
    report.checks = {construction, h_pred, sq_pred, zero_sets, perm};
    report.seconds = timer.seconds();
    return report;
}

SuiteReport verify_ratio(std::uint64_t seed, std::size_t points, std::size_t directions) {
    Timer timer;
    SuiteReport report;
    report.suite = "ratio";
    report.seed = seed;
    const std::vector<double> scales{1e-1, 1e-2, 1e-3, 1e-4};
    constexpr double kKlTol = 1e-12;
    const int configs[][3] = {{1, 3, 1}, {1, 3, 2}, {2, 2, 1}};

    SuiteCheck k_vs_h = make_check("K_vs_H_spread_growth", kMaxSpreadGrowth);
    SuiteCheck h_vs_split = make_check("H_vs_split_spread_growth", kMaxSpreadGrowth);
    RandomStream rng(seed, 300);
    for (const auto& c : configs) {
        const int dim = c[0], h = c[1], r = c[2];
        for (std::size_t p = 0; p < points; ++p) {
            const TrueModel truth = random_truth(rng, r, dim, 0.5, 3.0, 0.5);
            const PartitionShape shape = random_shape(rng, h, r);
            const std::uint64_t point_seed = mix64(seed ^ (static_cast<std::uint64_t>(dim * 100 + h * 10 + r) << 20) ^ p);
            const PartitionSpec spec = make_partition_spec(shape, truth, point_seed);
            const MixtureParams center = sample_variety_point(spec, truth, point_seed);

            const ParamFunction kl = [&](const MixtureParams& w) { return kl_mean_error(w, truth, kKlTol); };
            const ParamFunction hf = [&](const MixtureParams& w) { return h_function(VandermondeInstance(w, truth)); };
            const ParamFunction split = [&](const MixtureParams& w) {
                const auto parts = aoyagi_local_split(VandermondeInstance(w, truth), spec);
                return std::accumulate(parts.begin(), parts.end(), 0.0);
            };

            auto run = [&](const char* name, const ParamFunction& f, const ParamFunction& g, SuiteCheck& check) {
                const ProbeReport pr = ratio_bound_probe(f, g, center, directions, scales, mix64(point_seed + 1));
                ProbeSummary s{dim, h, r, p, name, shape.sizes, pr.min_ratio, pr.max_ratio, pr.spread_growth()};
                report.probes.push_back(s);
                bool evaluated = true;
                for (const auto& st : pr.per_scale) evaluated = evaluated && st.evaluated > 0;
                const bool ok = evaluated && pr.finite() && std::isfinite(s.spread_growth) &&
                                s.spread_growth < kMaxSpreadGrowth;
                std::ostringstream what;
                what << name << " (" << dim << "," << h << "," << r << ") point " << p << " shape "
                     << shape_string(shape) << " ratio [" << pr.min_ratio << ", " << pr.max_ratio << "] growth "
                     << s.spread_growth << " spreads";
                for (const auto& st : pr.per_scale) what << ' ' << st.spread();
                record(check, s.spread_growth, ok, what.str());
            };
            run("K_vs_H", kl, hf, k_vs_h);
            run("H_vs_split", hf, split, h_vs_split);
        }
    }
    report.checks = {k_vs_h, h_vs_split};
    report.seconds = timer.seconds();
    return report;
}

}  // namespace rlct
