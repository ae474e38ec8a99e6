#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rlct/poisson_model.hpp"
#include "rlct/rlct_calculator.hpp"

namespace rlct {

/// A model point paired with the truth it is compared against. The ideal
/// generators are sum_k a_k b_k^x - sum_k a*_k b*_k^x over x in [0 : H+r-1]^M.
class VandermondeInstance {
public:
    VandermondeInstance(MixtureParams model, TrueModel truth);

    const MixtureParams& model() const { return model_; }
    const TrueModel& truth() const { return truth_; }
    std::size_t components() const { return model_.components(); }
    std::size_t true_components() const { return truth_.components(); }
    std::size_t dim() const { return model_.dim(); }
    /// Largest exponent per coordinate, H + r - 1.
    int max_exponent() const { return static_cast<int>(components() + true_components()) - 1; }

private:
    MixtureParams model_;
    TrueModel truth_;
};

/// H(w) = sum over the exponent box of (sum a_k b_k^x - sum a*_k b*_k^x)^2.
double h_function(const VandermondeInstance& inst);

/// Same sum on an arbitrary box [0 : max_exponent]^M.
double vandermonde_form(const MixtureParams& model, const TrueModel& truth, int max_exponent);

/// Model components (0-based) whose rate vector equals true rate k in every
/// coordinate (inv[k]), and the rest (inv0).
struct InvSets {
    std::vector<std::vector<std::size_t>> inv;
    std::vector<std::size_t> inv0;
};

constexpr double kDefaultRateMatchTol = 1e-9;

/// Throws AmbiguityError if some model rate matches two true rates within tol.
InvSets compute_inv_sets(const VandermondeInstance& inst, double tol = kDefaultRateMatchTol);

struct MembershipViolation {
    enum class Kind {
        EmptyInv,        // no model component sits on true component `index`
        WeightMismatch,  // |sum_{Inv_index} a - a*_index| > tol
        GhostWeight,     // component `index` is in Inv_0 with weight > tol
    };
    Kind kind;
    std::size_t index;
    double value;

    std::string describe() const;
};

struct MembershipResult {
    bool member = false;
    InvSets inv;
    std::vector<MembershipViolation> violations;
};

/// (a, b) lies on V(I_Po) iff every Inv_i is nonempty and carries weight a*_i,
/// and every component in Inv_0 has weight 0 (all up to tol).
MembershipResult variety_membership(const VandermondeInstance& inst, double tol = kDefaultRateMatchTol);

/// A PartitionShape with concrete ghost centers C^(r+1) .. C^(r').
struct PartitionSpec {
    PartitionShape shape;
    std::vector<RateVector> ghost_centers;

    /// Checks the shape, the number and dimension of ghost centers, and that
    /// the centers are distinct from each other and from the true rates.
    void validate(const TrueModel& truth) const;
};

constexpr double kGhostRateMin = 0.5;
constexpr double kGhostRateMax = 4.0;
constexpr double kGhostMinDistance = 0.1;

/// Draws ghost centers uniformly from [kGhostRateMin, b_max]^M, rejecting any
/// within kGhostMinDistance (L-infinity) of a true rate or an earlier center.
PartitionSpec make_partition_spec(PartitionShape shape, const TrueModel& truth, std::uint64_t seed,
                                  double b_max = kGhostRateMax);

/// A point of the realizing set with the given collapse pattern. Components are
/// laid out group by group: H_1 copies of b*_1 with Dirichlet(1) weights scaled
/// to a*_1, ..., then each ghost group at its center with weight 0.
MixtureParams sample_variety_point(const PartitionSpec& spec, const TrueModel& truth, std::uint64_t seed);

using ParamFunction = std::function<double(const MixtureParams&)>;

struct ScaleStats {
    double scale = 0.0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;

    double spread() const { return max_ratio / min_ratio; }
};

struct ProbeReport {
    std::vector<ScaleStats> per_scale;  // in the order the scales were given
    double min_ratio = 0.0;
    double max_ratio = 0.0;

    /// spread at the last scale over spread at the first.
    double spread_growth() const;
    bool finite() const;
};

/// Evaluates g(w)^2 / f(w)^2 at w = w* + eps * delta for `directions` random
/// unit directions and each eps in `scales`. Directions keep the weights on
/// the simplex (zero weights may only grow); points leaving the parameter
/// space, or where both f and g are below 1e-300, are skipped, and a direction
/// skipped at any scale is left out at all of them.
ProbeReport ratio_bound_probe(const ParamFunction& f, const ParamFunction& g, const MixtureParams& center,
                              std::size_t directions, std::span<const double> scales, std::uint64_t seed);

/// Per-group values ||a^(j) B^(j)||^2 with model components taken group by
/// group in spec order: true groups over [0:H_j]^M including the -a*_j b*_j^l
/// entry, ghost groups over [0:H_j - 1]^M.
std::vector<double> aoyagi_local_split(const VandermondeInstance& inst, const PartitionSpec& spec);

}  // namespace rlct
