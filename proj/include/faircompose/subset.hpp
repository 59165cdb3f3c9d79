#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faircompose/cohort.hpp"
#include "faircompose/construct.hpp"
#include "faircompose/core.hpp"
#include "faircompose/rng.hpp"

namespace faircompose {

// --- Constrained cohort feasibility ---------------------------------------

// Bound report for selecting n elements with at least a p fraction from A.
// mu_a_lower = pn/|A| (mean acceptance in A is at least this),
// mu_b_upper = (1-p)n/|B|; the configuration is infeasible when the forced
// mean gap exceeds the similarity slack sum(beta_i * gamma_i).
struct FeasibilityReport {
    bool feasible = true;
    double mu_a_lower = 0.0;
    double mu_b_upper = 0.0;
    double mean_gap = 0.0;  // mu_a_lower - mu_b_upper
    double slack = 0.0;     // sum(beta_i * gamma_i)
    double p_max = 0.0;     // largest constraint fraction the bound permits
};

// parts: (beta_i, gamma_i) with beta summing to one.
FeasibilityReport check_constrained_feasibility(std::size_t a_size, std::size_t b_size,
                                                std::size_t n, double p,
                                                std::span<const std::pair<double, double>> parts);

// --- Gamma partition estimation --------------------------------------------

struct GammaPart {
    std::vector<ElementId> members;  // subset of B
    double gamma = 0.0;              // max matched distance in this part
    double beta = 0.0;               // |members| / |B|
    std::vector<std::pair<ElementId, ElementId>> witness_edges;  // (a, b)
    std::size_t duplication = 1;  // copies of A needed for regular degrees
};

struct GammaPartition {
    std::vector<ElementId> a_side, b_side;
    std::vector<GammaPart> parts;
    std::vector<std::string> notes;
};

// Greedy nearest-neighbour matching of each B element to A, binned by
// matched distance (deciles of the observed matched distances by default,
// custom upper edges otherwise). Empty bins are dropped.
GammaPartition estimate_gamma_partition(const TaskMetric& m, std::span<const ElementId> a,
                                        std::span<const ElementId> b,
                                        std::span<const double> bin_edges = {});

// --- Intra-group selection --------------------------------------------------

// Independent permute-then-classify runs inside A (quota round(p*n)) and B.
// Fair within each group; not individually fair across groups, and says so.
struct IntragroupCohort {
    std::vector<ElementId> members;
    std::size_t n_a = 0, n_b = 0;
    std::string note;
};
IntragroupCohort intragroup_ptc(const SoftClassifier& c, std::span<const ElementId> a,
                                std::span<const ElementId> b, std::size_t n, double p, Rng& rng);

// --- Universe subset experiments --------------------------------------------

// Distribution over subsets of the universe.
struct SubsetDistribution {
    enum class Kind { full_universe, explicit_sets, independent };
    Kind kind = Kind::full_universe;
    std::size_t universe = 0;
    std::vector<std::pair<std::vector<ElementId>, double>> sets;  // explicit
    std::vector<double> weights;  // independent inclusion, per element

    static SubsetDistribution full(std::size_t universe);
    static SubsetDistribution explicit_sets(std::size_t universe,
                                            std::vector<std::pair<std::vector<ElementId>, double>>);
    static SubsetDistribution independent(std::vector<double> weights);

    std::vector<ElementId> sample(Rng& rng) const;
};

// Distribution over orderings of a drawn subset.
struct OrderingDistribution {
    enum class Kind { uniform, fixed, generator };
    Kind kind = Kind::uniform;
    std::vector<ElementId> fixed_order;  // ordering of the full universe
    std::function<std::vector<ElementId>(const std::vector<ElementId>&, Rng&)> generate;

    static OrderingDistribution uniform();
    static OrderingDistribution fixed(std::vector<ElementId> order);
    static OrderingDistribution generator(
        std::function<std::vector<ElementId>(const std::vector<ElementId>&, Rng&)>);

    std::vector<ElementId> order(std::vector<ElementId> subset, Rng& rng) const;
};

// A system consuming an ordered subset and returning the selected elements.
// exact_marginals, when present, gives per-subset selection probabilities
// (independent of ordering) and unlocks exact expectations for explicit
// subset distributions.
struct SubsetSystem {
    std::function<std::vector<ElementId>(std::span<const ElementId>, Rng&)> run;
    std::function<std::vector<double>(std::span<const ElementId>)> exact_marginals;
};

// Each present element classified independently with its probability;
// absent elements get the default (negative) outcome.
SubsetSystem classify_independently(SoftClassifier c);

struct ExperimentEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    bool exact = false;
};

// Monte Carlo over (randomness, subset, ordering) in that sampling order;
// switches to exact summation for explicit subset distributions when the
// system exposes exact marginals.
ExperimentEstimate run_subset_experiment(const SubsetSystem& system, const SubsetDistribution& y,
                                         const OrderingDistribution& x, ElementId u,
                                         std::size_t trials, std::uint64_t seed);

// --- Positive-weight rescaling ----------------------------------------------

// Classifier adjusted for an independent-inclusion subset distribution: when
// element w shows up, classify normally with probability q_min/q_w, else
// output the default. Every element's effective positive probability over
// the experiment becomes q_min * p_w, so pairwise distances shrink by q_min
// and fairness is preserved. The object carries the weights it assumes.
struct RescaledClassifier {
    SoftClassifier conditional;          // probability when present
    std::vector<double> assumed_weights;  // the inclusion distribution assumed
    double q_min = 0.0;
};

RescaledClassifier positive_weights_rescale(const SoftClassifier& c,
                                            std::span<const double> weights);

// Effective per-element positive probabilities under the assumed weights.
std::vector<double> effective_probabilities(const RescaledClassifier& rc);

// Same against different weights; warns when they differ from the assumed
// ones, since a rescaled classifier is only fair for its own distribution.
struct ContextualEffect {
    std::vector<double> effective;
    std::optional<std::string> warning;
};
ContextualEffect effective_probabilities_in_context(const RescaledClassifier& rc,
                                                    std::span<const double> actual_weights);

SubsetSystem classify_independently(const RescaledClassifier& rc);

// --- Copy-behaviour extension -----------------------------------------------

// Extends a classifier defined on part of the universe to all of it: keeps
// the external probabilities (checked to be fair among themselves first) and
// fills the rest with fair_add using nearest-neighbour targets.
SoftClassifier copy_behavior_extension(const TaskMetric& m,
                                       std::span<const PartialAssignment> external,
                                       double eps = kDefaultEpsilon);

}  // namespace faircompose
