#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "faircompose/core.hpp"
#include "faircompose/rng.hpp"

namespace faircompose {

// Selects exactly n of N elements: draw a uniform permutation, scan it, and
// before classifying a position check the end condition -- if the remaining
// slots cover every element still in the list (including the current one),
// select with probability 1; otherwise select on an independent
// Bernoulli(p[u]). The end condition fires before classification, which makes
// the pairwise selection bound tight on vectors like p = (1, 0).
std::vector<ElementId> permute_then_classify(const SoftClassifier& c, std::size_t n, Rng& rng);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;  // zero for exact results
};

struct MonteCarlo {
    std::size_t trials = 100000;
    std::uint64_t seed = 0;
    unsigned workers = 1;  // trials split across counter-derived streams
};

// Exact Pr[u selected]: averages a per-permutation selection-count dynamic
// program over all N! permutations. Limited to N <= 8.
Estimate ptc_selection_probability(const SoftClassifier& c, std::size_t n, ElementId u);
// All elements at once (same computation, one pass).
std::vector<double> ptc_selection_distribution(const SoftClassifier& c, std::size_t n);
// Monte Carlo estimate with standard error; deterministic for a fixed
// (seed, trials, workers) triple via ordered reduction.
Estimate ptc_selection_probability(const SoftClassifier& c, std::size_t n, ElementId u,
                                   const MonteCarlo& mc);

// Samples an n-subset with probability proportional to its total expected
// positives w(l) = sum_{u in l} p[u], without enumerating subsets: draw an
// anchor x with probability p_x / sum(p), then a uniform (n-1)-subset of the
// rest. The induced distribution is exactly w(l)/eta for eta the total weight
// over all n-subsets.
std::vector<ElementId> weighted_sampling(const SoftClassifier& c, std::size_t n, Rng& rng);

// Closed-form Pr[u selected] under weighted sampling:
// [C(N-1,n-1) p_u + C(N-2,n-2) (S - p_u)] / (C(N-1,n-1) S), S = sum(p).
double ws_selection_probability(const SoftClassifier& c, std::size_t n, ElementId u);

// The fairness guarantee for weighted sampling carries two readings of its
// precondition: mean positive probability >= 1/N, and mean n-subset weight
// >= n/N. Both are computed and reported; `agree` flags any divergence.
struct WsPrecondition {
    bool statement_form = false;  // mean p >= 1/N
    bool proof_form = false;      // mean set weight >= n/N
    double mean_probability = 0.0;
    double mean_set_weight = 0.0;
    bool agree = true;
};
WsPrecondition check_ws_precondition(const SoftClassifier& c, std::size_t n);

enum class CohortMode {
    offline,
    online_random_order,
    online_adversarial_known_length,
    online_adversarial_unknown_length,
};

struct CohortSpec {
    std::size_t n = 0;
    CohortMode mode = CohortMode::offline;
};

// Infeasibility is a value, not an exception: no online mechanism can select
// exactly n fairly from an adversarial stream of unknown length.
struct CohortResult {
    std::vector<ElementId> members;
    bool infeasible = false;
    std::string note;
};

// stream lists universe element ids in arrival order and must contain every
// element exactly once; decisions are immediate.
CohortResult online_cohort(const CohortSpec& spec, const SoftClassifier& c,
                           std::span<const ElementId> stream, Rng& rng);

// Selects the first quota members of each group in stream order, quotas by
// largest remainder summing exactly to n. Satisfies statistical parity by
// construction; the result is annotated as unsafe for individual fairness
// (an adversarial ordering decides who fills each quota).
struct ParityCohort {
    std::vector<ElementId> members;
    std::vector<std::size_t> quotas;  // per group index
    std::string warning;
};
ParityCohort statistical_parity_online(std::span<const ElementId> stream,
                                       std::span<const int> group_of,
                                       std::span<const double> proportions, std::size_t n);

// PTC restricted to an arbitrary id subset (used for intra-group selection).
std::vector<ElementId> permute_then_classify_subset(const SoftClassifier& c,
                                                    std::span<const ElementId> ids, std::size_t n,
                                                    Rng& rng);

}  // namespace faircompose
