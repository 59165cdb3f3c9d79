#pragma once

#include <optional>
#include <span>
#include <vector>

#include "faircompose/core.hpp"

namespace faircompose {

// Logical compositions of independent classifiers over the same universe.
// Independence of classifier randomness is assumed throughout; correlated
// classifiers are out of scope.

// Probability of at least one positive: 1 - prod(1 - p_i[u]).
std::vector<double> compose_or(std::span<const SoftClassifier> classifiers);

// Probability that all are positive: prod(p_i[u]).
std::vector<double> compose_and(std::span<const SoftClassifier> classifiers);

// Probability of exactly one positive: sum_i p_i prod_{j!=i} (1-p_j).
std::vector<double> compose_xor_exactly_one(std::span<const SoftClassifier> classifiers);

// Probability of at least k positives, exact dynamic programming over the
// success-count distribution of independent heterogeneous Bernoullis.
std::vector<double> compose_threshold(std::span<const SoftClassifier> classifiers, std::size_t k);

// OR of `degrees[u]` independent copies of the same classifier applied to u;
// degree 0 means u is never classified (probability 0).
std::vector<double> or_with_multiplicity(const SoftClassifier& c, std::span<const int> degrees);

struct HeavyCheck {
    bool heavy = false;
    std::optional<ElementId> witness;  // first element below 1/2, if any
};

// True iff every element's OR probability is at least 1/2.
HeavyCheck check_heavy_or(std::span<const SoftClassifier> classifiers);
HeavyCheck check_heavy_or(std::span<const double> or_probabilities);

// Greedy left-to-right grouping into consecutive blocks whose OR probability
// reaches 1/2 for every element. Failure is a value: `residual` holds the
// tail that could not reach 1/2.
struct HeavyOrGrouping {
    std::vector<std::vector<std::size_t>> groups;  // indices into the input list
    std::vector<std::size_t> residual;
    bool ok() const { return residual.empty(); }
};

HeavyOrGrouping group_into_heavy_ors(std::span<const SoftClassifier> classifiers);

}  // namespace faircompose
