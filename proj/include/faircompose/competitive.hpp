#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "faircompose/core.hpp"

namespace faircompose {

// Per-individual rule choosing one task among simultaneous positive
// classifications. For every element and nonempty bitmask of positive tasks
// it yields a distribution supported on the set bits; an empty mask
// deterministically yields "no task". Randomized two-task tie-breaks and
// strict orders share this one representation.
class TieBreaker {
public:
    // Tasks tried in `preference` order; the first positive one wins.
    static TieBreaker strict_order(std::size_t task_count, std::vector<std::size_t> preference);
    // Uniform over the positive tasks.
    static TieBreaker uniform(std::size_t task_count);
    // Two tasks; rho[u] = probability of choosing task 0 when both are
    // positive.
    static TieBreaker two_task_value(std::vector<double> rho);
    // Explicit distributions per nonempty mask, shared by all elements.
    // Validated: support only on set bits, sums to one.
    static TieBreaker from_table(std::size_t task_count,
                                 std::map<std::uint32_t, std::vector<double>> table);

    std::size_t task_count() const { return task_count_; }

    // Writes the per-task pick probabilities for `mask` into `out`
    // (size task_count). Zero mask writes all zeros.
    void distribution(ElementId u, std::uint32_t mask, std::span<double> out) const;

    // Probability of picking `task` from `mask`.
    double pick_probability(ElementId u, std::uint32_t mask, std::size_t task) const;

private:
    TieBreaker() = default;
    std::size_t task_count_ = 0;
    std::function<void(ElementId, std::uint32_t, std::span<double>)> fill_;
};

// Exact task-competitive outcome: enumerates the 2^k joint classifications
// per element and applies the tie-break distribution. k <= 20.
SystemOutcome compose_competitive(std::span<const SoftClassifier> classifiers,
                                  const TieBreaker& tb);

// Draw a task from x, then run only that task's classifier:
// probs[u][i] = x[i] * p_i[u].
SystemOutcome randomize_then_classify(std::span<const SoftClassifier> classifiers,
                                      std::span<const double> task_distribution);

// Column-wise individual fairness audit, one report per task.
std::vector<FairnessReport> audit_multiple_task_fairness(std::span<const TaskMetric> metrics,
                                                         const SystemOutcome& outcome,
                                                         double eps = kDefaultEpsilon);

// Search for a pair of individually fair classifiers whose task-competitive
// composition violates multiple-task fairness, maximizing audit excess.
// Deterministic: pairs in lexicographic order, per pair a 0.01 grid over the
// base probabilities with the pair gap set to 0 or +-D (which covers every
// vertex of the feasible region), stopping when `budget` grid evaluations
// are spent.
struct WitnessResult {
    ElementId u = kNoElement, v = kNoElement;
    SoftClassifier first, second;
    SystemOutcome composed;
    std::array<FairnessReport, 2> reports;
    double best_excess = 0.0;
    std::size_t evaluations = 0;
};

WitnessResult find_violation_witness(const TaskMetric& d0, const TaskMetric& d1,
                                     const TieBreaker& tb, std::size_t budget = 2000000);

}  // namespace faircompose
