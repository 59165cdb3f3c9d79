#pragma once

#include <span>
#include <utility>
#include <vector>

#include "faircompose/core.hpp"

namespace faircompose {

// One (element, probability) assignment of a partially defined classifier.
using PartialAssignment = std::pair<ElementId, double>;

// Extends a classifier that is individually fair on the assigned set to one
// more element x. Starts from `target` and clamps it against each assigned
// element's Lipschitz constraint, scanning in ascending element-id order so
// results are reproducible. Requires the metric to satisfy the triangle
// inequality; validation is the caller's job (the public entry points do it).
//
// Throws if x is already assigned or target is outside [0,1].
double fair_add(const TaskMetric& m, std::span<const PartialAssignment> assigned, double target,
                ElementId x);

// Builds a full classifier by applying fair_add to every element in `order`
// with per-element targets. O(N^2). The result depends on the insertion
// order: two orders may differ, but both are individually fair.
SoftClassifier build_fair_classifier(const TaskMetric& m, std::span<const double> targets,
                                     std::span<const ElementId> order);
// Natural order 0..N-1.
SoftClassifier build_fair_classifier(const TaskMetric& m, std::span<const double> targets);

// Fair classifier with |p_u - p_v| == m(u,v): p_v = low, p_u = low + m(u,v),
// remaining elements filled by fair_add with nearest-neighbour targets.
// Requires low + m(u,v) <= 1.
SoftClassifier maximize_pair_distance(const TaskMetric& m, ElementId u, ElementId v,
                                      double low = 0.0);

// Fair classifier with p_u / p_v == alpha. Picks the scale so the pair gap
// never exceeds m(u,v); infeasible when alpha != 1 and m(u,v) == 0.
SoftClassifier set_pair_ratio(const TaskMetric& m, ElementId u, ElementId v, double alpha);

// Per-element value of a positive classification plus a cap on the expected
// number of positives.
struct AllocationTarget {
    std::vector<double> utilities;
    double cap = 0.0;
};

// Maximizes sum(utilities[u] * p[u]) subject to individual fairness,
// 0 <= p <= 1 and sum(p) <= cap. Solved as a linear program; for metrics that
// embed on a line (abs-diff metrics always do) only adjacent constraints are
// kept, which handles large universes. General metrics fall back to the full
// pairwise program and are limited to small universes.
SoftClassifier optimize_fair_classifier(const TaskMetric& m, const AllocationTarget& target);

}  // namespace faircompose
