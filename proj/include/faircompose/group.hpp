#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "faircompose/competitive.hpp"
#include "faircompose/core.hpp"

namespace faircompose {

// Conditional parity audit of a composed outcome vector; identical contract
// to the base parity audit, named for the call sites that feed it composed
// probabilities.
FairnessReport audit_parity_under_composition(const GroupStructure& g,
                                              std::span<const double> composed,
                                              double eps = kDefaultEpsilon);

// Parity over the refined attribute set (attribute x subgroup indicator):
// surfaces violations that the coarse audit cannot see.
FairnessReport audit_subgroup_parity(const GroupStructure& g, const std::string& subgroup,
                                     std::span<const double> composed,
                                     double eps = kDefaultEpsilon);

// Two tasks are unrelated when, empirically over the universe, membership in
// either task's (attribute, stratum) cells says nothing about the other
// task's stratum frequencies. Checks both directions.
struct UnrelatedCheck {
    bool unrelated = false;
    double max_residual = 0.0;
};
UnrelatedCheck check_unrelated_tasks(const GroupStructure& g1, const GroupStructure& g2,
                                     double eps = kDefaultEpsilon);

// Exact parity residuals of a two-task tie-break composition. For every
// stratum and attribute pair of each task's group structure, compares the
// group means of p_u * p'_u * (pick(u, task) - 1); these are exactly the
// terms that must balance for the composed system to keep conditional parity
// when both classifiers satisfy it in isolation. Also carries the direct
// parity audits of the composed outcome columns.
struct MultiTaskParity {
    std::array<FairnessReport, 2> equation_residuals;
    std::array<FairnessReport, 2> composed_audits;
};
MultiTaskParity multi_task_parity_residual(const SoftClassifier& c0, const SoftClassifier& c1,
                                           const TieBreaker& tb, const GroupStructure& g0,
                                           const GroupStructure& g1,
                                           double eps = kDefaultEpsilon);

// Group-mean gap trajectory of repeated OR composition: entry i is the
// absolute difference of the two groups' mean probability of at least one
// positive among i+1 independent applications.
std::vector<double> or_gap_series(std::span<const double> p, std::span<const int> group,
                                  int group_a, int group_b, std::size_t max_n);

}  // namespace faircompose
