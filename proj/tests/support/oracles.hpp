#pragma once

// Independent brute-force oracles. Everything here recomputes quantities by
// direct enumeration, deliberately avoiding the library's own algorithms, so
// the two routes certify each other.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "faircompose/core.hpp"

namespace faircompose::testing {

// Pr[>= k positives] by summing over all 2^m joint outcomes.
inline double threshold_by_enumeration(const std::vector<double>& probs, std::size_t k) {
    const std::size_t m = probs.size();
    double total = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) < k) continue;
        double w = 1.0;
        for (std::size_t j = 0; j < m; ++j)
            w *= (mask >> j & 1) ? probs[j] : 1.0 - probs[j];
        total += w;
    }
    return total;
}

// All n-subsets of 0..universe-1 in lexicographic order.
inline std::vector<std::vector<ElementId>> all_subsets(std::size_t universe, std::size_t n) {
    std::vector<std::vector<ElementId>> subsets;
    std::vector<ElementId> current;
    auto recurse = [&](auto&& self, ElementId next) -> void {
        if (current.size() == n) {
            subsets.push_back(current);
            return;
        }
        if (next >= universe) return;
        if (universe - next < n - current.size()) return;
        current.push_back(next);
        self(self, next + 1);
        current.pop_back();
        self(self, next + 1);
    };
    recurse(recurse, 0);
    return subsets;
}

// Weighted-sampling target distribution w(l)/eta over all n-subsets.
inline std::vector<double> ws_distribution_by_enumeration(const std::vector<double>& p,
                                                          std::size_t n,
                                                          std::vector<std::vector<ElementId>>* sets
                                                          = nullptr) {
    const auto subsets = all_subsets(p.size(), n);
    std::vector<double> weights(subsets.size(), 0.0);
    double eta = 0.0;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        for (ElementId u : subsets[i]) weights[i] += p[u];
        eta += weights[i];
    }
    for (double& w : weights) w /= eta;
    if (sets) *sets = subsets;
    return weights;
}

// Per-element weighted-sampling selection probability by the same route.
inline std::vector<double> ws_marginals_by_enumeration(const std::vector<double>& p,
                                                       std::size_t n) {
    std::vector<std::vector<ElementId>> sets;
    const auto dist = ws_distribution_by_enumeration(p, n, &sets);
    std::vector<double> marginal(p.size(), 0.0);
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (ElementId u : sets[i]) marginal[u] += dist[i];
    return marginal;
}

// Permute-then-classify selection probabilities by walking every permutation
// and every classification outcome trace (no dynamic programming): the slow
// but direct reading of the mechanism. Usable up to n_elements ~ 6.
inline std::vector<double> ptc_marginals_by_trace_enumeration(const std::vector<double>& p,
                                                              std::size_t n) {
    const std::size_t N = p.size();
    std::vector<ElementId> perm(N);
    std::iota(perm.begin(), perm.end(), ElementId{0});
    std::vector<double> totals(N, 0.0);
    std::size_t permutations = 0;
    do {
        ++permutations;
        // trace = bitmask of Bernoulli outcomes, one coin per position; every
        // coin is weighted whether or not the scan consumed it, so the traces
        // of one permutation sum to exactly one.
        for (std::uint64_t trace = 0; trace < (std::uint64_t{1} << N); ++trace) {
            double weight = 1.0;
            std::vector<bool> selected(N, false);
            std::size_t chosen = 0;
            for (std::size_t i = 0; i < N; ++i) {
                const ElementId u = perm[i];
                const bool coin = trace >> i & 1;
                weight *= coin ? p[u] : 1.0 - p[u];
                if (chosen < n) {
                    const std::size_t remaining = N - i;
                    if (n - chosen >= remaining) {
                        selected[u] = true;  // end condition ignores the coin
                        ++chosen;
                    } else if (coin) {
                        selected[u] = true;
                        ++chosen;
                    }
                }
            }
            if (weight == 0.0) continue;
            for (ElementId u = 0; u < N; ++u)
                if (selected[u]) totals[u] += weight;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (double& t : totals) t /= static_cast<double>(permutations);
    return totals;
}

// Exhaustive grid certification for the fair-allocation optimizer: best
// objective over p in {0, step, ..., 1}^N meeting all constraints.
inline double grid_optimum(const TaskMetric& m, const std::vector<double>& utilities, double cap,
                           double step = 0.05) {
    const std::size_t n = m.size();
    const int levels = static_cast<int>(std::lround(1.0 / step)) + 1;
    std::vector<int> index(n, 0);
    std::vector<double> p(n, 0.0);
    double best = -std::numeric_limits<double>::infinity();
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) p[i] = index[i] * step;
        double total = 0.0;
        bool feasible = true;
        for (std::size_t i = 0; i < n && feasible; ++i) {
            total += p[i];
            for (std::size_t j = 0; j < i; ++j)
                if (std::fabs(p[i] - p[j]) > m(i, j) + 1e-12) {
                    feasible = false;
                    break;
                }
        }
        if (feasible && total <= cap + 1e-12) {
            double objective = 0.0;
            for (std::size_t i = 0; i < n; ++i) objective += utilities[i] * p[i];
            best = std::max(best, objective);
        }
        std::size_t digit = 0;
        while (digit < n && ++index[digit] == levels) index[digit++] = 0;
        if (digit == n) break;
    }
    return best;
}

}  // namespace faircompose::testing
