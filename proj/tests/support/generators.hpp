#pragma once

// Random instance generators shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "faircompose/construct.hpp"
#include "faircompose/core.hpp"
#include "faircompose/rng.hpp"

namespace faircompose::testing {

// Points in a square scaled so no pairwise distance exceeds 1; Euclidean
// distances always satisfy the metric axioms.
inline TaskMetric random_euclidean_metric(std::size_t n, Rng& rng) {
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = rng.uniform01() * 0.7;
        ys[i] = rng.uniform01() * 0.7;
    }
    TaskMetric m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            m.set(i, j, std::hypot(xs[i] - xs[j], ys[i] - ys[j]));
    return m;
}

// Shortest-path closure of a random symmetric matrix: richer structure than
// point clouds (clusters, near-zero distances) while keeping the triangle
// inequality exactly.
inline TaskMetric random_closure_metric(std::size_t n, Rng& rng) {
    TaskMetric m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) m.set(i, j, rng.uniform01());
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) m.set(i, j, std::min(m(i, j), m(i, k) + m(k, j)));
    return m;
}

inline TaskMetric random_line_metric(std::size_t n, Rng& rng) {
    std::vector<double> q(n);
    for (double& v : q) v = rng.uniform01();
    return TaskMetric::abs_diff(q);
}

inline TaskMetric random_metric(std::size_t n, Rng& rng) {
    switch (rng.below(3)) {
        case 0: return random_euclidean_metric(n, rng);
        case 1: return random_closure_metric(n, rng);
        default: return random_line_metric(n, rng);
    }
}

inline std::vector<double> random_probabilities(std::size_t n, Rng& rng, double lo = 0.0,
                                                double hi = 1.0) {
    std::vector<double> p(n);
    for (double& v : p) v = lo + (hi - lo) * rng.uniform01();
    return p;
}

inline std::vector<ElementId> random_order(std::size_t n, Rng& rng) {
    std::vector<ElementId> order(n);
    std::iota(order.begin(), order.end(), ElementId{0});
    rng.shuffle(order);
    return order;
}

// Random individually fair classifier: random targets pushed through the
// incremental construction in a random insertion order.
inline SoftClassifier random_fair_classifier(const TaskMetric& m, Rng& rng, double lo = 0.0,
                                             double hi = 1.0) {
    const auto targets = random_probabilities(m.size(), rng, lo, hi);
    const auto order = random_order(m.size(), rng);
    return build_fair_classifier(m, targets, order);
}

// First pair with distance strictly inside (0,1), if any.
inline std::optional<std::pair<ElementId, ElementId>> nontrivial_pair(const TaskMetric& m) {
    for (ElementId u = 0; u < m.size(); ++u)
        for (ElementId v = u + 1; v < m.size(); ++v)
            if (m(u, v) > 0.0 && m(u, v) < 1.0) return std::make_pair(u, v);
    return std::nullopt;
}

}  // namespace faircompose::testing
