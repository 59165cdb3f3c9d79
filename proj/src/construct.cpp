#include "faircompose/construct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "faircompose/linprog.hpp"

namespace faircompose {

namespace {

// Core clamping scan. `defined[u]` marks assigned elements with value p[u].
double fair_add_scan(const TaskMetric& m, const std::vector<double>& p,
                     const std::vector<bool>& defined, double target, ElementId x) {
    double value = target;
    for (ElementId l = 0; l < m.size(); ++l) {
        if (!defined[l]) continue;
        const double dist = m(l, x);
        if (dist < p[l] - value) {
            value = p[l] - dist;
        } else if (dist < value - p[l]) {
            value = p[l] + dist;
        }
    }
    return value;
}

double nearest_neighbour_target(const TaskMetric& m, const std::vector<double>& p,
                                const std::vector<bool>& defined, ElementId x) {
    double best_dist = std::numeric_limits<double>::infinity();
    double best_value = 0.0;
    bool any = false;
    for (ElementId l = 0; l < m.size(); ++l) {
        if (!defined[l]) continue;
        if (m(l, x) < best_dist) {
            best_dist = m(l, x);
            best_value = p[l];
            any = true;
        }
    }
    return any ? best_value : 0.0;
}

// Completes a partial assignment over the whole universe, filling undefined
// elements in ascending id order with nearest-neighbour targets.
SoftClassifier complete_assignment(const TaskMetric& m, std::vector<double> p,
                                   std::vector<bool> defined) {
    for (ElementId x = 0; x < m.size(); ++x) {
        if (defined[x]) continue;
        const double target = nearest_neighbour_target(m, p, defined, x);
        p[x] = fair_add_scan(m, p, defined, target, x);
        defined[x] = true;
    }
    return SoftClassifier{std::move(p)};
}

}  // namespace

double fair_add(const TaskMetric& m, std::span<const PartialAssignment> assigned, double target,
                ElementId x) {
    if (x >= m.size()) throw std::invalid_argument("fair_add: element id out of range");
    if (!(target >= 0.0 && target <= 1.0))
        throw std::invalid_argument("fair_add: target outside [0,1]");
    std::vector<double> p(m.size(), 0.0);
    std::vector<bool> defined(m.size(), false);
    for (const auto& [id, prob] : assigned) {
        if (id >= m.size()) throw std::invalid_argument("fair_add: assigned id out of range");
        if (id == x) throw std::invalid_argument("fair_add: element already assigned");
        if (!(prob >= 0.0 && prob <= 1.0))
            throw std::invalid_argument("fair_add: assigned probability outside [0,1]");
        p[id] = prob;
        defined[id] = true;
    }
    return fair_add_scan(m, p, defined, target, x);
}

SoftClassifier build_fair_classifier(const TaskMetric& m, std::span<const double> targets,
                                     std::span<const ElementId> order) {
    require_valid_metric(m, "build_fair_classifier");
    if (targets.size() != m.size() || order.size() != m.size())
        throw std::invalid_argument("build_fair_classifier: size mismatch");
    validate_probabilities(targets, "build_fair_classifier targets");
    std::vector<bool> seen(m.size(), false);
    for (ElementId id : order) {
        if (id >= m.size() || seen[id])
            throw std::invalid_argument("build_fair_classifier: order is not a permutation");
        seen[id] = true;
    }

    std::vector<double> p(m.size(), 0.0);
    std::vector<bool> defined(m.size(), false);
    for (ElementId x : order) {
        p[x] = fair_add_scan(m, p, defined, targets[x], x);
        defined[x] = true;
    }
    return SoftClassifier{std::move(p)};
}

SoftClassifier build_fair_classifier(const TaskMetric& m, std::span<const double> targets) {
    std::vector<ElementId> order(m.size());
    std::iota(order.begin(), order.end(), ElementId{0});
    return build_fair_classifier(m, targets, order);
}

SoftClassifier maximize_pair_distance(const TaskMetric& m, ElementId u, ElementId v, double low) {
    require_valid_metric(m, "maximize_pair_distance");
    if (u == v || u >= m.size() || v >= m.size())
        throw std::invalid_argument("maximize_pair_distance: need two distinct elements");
    const double gap = m(u, v);
    if (!(low >= 0.0) || low + gap > 1.0)
        throw std::invalid_argument("maximize_pair_distance: low anchor leaves no room for the gap");

    std::vector<double> p(m.size(), 0.0);
    std::vector<bool> defined(m.size(), false);
    p[v] = low;
    p[u] = low + gap;
    defined[u] = defined[v] = true;
    return complete_assignment(m, std::move(p), std::move(defined));
}

SoftClassifier set_pair_ratio(const TaskMetric& m, ElementId u, ElementId v, double alpha) {
    require_valid_metric(m, "set_pair_ratio");
    if (u == v || u >= m.size() || v >= m.size())
        throw std::invalid_argument("set_pair_ratio: need two distinct elements");
    if (!(alpha > 0.0)) throw std::invalid_argument("set_pair_ratio: alpha must be positive");

    const double gap = m(u, v);
    double pu, pv;
    if (alpha == 1.0) {
        pu = pv = 0.5;
    } else if (gap == 0.0) {
        std::ostringstream out;
        out << "set_pair_ratio: ratio " << alpha << " infeasible for a zero-distance pair";
        throw std::invalid_argument(out.str());
    } else if (alpha > 1.0) {
        pv = std::min(gap / (alpha - 1.0), 1.0 / alpha);
        pu = alpha * pv;
    } else {
        pv = std::min(gap / (1.0 - alpha), 1.0);
        pu = alpha * pv;
    }

    std::vector<double> p(m.size(), 0.0);
    std::vector<bool> defined(m.size(), false);
    p[u] = pu;
    p[v] = pv;
    defined[u] = defined[v] = true;
    return complete_assignment(m, std::move(p), std::move(defined));
}

namespace {

// Attempts to embed the metric on a line: positions x_u = m(anchor, u) where
// anchor is the farthest element from element 0 (an endpoint if the metric is
// a line). Returns the sorted order when |x_u - x_v| reproduces every entry.
std::optional<std::vector<ElementId>> line_embedding_order(const TaskMetric& m) {
    const std::size_t n = m.size();
    if (n < 2) return std::nullopt;
    ElementId anchor = 0;
    double best = -1.0;
    for (ElementId u = 0; u < n; ++u) {
        if (m(0, u) > best) {
            best = m(0, u);
            anchor = u;
        }
    }
    std::vector<double> pos(n);
    for (ElementId u = 0; u < n; ++u) pos[u] = m(anchor, u);
    constexpr double kTol = 1e-9;
    for (ElementId u = 0; u < n; ++u)
        for (ElementId v = u + 1; v < n; ++v)
            if (std::fabs(std::fabs(pos[u] - pos[v]) - m(u, v)) > kTol) return std::nullopt;
    std::vector<ElementId> order(n);
    std::iota(order.begin(), order.end(), ElementId{0});
    std::sort(order.begin(), order.end(), [&](ElementId a, ElementId b) {
        return pos[a] < pos[b] || (pos[a] == pos[b] && a < b);
    });
    return order;
}

}  // namespace

SoftClassifier optimize_fair_classifier(const TaskMetric& m, const AllocationTarget& target) {
    require_valid_metric(m, "optimize_fair_classifier");
    const std::size_t n = m.size();
    if (target.utilities.size() != n)
        throw std::invalid_argument("optimize_fair_classifier: utilities size mismatch");
    for (double u : target.utilities)
        if (!std::isfinite(u))
            throw std::invalid_argument("optimize_fair_classifier: utilities must be finite");
    if (!(target.cap >= 0.0) || target.cap > static_cast<double>(n))
        throw std::invalid_argument("optimize_fair_classifier: cap must lie in [0, N]");

    LinearProgram lp;
    lp.vars = n;
    lp.objective = target.utilities;

    auto pair_row = [&](ElementId u, ElementId v) {
        // p_u - p_v <= m(u,v)
        std::vector<double> row(n, 0.0);
        row[u] = 1.0;
        row[v] = -1.0;
        lp.add_row(std::move(row), m(u, v));
    };

    const auto line_order = line_embedding_order(m);
    if (line_order) {
        const auto& order = *line_order;
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            pair_row(order[i], order[i + 1]);
            pair_row(order[i + 1], order[i]);
        }
    } else {
        constexpr std::size_t kMaxGeneral = 48;
        if (n > kMaxGeneral)
            throw std::invalid_argument(
                "optimize_fair_classifier: general metrics supported up to 48 elements");
        for (ElementId u = 0; u < n; ++u)
            for (ElementId v = 0; v < n; ++v)
                if (u != v) pair_row(u, v);
    }
    for (ElementId u = 0; u < n; ++u) {
        std::vector<double> row(n, 0.0);
        row[u] = 1.0;
        lp.add_row(std::move(row), 1.0);
    }
    lp.add_row(std::vector<double>(n, 1.0), target.cap);

    const LpSolution solution = solve_lp(lp);
    if (solution.status != LpSolution::Status::optimal)
        throw std::runtime_error("optimize_fair_classifier: solver did not reach optimality");

    std::vector<double> p = solution.x;
    for (double& value : p) value = std::clamp(value, 0.0, 1.0);
    return SoftClassifier{std::move(p)};
}

}  // namespace faircompose
