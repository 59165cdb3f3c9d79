#include "faircompose/group.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace faircompose {

FairnessReport audit_parity_under_composition(const GroupStructure& g,
                                              std::span<const double> composed, double eps) {
    return audit_conditional_parity(g, composed, eps);
}

FairnessReport audit_subgroup_parity(const GroupStructure& g, const std::string& subgroup,
                                     std::span<const double> composed, double eps) {
    const auto it = g.subgroups.find(subgroup);
    if (it == g.subgroups.end())
        throw std::invalid_argument("subgroup parity: no indicator column named '" + subgroup +
                                    "'");
    const auto& indicator = it->second;
    if (indicator.size() != g.size())
        throw std::invalid_argument("subgroup parity: indicator size mismatch");

    GroupStructure refined;
    refined.stratum = g.stratum;
    refined.attribute.resize(g.size());
    for (std::size_t u = 0; u < g.size(); ++u)
        refined.attribute[u] = g.attribute[u] * 2 + (indicator[u] ? 1 : 0);
    return audit_conditional_parity(refined, composed, eps);
}

UnrelatedCheck check_unrelated_tasks(const GroupStructure& g1, const GroupStructure& g2,
                                     double eps) {
    const std::size_t n = g1.size();
    if (n == 0 || g2.size() != n || g1.stratum.size() != n || g2.stratum.size() != n)
        throw std::invalid_argument("unrelated tasks: structures must cover the same universe");

    UnrelatedCheck check;
    auto residual_direction = [&](const GroupStructure& own, const GroupStructure& other) {
        // Pr[z_own = z | a_other = a, z_other = z'] vs Pr[z_own = z]
        std::map<int, std::size_t> marginal;
        for (std::size_t u = 0; u < n; ++u) marginal[own.stratum[u]] += 1;
        std::map<std::pair<int, int>, std::size_t> cell_total;
        std::map<std::pair<std::pair<int, int>, int>, std::size_t> cell_with_z;
        for (std::size_t u = 0; u < n; ++u) {
            const std::pair<int, int> cell{other.attribute[u], other.stratum[u]};
            cell_total[cell] += 1;
            cell_with_z[{cell, own.stratum[u]}] += 1;
        }
        for (const auto& [z, count] : marginal) {
            const double base = static_cast<double>(count) / static_cast<double>(n);
            for (const auto& [cell, total] : cell_total) {
                const auto it = cell_with_z.find({cell, z});
                const double conditional =
                    it == cell_with_z.end()
                        ? 0.0
                        : static_cast<double>(it->second) / static_cast<double>(total);
                check.max_residual = std::max(check.max_residual, std::fabs(conditional - base));
            }
        }
    };
    residual_direction(g1, g2);
    residual_direction(g2, g1);
    check.unrelated = check.max_residual <= eps;
    return check;
}

namespace {

// Group means of p * p' * (pick - 1) per (stratum, attribute) cell of `g`,
// compared pairwise within each stratum. Equal means are exactly what keeps
// conditional parity alive through the tie-break.
FairnessReport equation_residuals_for_task(const SoftClassifier& c0, const SoftClassifier& c1,
                                           const TieBreaker& tb, const GroupStructure& g,
                                           std::size_t task, double eps) {
    const std::size_t n = c0.size();
    std::map<int, std::map<int, std::pair<double, std::size_t>>> cells;
    for (std::size_t u = 0; u < n; ++u) {
        const double pick = tb.pick_probability(u, 0b11, task);
        const double term = c0.p[u] * c1.p[u] * (pick - 1.0);
        auto& cell = cells[g.stratum[u]][g.attribute[u]];
        cell.first += term;
        cell.second += 1;
    }

    FairnessReport report;
    report.epsilon = eps;
    for (const auto& [z, by_attr] : cells) {
        if (by_attr.size() < 2) {
            std::ostringstream warn;
            warn << "stratum z=" << z << " skipped: fewer than two nonempty attribute cells";
            report.warnings.push_back(warn.str());
            continue;
        }
        std::vector<std::pair<int, double>> means;
        for (const auto& [a, cell] : by_attr)
            means.emplace_back(a, cell.first / static_cast<double>(cell.second));
        for (std::size_t i = 0; i < means.size(); ++i) {
            for (std::size_t j = i + 1; j < means.size(); ++j) {
                report.comparisons += 1;
                const double observed = std::fabs(means[i].second - means[j].second);
                if (observed > eps) {
                    Violation v;
                    std::ostringstream label;
                    label << "task " << task << " z=" << z << ": a=" << means[i].first
                          << " vs a=" << means[j].first;
                    v.label = label.str();
                    v.observed = observed;
                    v.allowed = 0.0;
                    v.excess = observed;
                    report.violations.push_back(std::move(v));
                }
            }
        }
    }
    return report;
}

}  // namespace

MultiTaskParity multi_task_parity_residual(const SoftClassifier& c0, const SoftClassifier& c1,
                                           const TieBreaker& tb, const GroupStructure& g0,
                                           const GroupStructure& g1, double eps) {
    const std::size_t n = c0.size();
    if (c1.size() != n || g0.size() != n || g1.size() != n)
        throw std::invalid_argument("multi task parity: size mismatch");
    if (tb.task_count() != 2)
        throw std::invalid_argument("multi task parity: two-task analysis only");
    validate_probabilities(c0.p, "multi task parity");
    validate_probabilities(c1.p, "multi task parity");

    MultiTaskParity result;
    result.equation_residuals[0] = equation_residuals_for_task(c0, c1, tb, g0, 0, eps);
    result.equation_residuals[1] = equation_residuals_for_task(c0, c1, tb, g1, 1, eps);

    const SoftClassifier classifiers[2] = {c0, c1};
    const SystemOutcome composed = compose_competitive(classifiers, tb);
    result.composed_audits[0] =
        audit_parity_under_composition(g0, composed.task_column(0), eps);
    result.composed_audits[1] =
        audit_parity_under_composition(g1, composed.task_column(1), eps);
    return result;
}

std::vector<double> or_gap_series(std::span<const double> p, std::span<const int> group,
                                  int group_a, int group_b, std::size_t max_n) {
    if (p.size() != group.size()) throw std::invalid_argument("or_gap_series: size mismatch");
    validate_probabilities(p, "or_gap_series");
    std::vector<double> series;
    series.reserve(max_n);
    std::vector<double> miss(p.size(), 1.0);
    for (std::size_t round = 1; round <= max_n; ++round) {
        double sum_a = 0.0, sum_b = 0.0;
        std::size_t count_a = 0, count_b = 0;
        for (std::size_t u = 0; u < p.size(); ++u) {
            miss[u] *= 1.0 - p[u];
            if (group[u] == group_a) {
                sum_a += 1.0 - miss[u];
                count_a += 1;
            } else if (group[u] == group_b) {
                sum_b += 1.0 - miss[u];
                count_b += 1;
            }
        }
        if (count_a == 0 || count_b == 0)
            throw std::invalid_argument("or_gap_series: empty group");
        series.push_back(std::fabs(sum_a / count_a - sum_b / count_b));
    }
    return series;
}

}  // namespace faircompose
