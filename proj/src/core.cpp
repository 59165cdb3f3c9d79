#include "faircompose/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace faircompose {

TaskMetric TaskMetric::from_rows(const std::vector<std::vector<double>>& rows) {
    TaskMetric m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size())
            throw std::invalid_argument("metric rows must form a square matrix");
        for (std::size_t j = 0; j < rows.size(); ++j) m.d_[i * m.n_ + j] = rows[i][j];
    }
    return m;
}

TaskMetric TaskMetric::abs_diff(std::span<const double> q) {
    TaskMetric m(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) m.set(i, j, std::fabs(q[i] - q[j]));
    return m;
}

TaskMetric TaskMetric::all_ones(std::size_t n) {
    TaskMetric m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) m.set(i, j, 1.0);
    return m;
}

bool TaskMetric::is_trivial() const {
    for (double v : d_)
        if (v != 0.0 && v != 1.0) return false;
    return true;
}

std::string MetricIssue::describe() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::diagonal:
            out << "nonzero diagonal at (" << i << "," << i << "): " << value;
            break;
        case Kind::range:
            out << "entry out of [0,1] at (" << i << "," << j << "): " << value;
            break;
        case Kind::symmetry:
            out << "asymmetry at (" << i << "," << j << "): difference " << value;
            break;
        case Kind::triangle:
            out << "triangle violation for (" << i << "," << j << "," << k << "): slack " << value;
            break;
    }
    return out.str();
}

MetricValidation validate_metric(const TaskMetric& m) {
    MetricValidation result;
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (m(i, i) != 0.0)
            result.issues.push_back({MetricIssue::Kind::diagonal, i, i, kNoElement, m(i, i)});
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = m(i, j);
            if (!(v >= 0.0 && v <= 1.0) || !std::isfinite(v))
                result.issues.push_back({MetricIssue::Kind::range, i, j, kNoElement, v});
            if (j < i && m(i, j) != m(j, i))
                result.issues.push_back(
                    {MetricIssue::Kind::symmetry, j, i, kNoElement, m(i, j) - m(j, i)});
        }
    }
    // d(i,k) <= d(i,j) + d(j,k) for all triples; a tiny slack absorbs the
    // rounding of sums, real violations are far larger.
    constexpr double kSlack = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            const double direct = m(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || j == k) continue;
                const double detour = m(i, j) + m(j, k);
                if (direct > detour + kSlack) {
                    result.issues.push_back(
                        {MetricIssue::Kind::triangle, i, j, k, direct - detour});
                }
            }
        }
    }
    return result;
}

void require_valid_metric(const TaskMetric& m, const char* context) {
    const MetricValidation v = validate_metric(m);
    if (v.ok()) return;
    std::ostringstream out;
    out << context << ": invalid metric";
    const std::size_t shown = std::min<std::size_t>(v.issues.size(), 3);
    for (std::size_t i = 0; i < shown; ++i) out << "; " << v.issues[i].describe();
    if (v.issues.size() > shown) out << "; +" << v.issues.size() - shown << " more";
    throw std::invalid_argument(out.str());
}

void validate_probabilities(std::span<const double> p, const char* what) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]) || p[i] < 0.0 || p[i] > 1.0) {
            std::ostringstream out;
            out << what << ": probability out of [0,1] at index " << i << ": " << p[i];
            throw std::invalid_argument(out.str());
        }
    }
}

std::vector<double> SystemOutcome::task_column(std::size_t task) const {
    std::vector<double> column(elements);
    for (std::size_t u = 0; u < elements; ++u) column[u] = at(u, task);
    return column;
}

void SystemOutcome::validate() const {
    if (probs.size() != elements * tasks)
        throw std::invalid_argument("system outcome: probs size mismatch");
    validate_probabilities(probs, "system outcome");
    if (!single_slot) return;
    for (std::size_t u = 0; u < elements; ++u) {
        double row = 0.0;
        for (std::size_t i = 0; i < tasks; ++i) row += at(u, i);
        if (row > 1.0 + 1e-12) {
            std::ostringstream out;
            out << "system outcome: single-slot row sum " << row << " for element " << u;
            throw std::invalid_argument(out.str());
        }
    }
}

double FairnessReport::mean_excess() const {
    if (violations.empty()) return 0.0;
    double total = 0.0;
    for (const Violation& v : violations) total += v.excess;
    return total / static_cast<double>(violations.size());
}

double FairnessReport::max_excess() const {
    double best = 0.0;
    for (const Violation& v : violations) best = std::max(best, v.excess);
    return best;
}

FairnessReport audit_individual_fairness(const TaskMetric& m, std::span<const double> q,
                                         double eps) {
    if (q.size() != m.size())
        throw std::invalid_argument("individual fairness audit: length mismatch");
    validate_probabilities(q, "individual fairness audit");
    FairnessReport report;
    report.epsilon = eps;
    const std::size_t n = q.size();
    report.comparisons = n * (n - 1) / 2;
    for (ElementId u = 0; u < n; ++u) {
        for (ElementId v = u + 1; v < n; ++v) {
            const double observed = std::fabs(q[u] - q[v]);
            const double allowed = m(u, v);
            const double excess = observed - allowed;
            if (excess > eps) report.violations.push_back({u, v, {}, observed, allowed, excess});
        }
    }
    return report;
}

namespace {

std::string cell_label(int z, int a1, int a2) {
    std::ostringstream out;
    out << "z=" << z << ": a=" << a1 << " vs a=" << a2;
    return out.str();
}

}  // namespace

FairnessReport audit_conditional_parity(const GroupStructure& g, std::span<const double> q,
                                        double eps) {
    if (q.size() != g.size() || g.stratum.size() != g.size())
        throw std::invalid_argument("conditional parity audit: length mismatch");
    validate_probabilities(q, "conditional parity audit");
    FairnessReport report;
    report.epsilon = eps;

    // (stratum, attribute) -> (sum, count)
    std::map<int, std::map<int, std::pair<double, std::size_t>>> cells;
    for (std::size_t u = 0; u < q.size(); ++u) {
        auto& cell = cells[g.stratum[u]][g.attribute[u]];
        cell.first += q[u];
        cell.second += 1;
    }

    for (const auto& [z, by_attr] : cells) {
        if (by_attr.size() < 2) {
            std::ostringstream warn;
            warn << "stratum z=" << z << " skipped: fewer than two nonempty attribute cells";
            report.warnings.push_back(warn.str());
            continue;
        }
        std::vector<std::pair<int, double>> means;
        means.reserve(by_attr.size());
        for (const auto& [a, cell] : by_attr)
            means.emplace_back(a, cell.first / static_cast<double>(cell.second));
        for (std::size_t i = 0; i < means.size(); ++i) {
            for (std::size_t j = i + 1; j < means.size(); ++j) {
                report.comparisons += 1;
                const double observed = std::fabs(means[i].second - means[j].second);
                if (observed > eps) {
                    Violation v;
                    v.label = cell_label(z, means[i].first, means[j].first);
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

}  // namespace faircompose
