#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace faircompose {

using ElementId = std::size_t;
inline constexpr ElementId kNoElement = std::numeric_limits<ElementId>::max();

// Audit tolerance absorbing floating point noise; every counterexample this
// library reproduces exceeds it by orders of magnitude.
inline constexpr double kDefaultEpsilon = 1e-9;

// Universe of individuals, ids 0..size-1. Labels are display-only.
struct Universe {
    std::size_t size = 0;
    std::vector<std::string> labels;  // empty or one per element
};

// Pairwise dissimilarity in [0,1]; the fairness budget for one task.
// Symmetric, zero diagonal, triangle inequality required (constructors that
// extend classifiers rely on it).
class TaskMetric {
public:
    TaskMetric() = default;
    explicit TaskMetric(std::size_t n) : n_(n), d_(n * n, 0.0) {}

    static TaskMetric from_rows(const std::vector<std::vector<double>>& rows);
    // |q_u - q_v| of scalar qualifications; always a valid metric.
    static TaskMetric abs_diff(std::span<const double> qualifications);
    // All off-diagonal distances one (the maximally permissive trivial metric).
    static TaskMetric all_ones(std::size_t n);

    std::size_t size() const { return n_; }
    double operator()(ElementId u, ElementId v) const { return d_[u * n_ + v]; }
    void set(ElementId u, ElementId v, double value) {
        d_[u * n_ + v] = value;
        d_[v * n_ + u] = value;
    }

    // True iff every entry is 0 or 1.
    bool is_trivial() const;

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

struct MetricIssue {
    enum class Kind { diagonal, range, symmetry, triangle };
    Kind kind;
    ElementId i = kNoElement, j = kNoElement, k = kNoElement;
    double value = 0.0;
    std::string describe() const;
};

struct MetricValidation {
    std::vector<MetricIssue> issues;
    bool ok() const { return issues.empty(); }
};

// Reports every diagonal/range/symmetry/triangle violation with indices.
MetricValidation validate_metric(const TaskMetric& m);
// Throws std::invalid_argument listing the first few issues.
void require_valid_metric(const TaskMetric& m, const char* context);

// Per-element probability of the positive outcome for one task.
struct SoftClassifier {
    std::vector<double> p;
    std::size_t size() const { return p.size(); }
};

// Throws std::invalid_argument if any entry is outside [0,1] or not finite.
void validate_probabilities(std::span<const double> p, const char* what);

// Per-element, per-task positive probabilities after composition.
struct SystemOutcome {
    std::size_t elements = 0;
    std::size_t tasks = 0;
    bool single_slot = false;  // row sums <= 1 (+1e-12) when set
    std::vector<double> probs;  // row-major [element * tasks + task]

    double at(ElementId u, std::size_t task) const { return probs[u * tasks + task]; }
    std::vector<double> task_column(std::size_t task) const;
    void validate() const;  // throws on range or single-slot violations
};

// Group labels for one task: protected attribute a(u) and stratification z(u),
// plus optional named subgroup indicator columns (e.g. "parent").
struct GroupStructure {
    std::vector<int> attribute;
    std::vector<int> stratum;
    std::map<std::string, std::vector<std::uint8_t>> subgroups;

    std::size_t size() const { return attribute.size(); }
};

// One violating pair or stratum comparison.
struct Violation {
    ElementId a = kNoElement;  // pair audits
    ElementId b = kNoElement;
    std::string label;  // stratum audits, e.g. "z=1: a=0 vs a=2"
    double observed = 0.0;
    double allowed = 0.0;
    double excess = 0.0;
};

struct FairnessReport {
    std::vector<Violation> violations;
    std::vector<std::string> warnings;  // skipped strata etc., never silent
    std::size_t comparisons = 0;        // pairs or cells examined
    double epsilon = kDefaultEpsilon;

    bool clean() const { return violations.empty(); }
    double fraction_violating() const {
        return comparisons == 0 ? 0.0
                                : static_cast<double>(violations.size()) / static_cast<double>(comparisons);
    }
    double mean_excess() const;
    double max_excess() const;
};

// Lists every pair with |q[u]-q[v]| - m(u,v) > eps.
FairnessReport audit_individual_fairness(const TaskMetric& m, std::span<const double> q,
                                         double eps = kDefaultEpsilon);

// For every stratum and attribute pair with nonempty cells, compares the
// unweighted mean outcome probability; strata with fewer than two nonempty
// cells are skipped with a warning entry.
FairnessReport audit_conditional_parity(const GroupStructure& g, std::span<const double> q,
                                        double eps = kDefaultEpsilon);

}  // namespace faircompose
