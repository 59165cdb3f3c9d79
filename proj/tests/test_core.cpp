#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "faircompose/core.hpp"
#include "faircompose/functional.hpp"
#include "support/generators.hpp"

using namespace faircompose;
namespace ft = faircompose::testing;

TEST_CASE("validate_metric accepts the zero metric") {
    const TaskMetric m(3);
    CHECK(validate_metric(m).ok());
    CHECK(m.is_trivial());
}

TEST_CASE("validate_metric reports asymmetry with indices") {
    TaskMetric m = TaskMetric::from_rows({{0.0, 0.2, 0.0}, {0.3, 0.0, 0.0}, {0.0, 0.0, 0.0}});
    const auto validation = validate_metric(m);
    REQUIRE_FALSE(validation.ok());
    const bool found = std::any_of(validation.issues.begin(), validation.issues.end(),
                                   [](const MetricIssue& issue) {
                                       return issue.kind == MetricIssue::Kind::symmetry &&
                                              issue.i == 0 && issue.j == 1;
                                   });
    CHECK(found);
}

TEST_CASE("validate_metric reports triangle violations") {
    TaskMetric m(3);
    m.set(0, 1, 0.1);
    m.set(1, 2, 0.1);
    m.set(0, 2, 0.5);  // 0.5 > 0.1 + 0.1
    const auto validation = validate_metric(m);
    REQUIRE_FALSE(validation.ok());
    const bool found = std::any_of(
        validation.issues.begin(), validation.issues.end(), [](const MetricIssue& issue) {
            return issue.kind == MetricIssue::Kind::triangle;
        });
    CHECK(found);
    CHECK_FALSE(m.is_trivial());
}

TEST_CASE("validate_metric flags range and diagonal issues") {
    TaskMetric m(2);
    m.set(0, 1, 1.5);
    const auto range = validate_metric(m);
    CHECK_FALSE(range.ok());

    TaskMetric d(2);
    d.set(0, 1, 0.5);
    // poke the diagonal directly
    d.set(1, 1, 0.25);
    CHECK_FALSE(validate_metric(d).ok());
}

TEST_CASE("individual fairness audit: constant vector is clean") {
    Rng rng(7);
    const TaskMetric m = ft::random_metric(6, rng);
    const std::vector<double> q(6, 0.42);
    const auto report = audit_individual_fairness(m, q);
    CHECK(report.clean());
    CHECK(report.comparisons == 15);
}

TEST_CASE("individual fairness audit: worked divergence numbers") {
    const TaskMetric m = TaskMetric::from_rows({{0.0, 0.49}, {0.49, 0.0}});
    const std::vector<double> q{0.75, 0.0199};
    const auto report = audit_individual_fairness(m, q, 1e-9);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].a == 0);
    CHECK(report.violations[0].b == 1);
    CHECK(report.violations[0].excess == doctest::Approx(0.2401).epsilon(1e-12));
    CHECK(report.fraction_violating() == doctest::Approx(1.0));
}

TEST_CASE("individual fairness audit is symmetric and relabel-invariant") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng.below(5);
        const TaskMetric m = ft::random_metric(n, rng);
        auto q = ft::random_probabilities(n, rng);
        const auto report = audit_individual_fairness(m, q);
        for (const Violation& v : report.violations) CHECK(v.a < v.b);

        // relabel by a random permutation
        const auto perm = ft::random_order(n, rng);
        TaskMetric pm(n);
        std::vector<double> pq(n);
        for (std::size_t i = 0; i < n; ++i) {
            pq[perm[i]] = q[i];
            for (std::size_t j = 0; j < i; ++j) pm.set(perm[i], perm[j], m(i, j));
        }
        const auto relabeled = audit_individual_fairness(pm, pq);
        CHECK(relabeled.violations.size() == report.violations.size());
        CHECK(relabeled.max_excess() == doctest::Approx(report.max_excess()).epsilon(1e-12));
    }
}

TEST_CASE("audit rejects bad input") {
    const TaskMetric m(2);
    CHECK_THROWS_AS(audit_individual_fairness(m, std::vector<double>{0.5}), std::invalid_argument);
    CHECK_THROWS_AS(audit_individual_fairness(m, std::vector<double>{0.5, 1.5}),
                    std::invalid_argument);
}

TEST_CASE("conditional parity audit: bimodal group example") {
    // group 0 all at 0.75; group 1 half at 0.5, half at 1.0; one stratum
    GroupStructure g;
    g.attribute = {0, 0, 1, 1};
    g.stratum = {0, 0, 0, 0};
    const std::vector<double> single{0.75, 0.75, 0.5, 1.0};
    CHECK(audit_conditional_parity(g, single).clean());

    const SoftClassifier c{single};
    const SoftClassifier copies[2] = {c, c};
    const auto composed = compose_or(copies);
    const auto report = audit_conditional_parity(g, composed);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].observed == doctest::Approx(0.0625).epsilon(1e-12));
    // the group means themselves
    CHECK(composed[0] == doctest::Approx(0.9375));
    CHECK((composed[2] + composed[3]) / 2 == doctest::Approx(0.875));
}

TEST_CASE("conditional parity audit: single attribute value yields no comparisons") {
    GroupStructure g;
    g.attribute = {0, 0, 0};
    g.stratum = {0, 0, 0};
    const std::vector<double> q{0.1, 0.5, 0.9};
    const auto report = audit_conditional_parity(g, q);
    CHECK(report.clean());
    CHECK(report.comparisons == 0);
    REQUIRE(report.warnings.size() == 1);
}

TEST_CASE("conditional parity audit: per-stratum-constant classifier is clean") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 8;
        GroupStructure g;
        g.attribute.resize(n);
        g.stratum.resize(n);
        std::vector<double> by_stratum{rng.uniform01(), rng.uniform01(), rng.uniform01()};
        std::vector<double> q(n);
        for (std::size_t u = 0; u < n; ++u) {
            g.attribute[u] = static_cast<int>(rng.below(2));
            g.stratum[u] = static_cast<int>(rng.below(3));
            q[u] = by_stratum[g.stratum[u]];
        }
        CHECK(audit_conditional_parity(g, q).clean());
    }
}

TEST_CASE("system outcome validation enforces the single-slot row bound") {
    SystemOutcome outcome;
    outcome.elements = 1;
    outcome.tasks = 2;
    outcome.single_slot = true;
    outcome.probs = {0.7, 0.4};
    CHECK_THROWS_AS(outcome.validate(), std::invalid_argument);
    outcome.probs = {0.7, 0.3};
    CHECK_NOTHROW(outcome.validate());
}

TEST_CASE("report aggregates are recomputable from the violation list") {
    Rng rng(99);
    const TaskMetric m = ft::random_metric(8, rng);
    const auto q = ft::random_probabilities(8, rng);
    const auto report = audit_individual_fairness(m, q);
    double mean = 0.0, best = 0.0;
    for (const Violation& v : report.violations) {
        mean += v.excess;
        best = std::max(best, v.excess);
        CHECK(v.excess == doctest::Approx(v.observed - v.allowed));
        CHECK(v.excess > report.epsilon);
    }
    if (!report.violations.empty()) mean /= static_cast<double>(report.violations.size());
    CHECK(report.mean_excess() == doctest::Approx(mean));
    CHECK(report.max_excess() == doctest::Approx(best));
}
