#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <set>

#include "faircompose/cohort.hpp"
#include "faircompose/subset.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace faircompose;
namespace ft = faircompose::testing;

TEST_CASE("check_constrained_feasibility: blow-up instance") {
    const std::vector<std::pair<double, double>> parts{{1.0, 0.0}};
    const auto report = check_constrained_feasibility(10, 50, 20, 0.5, parts);
    CHECK_FALSE(report.feasible);
    CHECK(report.mean_gap >= 0.8 - 1e-12);
    CHECK(report.mu_a_lower == doctest::Approx(1.0));
    CHECK(report.mu_b_upper == doctest::Approx(0.2));
}

TEST_CASE("check_constrained_feasibility: worked slack and p_max") {
    const std::vector<std::pair<double, double>> parts{{0.4, 0.25}, {0.5, 0.1}, {0.1, 0.0}};
    const auto report = check_constrained_feasibility(100, 1000, 550, 0.12, parts);
    CHECK(report.slack == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(report.p_max == doctest::Approx(700.0 / 6050.0).epsilon(1e-12));
    CHECK_FALSE(report.feasible);
}

TEST_CASE("check_constrained_feasibility: full slack is always feasible") {
    const std::vector<std::pair<double, double>> parts{{1.0, 1.0}};
    const auto report = check_constrained_feasibility(5, 20, 10, 0.4, parts);
    CHECK(report.feasible);
}

TEST_CASE("check_constrained_feasibility: counting errors and monotone slack") {
    const std::vector<std::pair<double, double>> parts{{1.0, 0.0}};
    CHECK_THROWS_AS(check_constrained_feasibility(3, 50, 20, 0.5, parts), std::invalid_argument);

    Rng rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t a = 5 + rng.below(20), b = 5 + rng.below(50);
        const std::size_t n = 1 + rng.below(a + b);
        const double p_hi = std::min(1.0, static_cast<double>(a) / n);
        const double p_lo = std::max(0.0, 1.0 - static_cast<double>(b) / n);
        if (p_lo > p_hi) continue;
        const double p = p_lo + (p_hi - p_lo) * rng.uniform01();
        const double g1 = rng.uniform01(), g2 = rng.uniform01();
        const double beta = rng.uniform01();
        const std::vector<std::pair<double, double>> lo{{beta, g1 * 0.5}, {1.0 - beta, g2}};
        const std::vector<std::pair<double, double>> hi{{beta, g1}, {1.0 - beta, g2}};
        const auto report_lo = check_constrained_feasibility(a, b, n, p, lo);
        const auto report_hi = check_constrained_feasibility(a, b, n, p, hi);
        if (report_lo.feasible) CHECK(report_hi.feasible);
    }
}

TEST_CASE("estimate_gamma_partition: zero-distance blow-up collapses to one part") {
    // five copies of each A element at distance zero
    std::vector<double> q{0.2, 0.8};
    std::vector<ElementId> a{0, 1}, b;
    for (int copy = 0; copy < 5; ++copy) {
        q.push_back(0.2);
        q.push_back(0.8);
        b.push_back(2 + copy * 2);
        b.push_back(3 + copy * 2);
    }
    const TaskMetric m = TaskMetric::abs_diff(q);
    const auto partition = estimate_gamma_partition(m, a, b);
    REQUIRE(partition.parts.size() == 1);
    CHECK(partition.parts[0].gamma == 0.0);
    CHECK(partition.parts[0].beta == doctest::Approx(1.0));
    for (const auto& [from, to] : partition.parts[0].witness_edges) CHECK(m(from, to) == 0.0);
}

TEST_CASE("estimate_gamma_partition: shifted line gives gamma 0.1") {
    const std::vector<double> q{0.0, 0.3, 0.6, 0.1, 0.4, 0.7};
    const TaskMetric m = TaskMetric::abs_diff(q);
    const std::vector<ElementId> a{0, 1, 2}, b{3, 4, 5};
    const auto partition = estimate_gamma_partition(m, a, b);
    double max_gamma = 0.0;
    for (const auto& part : partition.parts) max_gamma = std::max(max_gamma, part.gamma);
    CHECK(max_gamma == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("estimate_gamma_partition: singleton A, one part with max distance") {
    Rng rng(11);
    const TaskMetric m = ft::random_metric(6, rng);
    const std::vector<ElementId> a{0}, b{1, 2, 3, 4, 5};
    const std::vector<double> one_bin{1.0};
    const auto partition = estimate_gamma_partition(m, a, b, one_bin);
    REQUIRE(partition.parts.size() == 1);
    double expect = 0.0;
    for (ElementId u : b) expect = std::max(expect, m(0, u));
    CHECK(partition.parts[0].gamma == doctest::Approx(expect));
    // invariants: partition covers B, betas sum to one, edges within gamma
    double beta = 0.0;
    std::set<ElementId> covered;
    for (const auto& part : partition.parts) {
        beta += part.beta;
        for (ElementId u : part.members) covered.insert(u);
        for (const auto& [from, to] : part.witness_edges)
            CHECK(m(from, to) <= part.gamma + 1e-12);
    }
    CHECK(beta == doctest::Approx(1.0));
    CHECK(covered.size() == b.size());
}

TEST_CASE("intragroup_ptc: blow-up quota floods group A") {
    // |A| = 3, n = 6, p = 1/2 -> all of A; B of 15 at rate 1/5
    std::vector<double> probs(18, 0.5);
    const SoftClassifier c{probs};
    std::vector<ElementId> a{0, 1, 2}, b;
    for (ElementId u = 3; u < 18; ++u) b.push_back(u);
    Rng rng(13);
    std::vector<std::size_t> hits(18, 0);
    const std::size_t trials = 4000;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto cohort = intragroup_ptc(c, a, b, 6, 0.5, rng);
        CHECK(cohort.members.size() == 6);
        CHECK(cohort.n_a == 3);
        for (ElementId u : cohort.members) hits[u] += 1;
    }
    for (ElementId u : a) CHECK(hits[u] == trials);
    double b_rate = 0.0;
    for (ElementId u : b) b_rate += static_cast<double>(hits[u]) / trials;
    CHECK(b_rate / b.size() == doctest::Approx(0.2).epsilon(0.05));
}

TEST_CASE("intragroup_ptc: intra-group pairwise bounds hold (exact per group)") {
    Rng rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t na = 2 + rng.below(2), nb = 2 + rng.below(2);
        std::vector<double> p = ft::random_probabilities(na + nb, rng);
        const SoftClassifier c{p};
        std::vector<ElementId> a, b;
        for (ElementId u = 0; u < na; ++u) a.push_back(u);
        for (ElementId u = na; u < na + nb; ++u) b.push_back(u);
        // group quotas: 1 from A, 1 from B
        // exact per-group selection probabilities via the restricted oracle
        std::vector<double> pa, pb;
        for (ElementId u : a) pa.push_back(p[u]);
        for (ElementId u : b) pb.push_back(p[u]);
        const auto da = ptc_selection_distribution(SoftClassifier{pa}, 1);
        const auto db = ptc_selection_distribution(SoftClassifier{pb}, 1);
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t j = i + 1; j < na; ++j)
                CHECK(std::fabs(da[i] - da[j]) <= std::fabs(pa[i] - pa[j]) + 1e-12);
        for (std::size_t i = 0; i < nb; ++i)
            for (std::size_t j = i + 1; j < nb; ++j)
                CHECK(std::fabs(db[i] - db[j]) <= std::fabs(pb[i] - pb[j]) + 1e-12);
    }
}

TEST_CASE("positive_weights_rescale: uniform weights change nothing") {
    const SoftClassifier c{{0.3, 0.8, 0.5}};
    const std::vector<double> q(3, 0.7);
    const auto rc = positive_weights_rescale(c, q);
    CHECK(rc.conditional.p == c.p);
    CHECK(rc.q_min == doctest::Approx(0.7));
}

TEST_CASE("positive_weights_rescale: equal treatment restored") {
    const SoftClassifier c{{0.4, 0.4}};
    const std::vector<double> q{1.0, 0.5};
    const auto rc = positive_weights_rescale(c, q);
    const auto effective = effective_probabilities(rc);
    CHECK(effective[0] == doctest::Approx(0.2));
    CHECK(effective[1] == doctest::Approx(0.2));
}

TEST_CASE("positive_weights_rescale: zero weight is an error") {
    const SoftClassifier c{{0.4, 0.4}};
    const std::vector<double> q{1.0, 0.0};
    CHECK_THROWS_AS(positive_weights_rescale(c, q), std::invalid_argument);
}

TEST_CASE("rescaled pairwise gaps shrink by q_min (exact, property)") {
    Rng rng(19);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(5);
        const TaskMetric m = ft::random_metric(n, rng);
        const auto c = ft::random_fair_classifier(m, rng);
        const auto weights = ft::random_probabilities(n, rng, 0.05, 1.0);
        const auto rc = positive_weights_rescale(c, weights);
        const auto effective = effective_probabilities(rc);
        for (ElementId u = 0; u < n; ++u) {
            CHECK(effective[u] == doctest::Approx(rc.q_min * c.p[u]).epsilon(1e-12));
            for (ElementId v = u + 1; v < n; ++v)
                CHECK(std::fabs(effective[u] - effective[v]) <= m(u, v) + 1e-12);
        }
    }
}

TEST_CASE("contextual warning fires on foreign weights") {
    const SoftClassifier c{{0.4, 0.4}};
    const std::vector<double> assumed{1.0, 0.5};
    const auto rc = positive_weights_rescale(c, assumed);
    const std::vector<double> other{0.5, 0.5};
    const auto effect = effective_probabilities_in_context(rc, other);
    CHECK(effect.warning.has_value());
    const auto same = effective_probabilities_in_context(rc, assumed);
    CHECK_FALSE(same.warning.has_value());
}

TEST_CASE("run_subset_experiment: full universe reproduces the classifier") {
    const SoftClassifier c{{0.3, 0.8, 0.55}};
    const auto system = classify_independently(c);
    const auto y = SubsetDistribution::full(3);
    const auto x = OrderingDistribution::uniform();
    const std::size_t trials = 40000;
    for (ElementId u = 0; u < 3; ++u) {
        const auto estimate = run_subset_experiment(system, y, x, u, trials, 7 + u);
        const double sigma = std::sqrt(c.p[u] * (1.0 - c.p[u]) / trials);
        CHECK(std::fabs(estimate.value - c.p[u]) <= 3.0 * sigma);
    }
}

TEST_CASE("run_subset_experiment: exact mode for explicit subsets") {
    const SoftClassifier c{{0.5, 0.25}};
    const auto system = classify_independently(c);
    std::vector<std::pair<std::vector<ElementId>, double>> sets{{{0}, 1.0}};
    const auto y = SubsetDistribution::explicit_sets(2, std::move(sets));
    const auto x = OrderingDistribution::uniform();
    const auto absent = run_subset_experiment(system, y, x, 1, 10, 1);
    CHECK(absent.exact);
    CHECK(absent.value == 0.0);
    const auto present = run_subset_experiment(system, y, x, 0, 10, 1);
    CHECK(present.value == doctest::Approx(0.5));
}

TEST_CASE("run_subset_experiment: independent inclusion with rescaling hits q_min * p") {
    const SoftClassifier c{{0.6, 0.4, 0.7}};
    const std::vector<double> weights{1.0, 0.5, 0.8};
    const auto rc = positive_weights_rescale(c, weights);
    const auto system = classify_independently(rc);
    const auto y = SubsetDistribution::independent(weights);
    const auto x = OrderingDistribution::uniform();
    const std::size_t trials = 60000;
    for (ElementId u = 0; u < 3; ++u) {
        const double target = rc.q_min * c.p[u];
        const auto estimate = run_subset_experiment(system, y, x, u, trials, 100 + u);
        const double sigma = std::sqrt(target * (1.0 - target) / trials);
        CHECK(std::fabs(estimate.value - target) <= 3.0 * sigma);
    }
}

TEST_CASE("rescaling exact expectation over an explicit subset distribution") {
    // independent inclusion written out as an explicit distribution over all
    // subsets, checked against the closed form q_min * p
    const SoftClassifier c{{0.6, 0.4}};
    const std::vector<double> weights{1.0, 0.5};
    const auto rc = positive_weights_rescale(c, weights);
    std::vector<std::pair<std::vector<ElementId>, double>> sets{
        {{0, 1}, 0.5}, {{0}, 0.5}, {{1}, 0.0}, {{}, 0.0}};
    const auto y = SubsetDistribution::explicit_sets(2, std::move(sets));
    const auto system = classify_independently(rc);
    const auto x = OrderingDistribution::uniform();
    for (ElementId u = 0; u < 2; ++u) {
        const auto estimate = run_subset_experiment(system, y, x, u, 1, 1);
        CHECK(estimate.exact);
        CHECK(estimate.value == doctest::Approx(rc.q_min * c.p[u]).epsilon(1e-12));
    }
}

TEST_CASE("copy_behavior_extension: empty complement is the identity") {
    Rng rng(23);
    const TaskMetric m = ft::random_metric(4, rng);
    const auto base = ft::random_fair_classifier(m, rng);
    std::vector<PartialAssignment> all;
    for (ElementId u = 0; u < 4; ++u) all.emplace_back(u, base.p[u]);
    const auto extended = copy_behavior_extension(m, all);
    CHECK(extended.p == base.p);
}

TEST_CASE("copy_behavior_extension: rejects unfair externals") {
    TaskMetric m(3);
    m.set(0, 1, 0.1);
    m.set(0, 2, 0.5);
    m.set(1, 2, 0.5);
    const std::vector<PartialAssignment> bad{{0, 0.9}, {1, 0.1}};
    CHECK_THROWS_AS(copy_behavior_extension(m, bad), std::invalid_argument);
}

TEST_CASE("copy_behavior_extension: fairness preserved (property)") {
    Rng rng(29);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 3 + rng.below(5);
        const TaskMetric m = ft::random_metric(n, rng);
        const auto base = ft::random_fair_classifier(m, rng);
        // random strict subset as the external classifier
        std::vector<PartialAssignment> external;
        for (ElementId u = 0; u < n; ++u)
            if (rng.below(2) == 0) external.emplace_back(u, base.p[u]);
        if (external.size() == n) external.pop_back();
        const auto extended = copy_behavior_extension(m, external);
        for (const auto& [id, prob] : external) CHECK(extended.p[id] == prob);
        CHECK(audit_individual_fairness(m, extended.p, 1e-9).clean());
    }
}

TEST_CASE("copy_behavior_extension: constant externals extend cleanly") {
    Rng rng(31);
    const TaskMetric m = ft::random_metric(6, rng);
    const std::vector<PartialAssignment> external{{1, 0.5}, {4, 0.5}};
    const auto extended = copy_behavior_extension(m, external);
    CHECK(audit_individual_fairness(m, extended.p, 1e-9).clean());
}
