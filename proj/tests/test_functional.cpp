#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "faircompose/construct.hpp"
#include "faircompose/functional.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace faircompose;
namespace ft = faircompose::testing;

TEST_CASE("compose_or: worked numbers") {
    const SoftClassifier c{{0.5, 0.01}};
    const SoftClassifier copies[2] = {c, c};
    const auto out = compose_or(copies);
    CHECK(out[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(0.0199).epsilon(1e-12));
}

TEST_CASE("compose_or: single classifier is the identity") {
    const SoftClassifier c{{0.3, 0.8}};
    const SoftClassifier one[1] = {c};
    CHECK(compose_or(one) == c.p);
}

TEST_CASE("compose_or: three copies of 0.1 (enumeration)") {
    const SoftClassifier c{{0.1}};
    const SoftClassifier copies[3] = {c, c, c};
    const auto out = compose_or(copies);
    CHECK(out[0] == doctest::Approx(ft::threshold_by_enumeration({0.1, 0.1, 0.1}, 1)));
    CHECK(out[0] == doctest::Approx(0.271).epsilon(1e-12));
}

TEST_CASE("compose_and: worked numbers") {
    const SoftClassifier c{{0.9}};
    const SoftClassifier copies[2] = {c, c};
    CHECK(compose_and(copies)[0] == doctest::Approx(0.81));

    const SoftClassifier a{{0.5}}, b{{0.4}}, d{{0.3}};
    const SoftClassifier three[3] = {a, b, d};
    CHECK(compose_and(three)[0] == doctest::Approx(0.06));
    CHECK(compose_and(three)[0] ==
          doctest::Approx(ft::threshold_by_enumeration({0.5, 0.4, 0.3}, 3)));
}

TEST_CASE("compose_and: zero classifier absorbs") {
    const SoftClassifier a{{0.5, 0.9}}, zero{{0.0, 0.0}};
    const SoftClassifier cs[2] = {a, zero};
    for (double v : compose_and(cs)) CHECK(v == 0.0);
}

TEST_CASE("compose_xor_exactly_one: worked numbers") {
    const SoftClassifier c{{0.05}};
    const SoftClassifier copies[2] = {c, c};
    CHECK(compose_xor_exactly_one(copies)[0] == doctest::Approx(0.095).epsilon(1e-12));

    const SoftClassifier single[1] = {SoftClassifier{{0.42}}};
    CHECK(compose_xor_exactly_one(single)[0] == doctest::Approx(0.42));

    const SoftClassifier h{{0.5}};
    const SoftClassifier three[3] = {h, h, h};
    CHECK(compose_xor_exactly_one(three)[0] == doctest::Approx(0.375));
}

TEST_CASE("compose_threshold: boundary cases equal OR and AND") {
    Rng rng(19);
    std::vector<SoftClassifier> cs;
    for (int i = 0; i < 5; ++i) cs.push_back(SoftClassifier{ft::random_probabilities(4, rng)});
    const auto at_least_one = compose_threshold(cs, 1);
    const auto all_of_them = compose_threshold(cs, cs.size());
    const auto or_composed = compose_or(cs);
    const auto and_composed = compose_and(cs);
    for (std::size_t u = 0; u < 4; ++u) {
        CHECK(at_least_one[u] == doctest::Approx(or_composed[u]).epsilon(1e-12));
        CHECK(all_of_them[u] == doctest::Approx(and_composed[u]).epsilon(1e-12));
    }
}

TEST_CASE("compose_threshold: (0.5,0.5,0.5) at k=2") {
    const SoftClassifier h{{0.5}};
    const std::vector<SoftClassifier> three{h, h, h};
    CHECK(compose_threshold(three, 2)[0] == doctest::Approx(0.5));
}

TEST_CASE("compose_threshold: k out of range") {
    const std::vector<SoftClassifier> one{SoftClassifier{{0.5}}};
    CHECK_THROWS_AS(compose_threshold(one, 0), std::invalid_argument);
    CHECK_THROWS_AS(compose_threshold(one, 2), std::invalid_argument);
}

TEST_CASE("compose_threshold matches outcome enumeration up to 20 classifiers") {
    Rng rng(23);
    for (std::size_t count : {3u, 7u, 12u, 20u}) {
        std::vector<SoftClassifier> cs;
        std::vector<double> probs;
        for (std::size_t i = 0; i < count; ++i) {
            const double p = rng.uniform01();
            probs.push_back(p);
            cs.push_back(SoftClassifier{{p}});
        }
        for (std::size_t k = 1; k <= count; k += std::max<std::size_t>(1, count / 4)) {
            CHECK(compose_threshold(cs, k)[0] ==
                  doctest::Approx(ft::threshold_by_enumeration(probs, k)).epsilon(1e-10));
        }
    }
}

TEST_CASE("compose_or monotone, threshold monotone (property)") {
    Rng rng(29);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 3;
        std::vector<SoftClassifier> cs;
        for (int i = 0; i < 4; ++i) cs.push_back(SoftClassifier{ft::random_probabilities(n, rng)});
        const auto before_or = compose_or(cs);
        const auto before_k = compose_threshold(cs, 2);
        const std::size_t which = rng.below(cs.size());
        const ElementId u = static_cast<ElementId>(rng.below(n));
        cs[which].p[u] = cs[which].p[u] + (1.0 - cs[which].p[u]) * rng.uniform01();
        const auto after_or = compose_or(cs);
        const auto after_k = compose_threshold(cs, 2);
        CHECK(after_or[u] >= before_or[u] - 1e-15);
        CHECK(after_k[u] >= before_k[u] - 1e-15);
    }
}

TEST_CASE("De Morgan: 1 - OR equals AND of complements (property)") {
    Rng rng(37);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.below(4);
        std::vector<SoftClassifier> cs, complements;
        for (int i = 0; i < 3; ++i) {
            auto p = ft::random_probabilities(n, rng);
            std::vector<double> q(n);
            for (std::size_t u = 0; u < n; ++u) q[u] = 1.0 - p[u];
            cs.push_back(SoftClassifier{std::move(p)});
            complements.push_back(SoftClassifier{std::move(q)});
        }
        const auto or_composed = compose_or(cs);
        const auto and_complements = compose_and(complements);
        for (std::size_t u = 0; u < n; ++u)
            CHECK(1.0 - or_composed[u] == doctest::Approx(and_complements[u]).epsilon(1e-12));
    }
}

TEST_CASE("check_heavy_or: boundary and witness") {
    const SoftClassifier half{{0.5, 0.5}};
    const SoftClassifier halves[1] = {half};
    CHECK(check_heavy_or(halves).heavy);

    const SoftClassifier low{{0.5, 0.1}};
    const SoftClassifier lows[1] = {low};
    const auto check = check_heavy_or(lows);
    CHECK_FALSE(check.heavy);
    CHECK(check.witness == ElementId{1});

    const SoftClassifier c3{{0.3, 0.3}};
    const SoftClassifier pair[2] = {c3, c3};
    CHECK(check_heavy_or(pair).heavy);  // 1 - 0.7^2 = 0.51
}

TEST_CASE("group_into_heavy_ors: greedy trace") {
    const SoftClassifier c3{{0.3}};
    const std::vector<SoftClassifier> four{c3, c3, c3, c3};
    const auto grouping = group_into_heavy_ors(four);
    REQUIRE(grouping.ok());
    REQUIRE(grouping.groups.size() == 2);
    CHECK(grouping.groups[0] == std::vector<std::size_t>{0, 1});
    CHECK(grouping.groups[1] == std::vector<std::size_t>{2, 3});

    const std::vector<SoftClassifier> strong{SoftClassifier{{0.9}}};
    CHECK(group_into_heavy_ors(strong).groups.size() == 1);

    const std::vector<SoftClassifier> weak{SoftClassifier{{0.1}}};
    const auto failed = group_into_heavy_ors(weak);
    CHECK_FALSE(failed.ok());
    CHECK(failed.residual == std::vector<std::size_t>{0});
}

TEST_CASE("heavy-OR preservation under a further fair OR (property)") {
    Rng rng(43);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 2 + rng.below(4);
        const TaskMetric m = ft::random_metric(n, rng);
        // base set: one classifier with every probability >= 1/2 plus up to
        // two unconstrained fair ones; the OR stays >= 1/2 everywhere
        std::vector<SoftClassifier> base;
        base.push_back(ft::random_fair_classifier(m, rng, 0.5, 1.0));
        const std::size_t extras = rng.below(3);
        for (std::size_t i = 0; i < extras; ++i)
            base.push_back(ft::random_fair_classifier(m, rng));
        REQUIRE(check_heavy_or(base).heavy);
        for (const auto& c : base) REQUIRE(audit_individual_fairness(m, c.p, 1e-9).clean());

        auto with_extra = base;
        with_extra.push_back(ft::random_fair_classifier(m, rng, 0.5, 1.0));
        const auto composed = compose_or(with_extra);
        CHECK(audit_individual_fairness(m, composed, 1e-9).clean());
    }
}

TEST_CASE("OR of two maximal-gap copies breaks fairness (property)") {
    Rng rng(47);
    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(5);
        const TaskMetric m = ft::random_metric(n, rng);
        const auto pair = ft::nontrivial_pair(m);
        if (!pair) continue;
        ++checked;
        const auto c = maximize_pair_distance(m, pair->first, pair->second);
        REQUIRE(c.p[pair->first] + c.p[pair->second] < 1.0);
        const SoftClassifier copies[2] = {c, c};
        const auto composed = compose_or(copies);
        const auto report = audit_individual_fairness(m, composed, 1e-9);
        CHECK_FALSE(report.clean());
        CHECK(report.max_excess() > 0.0);
    }
    CHECK(checked == 1000);
}

TEST_CASE("different composition counts break fairness (property)") {
    Rng rng(53);
    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(5);
        const TaskMetric m = ft::random_metric(n, rng);
        // pair with the smallest distance strictly below 1
        std::optional<std::pair<ElementId, ElementId>> best;
        for (ElementId u = 0; u < n; ++u)
            for (ElementId v = u + 1; v < n; ++v)
                if (m(u, v) < 1.0 && (!best || m(u, v) < m(best->first, best->second)))
                    best = std::make_pair(u, v);
        if (!best) continue;
        ++checked;
        const auto [u, v] = *best;
        const double gap = m(u, v);
        // centred anchor keeps p_v strictly inside (0,1)
        std::vector<PartialAssignment> seed{{u, (1.0 - gap) / 2.0}, {v, (1.0 + gap) / 2.0}};
        const auto c = copy_behavior_extension(m, seed);
        std::vector<int> degrees(n, 1);
        degrees[v] = 2;
        const auto composed = or_with_multiplicity(c, degrees);
        const auto report = audit_individual_fairness(m, composed, 1e-9);
        CHECK_FALSE(report.clean());
    }
    CHECK(checked == 1000);
}

TEST_CASE("AND across two tasks breaks the outcome metric (property)") {
    Rng rng(59);
    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(5);
        const TaskMetric m = ft::random_metric(n, rng);  // outcome metric = both task metrics
        const auto pair = ft::nontrivial_pair(m);
        if (!pair) continue;
        ++checked;
        const auto [u, v] = *pair;
        const double gap = m(u, v);
        // first classifier: maximal gap with p_v > 0 (centred anchor)
        std::vector<PartialAssignment> seed1{{u, (1.0 + gap) / 2.0}, {v, (1.0 - gap) / 2.0}};
        const auto c1 = copy_behavior_extension(m, seed1);
        // second classifier: p'_u = 1, p'_v = 1 - gap
        std::vector<PartialAssignment> seed2{{u, 1.0}, {v, 1.0 - gap}};
        const auto c2 = copy_behavior_extension(m, seed2);
        const SoftClassifier both[2] = {c1, c2};
        const auto composed = compose_and(both);
        const auto report = audit_individual_fairness(m, composed, 1e-9);
        CHECK_FALSE(report.clean());
        // the pair itself must be among the violations
        const double observed = std::fabs(composed[u] - composed[v]);
        CHECK(observed - gap > 1e-9);
    }
    CHECK(checked == 1000);
}
