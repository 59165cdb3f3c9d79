#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "faircompose/cohort.hpp"
#include "faircompose/competitive.hpp"
#include "faircompose/construct.hpp"
#include "faircompose/experiments.hpp"
#include "faircompose/functional.hpp"
#include "faircompose/group.hpp"
#include "faircompose/subset.hpp"

namespace faircompose {

namespace {

void demo_or_divergence(std::ostream& out) {
    out << "OR of two fair applications of the same classifier can stretch pairwise"
           " distances beyond the metric.\n";
    const SoftClassifier c{{0.5, 0.01}};
    const SoftClassifier copies[2] = {c, c};
    const auto composed = compose_or(copies);
    const TaskMetric m = TaskMetric::from_rows({{0.0, 0.49}, {0.49, 0.0}});
    const auto report = audit_individual_fairness(m, composed);
    out << "  base probabilities: " << c.p[0] << " and " << c.p[1] << "\n";
    out << "  OR of two independent applications: " << composed[0] << " and " << composed[1]
        << "\n";
    out << "  allowed distance " << m(0, 1) << ", observed " << composed[0] - composed[1]
        << ", excess " << report.max_excess() << "\n";
}

void demo_bimodal_parity(std::ostream& out) {
    out << "Conditional parity that holds for one application breaks under the OR of"
           " two: a unimodal and a bimodal group with equal means diverge.\n";
    // group 0: four elements at 0.75; group 1: two at 0.5 and two at 1.0
    const SoftClassifier c{{0.75, 0.75, 0.75, 0.75, 0.5, 0.5, 1.0, 1.0}};
    GroupStructure g;
    g.attribute = {0, 0, 0, 0, 1, 1, 1, 1};
    g.stratum = {0, 0, 0, 0, 0, 0, 0, 0};
    const auto single = audit_conditional_parity(g, c.p);
    const SoftClassifier copies[2] = {c, c};
    const auto composed = compose_or(copies);
    double mean0 = 0.0, mean1 = 0.0;
    for (int u = 0; u < 4; ++u) mean0 += composed[u] / 4.0;
    for (int u = 4; u < 8; ++u) mean1 += composed[u] / 4.0;
    const auto twice = audit_conditional_parity(g, composed);
    out << "  single application: parity " << (single.clean() ? "holds" : "fails") << "\n";
    out << "  after OR of two applications the group means are " << mean0 << " vs " << mean1
        << " (violation " << twice.max_excess() << ")\n";
}

void demo_and_unfairness(std::ostream& out) {
    out << "AND across two tasks can violate the outcome metric even though each"
           " classifier is fair for its own task.\n";
    const TaskMetric m = TaskMetric::from_rows({{0.0, 0.4}, {0.4, 0.0}});
    const SoftClassifier first = maximize_pair_distance(m, 0, 1, 0.3);  // 0.7 vs 0.3
    const SoftClassifier second{{1.0, 0.6}};  // gap 0.4, fair for the second task
    const SoftClassifier both[2] = {first, second};
    const auto composed = compose_and(both);
    const auto report = audit_individual_fairness(m, composed);
    out << "  task probabilities: (" << first.p[0] << "," << first.p[1] << ") and ("
        << second.p[0] << "," << second.p[1] << ")\n";
    out << "  AND outcome: " << composed[0] << " vs " << composed[1] << ", allowed " << m(0, 1)
        << ", excess " << report.max_excess() << "\n";
}

void demo_competitive_witness(std::ostream& out) {
    out << "Whatever the tie-break, two fair classifiers exist whose single-slot"
           " composition is unfair for some task.\n";
    const TaskMetric d0 = TaskMetric::from_rows({{0.0, 0.6, 0.5}, {0.6, 0.0, 0.4}, {0.5, 0.4, 0.0}});
    const TaskMetric d1 = TaskMetric::from_rows({{0.0, 0.0, 0.3}, {0.0, 0.0, 0.3}, {0.3, 0.3, 0.0}});
    const TieBreaker tb = TieBreaker::strict_order(2, {0, 1});
    const auto witness = find_violation_witness(d0, d1, tb, 500000);
    out << "  witness pair (" << witness.u << "," << witness.v << ") with base probabilities ("
        << witness.first.p[witness.u] << "," << witness.first.p[witness.v] << ") and ("
        << witness.second.p[witness.u] << "," << witness.second.p[witness.v] << ")\n";
    out << "  both inputs pass their own audits; composed max excess " << witness.best_excess
        << "\n";
}

void demo_ptc_vs_oracle(std::ostream& out) {
    out << "Permute-then-classify keeps selection probabilities within the pairwise"
           " metric bound; exact enumeration and sampling agree.\n";
    const SoftClassifier c{{1.0, 0.0}};
    const auto exact0 = ptc_selection_probability(c, 1, 0);
    const auto exact1 = ptc_selection_probability(c, 1, 1);
    const auto mc = ptc_selection_probability(c, 1, 0, MonteCarlo{200000, 11});
    out << "  two elements with probabilities (1, 0), one slot\n";
    out << "  exact selection probabilities: " << exact0.value << " and " << exact1.value << "\n";
    out << "  monte carlo for the first element: " << mc.value << " +- " << mc.std_error << "\n";
    out << "  the gap equals |p_0 - p_1| = 1 exactly, so the bound is tight\n";
}

void demo_ws_closed_form(std::ostream& out) {
    out << "Weighted sampling selects each n-subset with probability proportional to"
           " its total weight; the closed form matches full enumeration.\n";
    const SoftClassifier c{{1.0, 0.0, 0.0}};
    out << "  three elements with probabilities (1, 0, 0), two slots\n";
    out << "  set weights: {0,1} -> 1, {0,2} -> 1, {1,2} -> 0 (normalizer 2)\n";
    for (ElementId u = 0; u < 3; ++u)
        out << "  closed-form Pr[" << u << " selected] = " << ws_selection_probability(c, 2, u)
            << "\n";
}

void demo_constrained_infeasible(std::ostream& out) {
    out << "A quota on one group forces a mean acceptance gap; when the groups are"
           " similar the gap cannot be squared with individual fairness.\n";
    const std::vector<std::pair<double, double>> parts{{0.4, 0.25}, {0.5, 0.1}, {0.1, 0.0}};
    const auto report = check_constrained_feasibility(100, 1000, 550, 0.12, parts);
    out << "  |A|=100, |B|=1000, n=550, parts (beta,gamma): (0.4,0.25) (0.5,0.1) (0.1,0)\n";
    out << "  similarity slack = " << report.slack << "\n";
    out << "  maximum feasible constraint fraction p_max = " << report.p_max << "\n";
    out << "  at p=0.12 the forced mean gap is " << report.mean_gap << " > slack, so: "
        << (report.feasible ? "feasible" : "infeasible") << "\n";
    const auto blowup = check_constrained_feasibility(10, 50, 20, 0.5, {{{1.0, 0.0}}});
    out << "  blow-up instance (|A|=10, |B|=50, n=20, p=0.5, gamma=0): forced gap "
        << blowup.mean_gap << ", infeasible with identical twins split by "
        << blowup.mean_gap << "\n";
}

void demo_mothers_subgroup(std::ostream& out) {
    out << "Rebalancing at the coarse group level can hide a subgroup exclusion:"
           " parity over gender holds while mothers never see the ad.\n";
    // 4 men (2 parents), 4 women (2 mothers); home-goods targets mothers hard.
    GroupStructure g;
    g.attribute = {0, 0, 0, 0, 1, 1, 1, 1};  // gender
    g.stratum = {0, 0, 0, 0, 0, 0, 0, 0};    // all equally qualified
    g.subgroups["parent"] = {0, 0, 1, 1, 0, 0, 1, 1};
    const double h = 0.8;  // home-goods probability for mothers
    SoftClassifier home_goods{{0, 0, 0, 0, 0, 0, h, h}};
    // jobs advertiser bids more on women so the coarse means match
    const double base = 0.5;
    const double women_bid = base / (1.0 - 0.5 * h);
    SoftClassifier jobs{{base, base, base, base, women_bid, women_bid, women_bid, women_bid}};
    const SoftClassifier pair[2] = {home_goods, jobs};
    const TieBreaker tb = TieBreaker::strict_order(2, {0, 1});
    const auto composed = compose_competitive(pair, tb);
    const auto jobs_shown = composed.task_column(1);
    const auto coarse = audit_parity_under_composition(g, jobs_shown);
    const auto fine = audit_subgroup_parity(g, "parent", jobs_shown);
    out << "  job-ad rates: men " << jobs_shown[0] << ", women without children " << jobs_shown[4]
        << ", mothers " << jobs_shown[6] << "\n";
    out << "  coarse gender audit: " << (coarse.clean() ? "passes" : "fails") << "\n";
    out << "  subgroup audit (gender x parent): " << (fine.clean() ? "passes" : "fails")
        << " with max gap " << fine.max_excess() << "\n";
}

void demo_statistical_parity_adversarial(std::ostream& out) {
    out << "Filling per-group quotas in stream order satisfies statistical parity"
           " for any stream length, but an adversarial order decides who wins.\n";
    // qualifications: men arrive best-first, women worst-first
    const std::vector<ElementId> stream{0, 4, 1, 5, 2, 6, 3, 7};
    const std::vector<int> group{0, 0, 0, 0, 1, 1, 1, 1};
    const std::vector<double> quals{0.9, 0.8, 0.3, 0.2, 0.2, 0.3, 0.8, 0.9};
    const std::vector<double> proportions{0.5, 0.5};
    const auto cohort = statistical_parity_online(stream, group, proportions, 4);
    out << "  selected:";
    for (ElementId u : cohort.members) out << " " << u << "(q=" << quals[u] << ")";
    out << "\n  " << cohort.warning << "\n";
    GroupStructure g;
    g.attribute = group;
    g.stratum.resize(8);
    for (std::size_t u = 0; u < 8; ++u) g.stratum[u] = quals[u] >= 0.5 ? 1 : 0;
    std::vector<double> selected(8, 0.0);
    for (ElementId u : cohort.members) selected[u] = 1.0;
    const auto parity = audit_conditional_parity(g, selected);
    out << "  conditional parity over qualification strata: "
        << (parity.clean() ? "holds" : "fails") << " (max gap " << parity.max_excess() << ")\n";
}

void demo_rtc_allocation(std::ostream& out) {
    out << "Randomizing the task first composes fairly but scales every task's"
           " allocation by its probability.\n";
    const TaskMetric m = TaskMetric::abs_diff(std::vector<double>{0.9, 0.5, 0.2, 0.7});
    const AllocationTarget target{{0.9, 0.5, 0.2, 0.7}, 2.0};
    const SoftClassifier c0 = optimize_fair_classifier(m, target);
    const SoftClassifier c1{{0.4, 0.4, 0.4, 0.4}};
    const SoftClassifier pair[2] = {c0, c1};
    const auto composed = randomize_then_classify(pair, std::vector<double>{0.5, 0.5});
    for (int t = 0; t < 2; ++t) {
        const auto column = composed.task_column(t);
        const double alloc = std::accumulate(column.begin(), column.end(), 0.0);
        const double base = std::accumulate(pair[t].p.begin(), pair[t].p.end(), 0.0);
        out << "  task " << t << ": allocation " << alloc << " = 0.5 * " << base
            << " (loss " << 100.0 * (1.0 - alloc / base) << "%)\n";
    }
    const TaskMetric metrics[2] = {m, TaskMetric::all_ones(4)};
    const auto reports = audit_multiple_task_fairness(metrics, composed);
    out << "  per-task audits: " << (reports[0].clean() && reports[1].clean() ? "clean" : "dirty")
        << "\n";
}

}  // namespace

std::vector<std::string> demo_names() {
    return {"or-divergence",        "bimodal-parity",
            "and-unfairness",       "competitive-witness",
            "ptc-vs-oracle",        "ws-closed-form",
            "constrained-infeasible", "mothers-subgroup",
            "statistical-parity-adversarial", "rtc-allocation"};
}

bool run_named_demo(const std::string& name, std::ostream& out) {
    if (name == "or-divergence") demo_or_divergence(out);
    else if (name == "bimodal-parity") demo_bimodal_parity(out);
    else if (name == "and-unfairness") demo_and_unfairness(out);
    else if (name == "competitive-witness") demo_competitive_witness(out);
    else if (name == "ptc-vs-oracle") demo_ptc_vs_oracle(out);
    else if (name == "ws-closed-form") demo_ws_closed_form(out);
    else if (name == "constrained-infeasible") demo_constrained_infeasible(out);
    else if (name == "mothers-subgroup") demo_mothers_subgroup(out);
    else if (name == "statistical-parity-adversarial") demo_statistical_parity_adversarial(out);
    else if (name == "rtc-allocation") demo_rtc_allocation(out);
    else return false;
    return true;
}

}  // namespace faircompose
