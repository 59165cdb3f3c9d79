#include "faircompose/subset.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace faircompose {

FeasibilityReport check_constrained_feasibility(std::size_t a_size, std::size_t b_size,
                                                std::size_t n, double p,
                                                std::span<const std::pair<double, double>> parts) {
    if (a_size == 0 || b_size == 0)
        throw std::invalid_argument("constrained feasibility: both groups must be nonempty");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("constrained feasibility: p must lie in [0,1]");
    if (n < 1 || n > a_size + b_size)
        throw std::invalid_argument("constrained feasibility: n must lie in [1, |A|+|B|]");
    const double dn = static_cast<double>(n);
    const double da = static_cast<double>(a_size);
    const double db = static_cast<double>(b_size);
    if (p * dn > da)
        throw std::invalid_argument("constrained feasibility: quota p*n exceeds |A| (infeasible by counting)");
    if ((1.0 - p) * dn > db)
        throw std::invalid_argument("constrained feasibility: quota (1-p)*n exceeds |B| (infeasible by counting)");

    double beta_total = 0.0;
    double slack = 0.0;
    for (const auto& [beta, gamma] : parts) {
        if (beta < 0.0 || gamma < 0.0 || gamma > 1.0)
            throw std::invalid_argument("constrained feasibility: parts need beta >= 0, gamma in [0,1]");
        beta_total += beta;
        slack += beta * gamma;
    }
    if (std::fabs(beta_total - 1.0) > 1e-9)
        throw std::invalid_argument("constrained feasibility: part fractions must sum to one");

    FeasibilityReport report;
    report.mu_a_lower = p * dn / da;
    report.mu_b_upper = (1.0 - p) * dn / db;
    report.mean_gap = report.mu_a_lower - report.mu_b_upper;
    report.slack = slack;
    report.feasible = !(report.mean_gap > slack);
    report.p_max = (dn + db * slack) / ((db / da + 1.0) * dn);
    return report;
}

GammaPartition estimate_gamma_partition(const TaskMetric& m, std::span<const ElementId> a,
                                        std::span<const ElementId> b,
                                        std::span<const double> bin_edges) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("gamma partition: both sides must be nonempty");
    std::set<ElementId> a_set(a.begin(), a.end());
    for (ElementId u : b)
        if (a_set.count(u))
            throw std::invalid_argument("gamma partition: sides must be disjoint");

    GammaPartition partition;
    partition.a_side.assign(a.begin(), a.end());
    partition.b_side.assign(b.begin(), b.end());

    // Nearest A neighbour for every element of B.
    std::vector<std::pair<ElementId, double>> match(b.size());  // (a, distance)
    for (std::size_t i = 0; i < b.size(); ++i) {
        ElementId best = a[0];
        double best_dist = m(a[0], b[i]);
        for (ElementId candidate : a.subspan(1)) {
            const double dist = m(candidate, b[i]);
            if (dist < best_dist) {
                best = candidate;
                best_dist = dist;
            }
        }
        match[i] = {best, best_dist};
    }

    // Bin upper edges: deciles of the matched distances unless supplied.
    std::vector<double> edges;
    if (!bin_edges.empty()) {
        edges.assign(bin_edges.begin(), bin_edges.end());
        std::sort(edges.begin(), edges.end());
        if (edges.empty() || edges.back() < 1.0) edges.push_back(1.0);
    } else {
        std::vector<double> dists;
        dists.reserve(b.size());
        for (const auto& [aa, dd] : match) dists.push_back(dd);
        std::sort(dists.begin(), dists.end());
        for (int decile = 1; decile <= 10; ++decile) {
            const std::size_t idx =
                std::min(dists.size() - 1, dists.size() * decile / 10 == 0
                                               ? 0
                                               : dists.size() * decile / 10 - 1);
            edges.push_back(dists[idx]);
        }
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }

    std::vector<GammaPart> parts(edges.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double dist = match[i].second;
        std::size_t bin = 0;
        while (bin + 1 < edges.size() && dist > edges[bin]) ++bin;
        parts[bin].members.push_back(b[i]);
        parts[bin].witness_edges.emplace_back(match[i].first, b[i]);
        parts[bin].gamma = std::max(parts[bin].gamma, dist);
    }

    for (GammaPart& part : parts) {
        if (part.members.empty()) continue;
        part.beta = static_cast<double>(part.members.size()) / static_cast<double>(b.size());
        if (part.members.size() % a.size() != 0) {
            // Regular out-degrees need ceil(|B_i|/|A|) copies of A.
            part.duplication = (part.members.size() + a.size() - 1) / a.size();
            std::ostringstream note;
            note << "part with gamma " << part.gamma << ": |B_i|=" << part.members.size()
                 << " not divisible by |A|=" << a.size() << "; degree-regular witness uses "
                 << part.duplication << " copies of A";
            partition.notes.push_back(note.str());
        }
        partition.parts.push_back(std::move(part));
    }
    return partition;
}

IntragroupCohort intragroup_ptc(const SoftClassifier& c, std::span<const ElementId> a,
                                std::span<const ElementId> b, std::size_t n, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("intragroup_ptc: p must lie in [0,1]");
    if (n < 1 || n > a.size() + b.size())
        throw std::invalid_argument("intragroup_ptc: n must lie in [1, |A|+|B|]");

    // Two-way largest remainder is plain rounding of p*n.
    IntragroupCohort cohort;
    const double exact_a = p * static_cast<double>(n);
    cohort.n_a = static_cast<std::size_t>(std::floor(exact_a));
    if (exact_a - std::floor(exact_a) >= 0.5) cohort.n_a += 1;
    cohort.n_a = std::min(cohort.n_a, a.size());
    cohort.n_b = n - cohort.n_a;
    if (cohort.n_b > b.size())
        throw std::invalid_argument("intragroup_ptc: group B cannot fill its quota");

    if (cohort.n_a > 0) {
        auto members = permute_then_classify_subset(c, a, cohort.n_a, rng);
        cohort.members.insert(cohort.members.end(), members.begin(), members.end());
    }
    if (cohort.n_b > 0) {
        auto members = permute_then_classify_subset(c, b, cohort.n_b, rng);
        cohort.members.insert(cohort.members.end(), members.begin(), members.end());
    }
    std::sort(cohort.members.begin(), cohort.members.end());
    cohort.note =
        "fair within each group only: the quota split fixes the cross-group selection rates";
    return cohort;
}

// --- subset / ordering distributions ----------------------------------------

SubsetDistribution SubsetDistribution::full(std::size_t universe) {
    SubsetDistribution y;
    y.kind = Kind::full_universe;
    y.universe = universe;
    return y;
}

SubsetDistribution SubsetDistribution::explicit_sets(
    std::size_t universe, std::vector<std::pair<std::vector<ElementId>, double>> sets) {
    double total = 0.0;
    for (const auto& [members, prob] : sets) {
        if (prob < 0.0) throw std::invalid_argument("subset distribution: negative probability");
        for (ElementId u : members)
            if (u >= universe)
                throw std::invalid_argument("subset distribution: element out of range");
        total += prob;
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw std::invalid_argument("subset distribution: probabilities must sum to one");
    SubsetDistribution y;
    y.kind = Kind::explicit_sets;
    y.universe = universe;
    y.sets = std::move(sets);
    return y;
}

SubsetDistribution SubsetDistribution::independent(std::vector<double> weights) {
    validate_probabilities(weights, "subset distribution weights");
    SubsetDistribution y;
    y.kind = Kind::independent;
    y.universe = weights.size();
    y.weights = std::move(weights);
    return y;
}

std::vector<ElementId> SubsetDistribution::sample(Rng& rng) const {
    switch (kind) {
        case Kind::full_universe: {
            std::vector<ElementId> all(universe);
            std::iota(all.begin(), all.end(), ElementId{0});
            return all;
        }
        case Kind::explicit_sets: {
            double roll = rng.uniform01();
            for (const auto& [members, prob] : sets) {
                roll -= prob;
                if (roll < 0.0) return members;
            }
            return sets.back().first;
        }
        case Kind::independent: {
            std::vector<ElementId> drawn;
            for (ElementId u = 0; u < universe; ++u)
                if (rng.bernoulli(weights[u])) drawn.push_back(u);
            return drawn;
        }
    }
    return {};
}

OrderingDistribution OrderingDistribution::uniform() { return OrderingDistribution{}; }

OrderingDistribution OrderingDistribution::fixed(std::vector<ElementId> order) {
    OrderingDistribution x;
    x.kind = Kind::fixed;
    x.fixed_order = std::move(order);
    return x;
}

OrderingDistribution OrderingDistribution::generator(
    std::function<std::vector<ElementId>(const std::vector<ElementId>&, Rng&)> fn) {
    OrderingDistribution x;
    x.kind = Kind::generator;
    x.generate = std::move(fn);
    return x;
}

std::vector<ElementId> OrderingDistribution::order(std::vector<ElementId> subset, Rng& rng) const {
    switch (kind) {
        case Kind::uniform:
            rng.shuffle(subset);
            return subset;
        case Kind::fixed: {
            std::vector<ElementId> ordered;
            ordered.reserve(subset.size());
            std::set<ElementId> present(subset.begin(), subset.end());
            for (ElementId u : fixed_order)
                if (present.count(u)) ordered.push_back(u);
            if (ordered.size() != subset.size())
                throw std::invalid_argument("ordering distribution: fixed order misses elements");
            return ordered;
        }
        case Kind::generator: {
            auto ordered = generate(subset, rng);
            if (ordered.size() != subset.size())
                throw std::invalid_argument("ordering distribution: generator changed the subset");
            return ordered;
        }
    }
    return subset;
}

SubsetSystem classify_independently(SoftClassifier c) {
    validate_probabilities(c.p, "classify_independently");
    SubsetSystem system;
    auto probs = std::make_shared<std::vector<double>>(std::move(c.p));
    system.run = [probs](std::span<const ElementId> ordered, Rng& rng) {
        std::vector<ElementId> selected;
        for (ElementId u : ordered)
            if (rng.bernoulli((*probs)[u])) selected.push_back(u);
        return selected;
    };
    system.exact_marginals = [probs](std::span<const ElementId> subset) {
        std::vector<double> out;
        out.reserve(subset.size());
        for (ElementId u : subset) out.push_back((*probs)[u]);
        return out;
    };
    return system;
}

SubsetSystem classify_independently(const RescaledClassifier& rc) {
    return classify_independently(rc.conditional);
}

ExperimentEstimate run_subset_experiment(const SubsetSystem& system, const SubsetDistribution& y,
                                         const OrderingDistribution& x, ElementId u,
                                         std::size_t trials, std::uint64_t seed) {
    if (u >= y.universe) throw std::invalid_argument("subset experiment: element out of range");

    if (y.kind == SubsetDistribution::Kind::explicit_sets && system.exact_marginals) {
        ExperimentEstimate estimate;
        estimate.exact = true;
        for (const auto& [members, prob] : y.sets) {
            if (prob == 0.0) continue;
            const auto it = std::find(members.begin(), members.end(), u);
            if (it == members.end()) continue;  // absent: default negative outcome
            const auto marginals = system.exact_marginals(members);
            estimate.value += prob * marginals[it - members.begin()];
        }
        return estimate;
    }

    if (trials == 0) throw std::invalid_argument("subset experiment: need trials >= 1");
    Rng rng(seed);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto subset = y.sample(rng);
        const auto ordered = x.order(subset, rng);
        const auto selected = system.run(ordered, rng);
        hits += std::count(selected.begin(), selected.end(), u) > 0 ? 1 : 0;
    }
    ExperimentEstimate estimate;
    estimate.trials = trials;
    estimate.value = static_cast<double>(hits) / static_cast<double>(trials);
    estimate.std_error =
        std::sqrt(estimate.value * (1.0 - estimate.value) / static_cast<double>(trials));
    return estimate;
}

RescaledClassifier positive_weights_rescale(const SoftClassifier& c,
                                            std::span<const double> weights) {
    if (weights.size() != c.size())
        throw std::invalid_argument("positive_weights_rescale: weight size mismatch");
    validate_probabilities(c.p, "positive_weights_rescale");
    for (std::size_t w = 0; w < weights.size(); ++w) {
        if (!(weights[w] > 0.0) || weights[w] > 1.0) {
            std::ostringstream out;
            out << "positive_weights_rescale: element " << w << " has inclusion weight "
                << weights[w]
                << "; with unreachable elements no classifier can equalize treatment";
            throw std::invalid_argument(out.str());
        }
    }
    RescaledClassifier rc;
    rc.assumed_weights.assign(weights.begin(), weights.end());
    rc.q_min = *std::min_element(rc.assumed_weights.begin(), rc.assumed_weights.end());
    rc.conditional.p.resize(c.size());
    for (std::size_t w = 0; w < c.size(); ++w)
        rc.conditional.p[w] = (rc.q_min / weights[w]) * c.p[w];
    return rc;
}

std::vector<double> effective_probabilities(const RescaledClassifier& rc) {
    std::vector<double> out(rc.conditional.size());
    for (std::size_t w = 0; w < out.size(); ++w)
        out[w] = rc.assumed_weights[w] * rc.conditional.p[w];
    return out;
}

ContextualEffect effective_probabilities_in_context(const RescaledClassifier& rc,
                                                    std::span<const double> actual_weights) {
    if (actual_weights.size() != rc.conditional.size())
        throw std::invalid_argument("contextual effect: weight size mismatch");
    ContextualEffect effect;
    effect.effective.resize(actual_weights.size());
    bool mismatch = false;
    for (std::size_t w = 0; w < actual_weights.size(); ++w) {
        effect.effective[w] = actual_weights[w] * rc.conditional.p[w];
        if (std::fabs(actual_weights[w] - rc.assumed_weights[w]) > 1e-12) mismatch = true;
    }
    if (mismatch)
        effect.warning =
            "contextual fairness: this classifier was rescaled for a different inclusion "
            "distribution; its fairness guarantee does not transfer to these weights";
    return effect;
}

SoftClassifier copy_behavior_extension(const TaskMetric& m,
                                       std::span<const PartialAssignment> external, double eps) {
    require_valid_metric(m, "copy_behavior_extension");
    std::vector<double> p(m.size(), 0.0);
    std::vector<bool> defined(m.size(), false);
    for (const auto& [id, prob] : external) {
        if (id >= m.size())
            throw std::invalid_argument("copy_behavior_extension: element out of range");
        if (defined[id]) throw std::invalid_argument("copy_behavior_extension: duplicate element");
        if (!(prob >= 0.0 && prob <= 1.0))
            throw std::invalid_argument("copy_behavior_extension: probability outside [0,1]");
        p[id] = prob;
        defined[id] = true;
    }

    // The external assignment must be fair among its own elements.
    for (std::size_t i = 0; i < external.size(); ++i) {
        for (std::size_t j = i + 1; j < external.size(); ++j) {
            const auto& [ui, pi] = external[i];
            const auto& [uj, pj] = external[j];
            if (std::fabs(pi - pj) - m(ui, uj) > eps) {
                std::ostringstream out;
                out << "copy_behavior_extension: external classifier is not subset fair: pair ("
                    << ui << "," << uj << ") gap " << std::fabs(pi - pj) << " exceeds "
                    << m(ui, uj);
                throw std::invalid_argument(out.str());
            }
        }
    }

    std::vector<PartialAssignment> assigned(external.begin(), external.end());
    for (ElementId x = 0; x < m.size(); ++x) {
        if (defined[x]) continue;
        double best_dist = std::numeric_limits<double>::infinity();
        double target = 0.0;
        for (const auto& [id, prob] : assigned) {
            if (m(id, x) < best_dist) {
                best_dist = m(id, x);
                target = prob;
            }
        }
        p[x] = fair_add(m, assigned, target, x);
        defined[x] = true;
        assigned.emplace_back(x, p[x]);
    }
    return SoftClassifier{std::move(p)};
}

}  // namespace faircompose
