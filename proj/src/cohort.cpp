#include "faircompose/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

namespace faircompose {

namespace {

void check_cohort_args(std::size_t universe, std::size_t n, const char* what) {
    if (n < 1 || n > universe)
        throw std::invalid_argument(std::string(what) + ": need 1 <= n <= N");
}

// Scan an ordered list, classifying until n are selected; the end condition
// fires when the remaining slots cover everyone left (current included).
std::vector<ElementId> scan_and_select(std::span<const ElementId> order,
                                       std::span<const double> p, std::size_t n, Rng& rng) {
    std::vector<ElementId> selected;
    selected.reserve(n);
    for (std::size_t i = 0; i < order.size() && selected.size() < n; ++i) {
        const std::size_t remaining = order.size() - i;
        const std::size_t slots = n - selected.size();
        if (slots >= remaining) {
            selected.push_back(order[i]);  // end condition
        } else if (rng.bernoulli(p[order[i]])) {
            selected.push_back(order[i]);
        }
    }
    return selected;
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double result = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
    return result;
}

}  // namespace

std::vector<ElementId> permute_then_classify(const SoftClassifier& c, std::size_t n, Rng& rng) {
    check_cohort_args(c.size(), n, "permute_then_classify");
    validate_probabilities(c.p, "permute_then_classify");
    std::vector<ElementId> order(c.size());
    std::iota(order.begin(), order.end(), ElementId{0});
    rng.shuffle(order);
    return scan_and_select(order, c.p, n, rng);
}

std::vector<ElementId> permute_then_classify_subset(const SoftClassifier& c,
                                                    std::span<const ElementId> ids, std::size_t n,
                                                    Rng& rng) {
    check_cohort_args(ids.size(), n, "permute_then_classify_subset");
    validate_probabilities(c.p, "permute_then_classify_subset");
    std::vector<ElementId> order(ids.begin(), ids.end());
    rng.shuffle(order);
    return scan_and_select(order, c.p, n, rng);
}

std::vector<double> ptc_selection_distribution(const SoftClassifier& c, std::size_t n) {
    const std::size_t N = c.size();
    check_cohort_args(N, n, "ptc_selection_distribution");
    validate_probabilities(c.p, "ptc_selection_distribution");
    if (N > 8)
        throw std::invalid_argument("ptc_selection_distribution: exact mode limited to N <= 8");

    std::vector<double> totals(N, 0.0);
    std::vector<ElementId> perm(N);
    std::iota(perm.begin(), perm.end(), ElementId{0});
    std::size_t permutations = 0;

    // count[s] = Pr[s selected before the current position | this permutation]
    std::vector<double> count(n + 1, 0.0);
    do {
        ++permutations;
        std::fill(count.begin(), count.end(), 0.0);
        count[0] = 1.0;
        for (std::size_t i = 0; i < N; ++i) {
            const ElementId u = perm[i];
            const double p = c.p[u];
            const std::size_t remaining = N - i;
            double selected_here = 0.0;
            // Walk states downward so count[s] still holds the value from
            // before this position when it is processed.
            for (std::size_t s = std::min(i, n) + 1; s-- > 0;) {
                const double mass = count[s];
                if (mass == 0.0) continue;
                if (s >= n) continue;  // no slots left; element skipped
                if (n - s >= remaining) {
                    selected_here += mass;  // end condition
                    count[s + 1] += mass;
                    count[s] = 0.0;
                } else {
                    selected_here += mass * p;
                    count[s + 1] += mass * p;
                    count[s] = mass * (1.0 - p);
                }
            }
            totals[u] += selected_here;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (double& t : totals) t /= static_cast<double>(permutations);
    return totals;
}

Estimate ptc_selection_probability(const SoftClassifier& c, std::size_t n, ElementId u) {
    if (u >= c.size()) throw std::invalid_argument("ptc_selection_probability: element out of range");
    const std::vector<double> all = ptc_selection_distribution(c, n);
    return {all[u], 0.0, 0};
}

Estimate ptc_selection_probability(const SoftClassifier& c, std::size_t n, ElementId u,
                                   const MonteCarlo& mc) {
    check_cohort_args(c.size(), n, "ptc_selection_probability");
    if (u >= c.size()) throw std::invalid_argument("ptc_selection_probability: element out of range");
    if (mc.trials == 0) throw std::invalid_argument("ptc_selection_probability: need trials >= 1");
    const unsigned workers = std::max(1u, mc.workers);

    auto run_stream = [&](std::uint64_t stream, std::size_t trials) {
        Rng rng = Rng::derived(mc.seed, stream);
        std::size_t hits = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            const auto members = permute_then_classify(c, n, rng);
            hits += std::count(members.begin(), members.end(), u) > 0 ? 1 : 0;
        }
        return hits;
    };

    // Fixed trial split per stream; reduction over stream index order keeps
    // the result independent of scheduling.
    std::vector<std::size_t> plan(workers, mc.trials / workers);
    for (std::size_t i = 0; i < mc.trials % workers; ++i) plan[i] += 1;
    std::size_t hits = 0;
    if (workers == 1) {
        hits = run_stream(0, plan[0]);
    } else {
        std::vector<std::future<std::size_t>> futures;
        for (unsigned w = 0; w < workers; ++w)
            futures.push_back(std::async(std::launch::async, run_stream, w, plan[w]));
        for (auto& f : futures) hits += f.get();
    }

    const double estimate = static_cast<double>(hits) / static_cast<double>(mc.trials);
    const double std_error =
        std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(mc.trials));
    return {estimate, std_error, mc.trials};
}

std::vector<ElementId> weighted_sampling(const SoftClassifier& c, std::size_t n, Rng& rng) {
    const std::size_t N = c.size();
    check_cohort_args(N, n, "weighted_sampling");
    validate_probabilities(c.p, "weighted_sampling");
    const double total = std::accumulate(c.p.begin(), c.p.end(), 0.0);
    if (total <= 0.0)
        throw std::invalid_argument("weighted_sampling: all-zero classifier has no weighted sets");

    // Stage 1: anchor by probability p_x / total.
    double roll = rng.uniform01() * total;
    ElementId anchor = N - 1;
    for (ElementId u = 0; u < N; ++u) {
        roll -= c.p[u];
        if (roll < 0.0) {
            anchor = u;
            break;
        }
    }
    // Stage 2: uniform (n-1)-subset of the remaining elements.
    std::vector<ElementId> rest;
    rest.reserve(N - 1);
    for (ElementId u = 0; u < N; ++u)
        if (u != anchor) rest.push_back(u);
    for (std::size_t i = 0; i < n - 1; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(rest.size() - i));
        std::swap(rest[i], rest[j]);
    }
    std::vector<ElementId> members(rest.begin(), rest.begin() + (n - 1));
    members.push_back(anchor);
    std::sort(members.begin(), members.end());
    return members;
}

double ws_selection_probability(const SoftClassifier& c, std::size_t n, ElementId u) {
    const std::size_t N = c.size();
    check_cohort_args(N, n, "ws_selection_probability");
    if (u >= N) throw std::invalid_argument("ws_selection_probability: element out of range");
    validate_probabilities(c.p, "ws_selection_probability");
    const double total = std::accumulate(c.p.begin(), c.p.end(), 0.0);
    if (total <= 0.0)
        throw std::invalid_argument("ws_selection_probability: all-zero classifier");
    const double with_u = binomial(N - 1, n - 1);
    const double with_both = n >= 2 ? binomial(N - 2, n - 2) : 0.0;
    return (with_u * c.p[u] + with_both * (total - c.p[u])) / (with_u * total);
}

WsPrecondition check_ws_precondition(const SoftClassifier& c, std::size_t n) {
    const std::size_t N = c.size();
    check_cohort_args(N, n, "check_ws_precondition");
    validate_probabilities(c.p, "check_ws_precondition");
    const double total = std::accumulate(c.p.begin(), c.p.end(), 0.0);
    WsPrecondition result;
    result.mean_probability = total / static_cast<double>(N);
    result.mean_set_weight = static_cast<double>(n) * total / static_cast<double>(N);
    result.statement_form = result.mean_probability >= 1.0 / static_cast<double>(N);
    result.proof_form =
        result.mean_set_weight >= static_cast<double>(n) / static_cast<double>(N);
    result.agree = result.statement_form == result.proof_form;
    return result;
}

CohortResult online_cohort(const CohortSpec& spec, const SoftClassifier& c,
                           std::span<const ElementId> stream, Rng& rng) {
    check_cohort_args(c.size(), spec.n, "online_cohort");
    if (spec.mode == CohortMode::online_adversarial_unknown_length) {
        return {{},
                true,
                "no mechanism can select exactly n fairly from an adversarially ordered "
                "stream of unknown length"};
    }
    if (stream.size() != c.size())
        throw std::invalid_argument("online_cohort: stream must present every element once");
    std::vector<bool> seen(c.size(), false);
    for (ElementId u : stream) {
        if (u >= c.size() || seen[u])
            throw std::invalid_argument("online_cohort: stream is not a permutation");
        seen[u] = true;
    }

    CohortResult result;
    switch (spec.mode) {
        case CohortMode::offline:
            result.members = permute_then_classify(c, spec.n, rng);
            break;
        case CohortMode::online_random_order:
            // The caller's stream already is the random permutation.
            result.members = scan_and_select(stream, c.p, spec.n, rng);
            break;
        case CohortMode::online_adversarial_known_length: {
            // Uniform weight-n selection pattern over positions: fair against
            // any ordering, utility no better than random.
            std::vector<std::size_t> positions(stream.size());
            std::iota(positions.begin(), positions.end(), std::size_t{0});
            for (std::size_t i = 0; i < spec.n; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng.below(positions.size() - i));
                std::swap(positions[i], positions[j]);
            }
            for (std::size_t i = 0; i < spec.n; ++i) result.members.push_back(stream[positions[i]]);
            std::sort(result.members.begin(), result.members.end());
            result.note = "uniform selection pattern; classifier probabilities unused";
            break;
        }
        case CohortMode::online_adversarial_unknown_length:
            break;  // handled above
    }
    return result;
}

ParityCohort statistical_parity_online(std::span<const ElementId> stream,
                                       std::span<const int> group_of,
                                       std::span<const double> proportions, std::size_t n) {
    if (n < 1) throw std::invalid_argument("statistical_parity_online: need n >= 1");
    const std::size_t groups = proportions.size();
    if (groups == 0) throw std::invalid_argument("statistical_parity_online: need >= 1 group");
    double total = 0.0;
    for (double p : proportions) {
        if (p < 0.0) throw std::invalid_argument("statistical_parity_online: negative proportion");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw std::invalid_argument("statistical_parity_online: proportions must sum to one");

    // Largest-remainder quotas summing exactly to n.
    ParityCohort result;
    result.quotas.assign(groups, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        const double exact = proportions[g] * static_cast<double>(n);
        result.quotas[g] = static_cast<std::size_t>(std::floor(exact));
        assigned += result.quotas[g];
        remainders.emplace_back(exact - std::floor(exact), g);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned)
        result.quotas[remainders[i % groups].second] += 1;

    std::vector<std::size_t> taken(groups, 0);
    for (ElementId u : stream) {
        if (result.members.size() == n) break;
        if (u >= group_of.size())
            throw std::invalid_argument("statistical_parity_online: element without group label");
        const int g = group_of[u];
        if (g < 0 || static_cast<std::size_t>(g) >= groups)
            throw std::invalid_argument("statistical_parity_online: group label out of range");
        if (taken[g] < result.quotas[g]) {
            taken[g] += 1;
            result.members.push_back(u);
        }
    }
    if (result.members.size() != n)
        throw std::invalid_argument("statistical_parity_online: stream exhausted before quotas met");
    result.warning =
        "statistical parity only: selection within each quota follows stream order, so the "
        "cohort is not individually fair under adversarial orderings";
    return result;
}

}  // namespace faircompose
