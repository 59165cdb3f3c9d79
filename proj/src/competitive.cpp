#include "faircompose/competitive.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "faircompose/construct.hpp"

namespace faircompose {

TieBreaker TieBreaker::strict_order(std::size_t task_count, std::vector<std::size_t> preference) {
    if (preference.size() != task_count)
        throw std::invalid_argument("strict_order: preference must rank every task");
    std::vector<bool> seen(task_count, false);
    for (std::size_t t : preference) {
        if (t >= task_count || seen[t])
            throw std::invalid_argument("strict_order: preference is not a permutation");
        seen[t] = true;
    }
    TieBreaker tb;
    tb.task_count_ = task_count;
    tb.fill_ = [preference = std::move(preference)](ElementId, std::uint32_t mask,
                                                    std::span<double> out) {
        for (std::size_t t : preference) {
            if (mask & (1u << t)) {
                out[t] = 1.0;
                return;
            }
        }
    };
    return tb;
}

TieBreaker TieBreaker::uniform(std::size_t task_count) {
    TieBreaker tb;
    tb.task_count_ = task_count;
    tb.fill_ = [task_count](ElementId, std::uint32_t mask, std::span<double> out) {
        const int bits = std::popcount(mask);
        if (bits == 0) return;
        const double share = 1.0 / bits;
        for (std::size_t t = 0; t < task_count; ++t)
            if (mask & (1u << t)) out[t] = share;
    };
    return tb;
}

TieBreaker TieBreaker::two_task_value(std::vector<double> rho) {
    validate_probabilities(rho, "two_task_value tie-break");
    TieBreaker tb;
    tb.task_count_ = 2;
    tb.fill_ = [rho = std::move(rho)](ElementId u, std::uint32_t mask, std::span<double> out) {
        switch (mask) {
            case 0b01: out[0] = 1.0; break;
            case 0b10: out[1] = 1.0; break;
            case 0b11:
                if (u >= rho.size())
                    throw std::out_of_range("two_task_value tie-break: element out of range");
                out[0] = rho[u];
                out[1] = 1.0 - rho[u];
                break;
            default: break;
        }
    };
    return tb;
}

TieBreaker TieBreaker::from_table(std::size_t task_count,
                                  std::map<std::uint32_t, std::vector<double>> table) {
    const std::uint32_t mask_limit = task_count >= 32 ? 0 : (1u << task_count);
    for (const auto& [mask, dist] : table) {
        if (mask == 0 || (mask_limit && mask >= mask_limit))
            throw std::invalid_argument("tie-break table: mask out of range");
        if (dist.size() != task_count)
            throw std::invalid_argument("tie-break table: distribution size mismatch");
        double total = 0.0;
        for (std::size_t t = 0; t < task_count; ++t) {
            if (dist[t] < 0.0) throw std::invalid_argument("tie-break table: negative probability");
            if (dist[t] > 0.0 && !(mask & (1u << t)))
                throw std::invalid_argument("tie-break table: support outside the mask");
            total += dist[t];
        }
        if (std::fabs(total - 1.0) > 1e-12)
            throw std::invalid_argument("tie-break table: distribution must sum to one");
    }
    TieBreaker tb;
    tb.task_count_ = task_count;
    tb.fill_ = [table = std::move(table)](ElementId, std::uint32_t mask, std::span<double> out) {
        const auto it = table.find(mask);
        if (it == table.end()) throw std::invalid_argument("tie-break table: mask not covered");
        std::copy(it->second.begin(), it->second.end(), out.begin());
    };
    return tb;
}

void TieBreaker::distribution(ElementId u, std::uint32_t mask, std::span<double> out) const {
    if (out.size() != task_count_)
        throw std::invalid_argument("tie-break distribution: output size mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    if (mask == 0) return;
    fill_(u, mask, out);
}

double TieBreaker::pick_probability(ElementId u, std::uint32_t mask, std::size_t task) const {
    std::vector<double> out(task_count_, 0.0);
    distribution(u, mask, out);
    return out[task];
}

SystemOutcome compose_competitive(std::span<const SoftClassifier> classifiers,
                                  const TieBreaker& tb) {
    const std::size_t k = classifiers.size();
    if (k < 1) throw std::invalid_argument("compose_competitive: need >= 1 classifier");
    if (k > 20) throw std::invalid_argument("compose_competitive: exact enumeration limited to k <= 20");
    if (tb.task_count() != k)
        throw std::invalid_argument("compose_competitive: tie-break task count mismatch");
    const std::size_t n = classifiers.front().size();
    for (const SoftClassifier& c : classifiers) {
        if (c.size() != n) throw std::invalid_argument("compose_competitive: length mismatch");
        validate_probabilities(c.p, "compose_competitive");
    }

    SystemOutcome outcome;
    outcome.elements = n;
    outcome.tasks = k;
    outcome.single_slot = true;
    outcome.probs.assign(n * k, 0.0);

    const std::uint32_t masks = 1u << k;
    std::vector<double> pick(k, 0.0);
    for (ElementId u = 0; u < n; ++u) {
        for (std::uint32_t mask = 1; mask < masks; ++mask) {
            double weight = 1.0;
            for (std::size_t j = 0; j < k; ++j) {
                const double p = classifiers[j].p[u];
                weight *= (mask & (1u << j)) ? p : 1.0 - p;
                if (weight == 0.0) break;
            }
            if (weight == 0.0) continue;
            tb.distribution(u, mask, pick);
            for (std::size_t i = 0; i < k; ++i)
                if (pick[i] != 0.0) outcome.probs[u * k + i] += weight * pick[i];
        }
    }
    return outcome;
}

SystemOutcome randomize_then_classify(std::span<const SoftClassifier> classifiers,
                                      std::span<const double> task_distribution) {
    const std::size_t k = classifiers.size();
    if (k < 1) throw std::invalid_argument("randomize_then_classify: need >= 1 classifier");
    if (task_distribution.size() != k)
        throw std::invalid_argument("randomize_then_classify: distribution size mismatch");
    double total = 0.0;
    for (double x : task_distribution) {
        if (x < 0.0) throw std::invalid_argument("randomize_then_classify: negative task weight");
        total += x;
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw std::invalid_argument("randomize_then_classify: task distribution must sum to one");
    const std::size_t n = classifiers.front().size();
    for (const SoftClassifier& c : classifiers) {
        if (c.size() != n) throw std::invalid_argument("randomize_then_classify: length mismatch");
        validate_probabilities(c.p, "randomize_then_classify");
    }

    SystemOutcome outcome;
    outcome.elements = n;
    outcome.tasks = k;
    outcome.single_slot = true;
    outcome.probs.assign(n * k, 0.0);
    for (ElementId u = 0; u < n; ++u)
        for (std::size_t i = 0; i < k; ++i)
            outcome.probs[u * k + i] = task_distribution[i] * classifiers[i].p[u];
    return outcome;
}

std::vector<FairnessReport> audit_multiple_task_fairness(std::span<const TaskMetric> metrics,
                                                         const SystemOutcome& outcome,
                                                         double eps) {
    if (metrics.size() != outcome.tasks)
        throw std::invalid_argument("multiple task audit: metric count mismatch");
    std::vector<FairnessReport> reports;
    reports.reserve(metrics.size());
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        if (metrics[i].size() != outcome.elements)
            throw std::invalid_argument("multiple task audit: dimension mismatch");
        reports.push_back(audit_individual_fairness(metrics[i], outcome.task_column(i), eps));
    }
    return reports;
}

namespace {

struct GridBest {
    double excess = -1.0;
    double pu = 0.0, pv = 0.0, qu = 0.0, qv = 0.0;
    ElementId u = kNoElement, v = kNoElement;
};

}  // namespace

WitnessResult find_violation_witness(const TaskMetric& d0, const TaskMetric& d1,
                                     const TieBreaker& tb, std::size_t budget) {
    if (d0.size() != d1.size())
        throw std::invalid_argument("find_violation_witness: metric size mismatch");
    if (d0.size() < 2) throw std::invalid_argument("find_violation_witness: need >= 2 elements");
    if (tb.task_count() != 2)
        throw std::invalid_argument("find_violation_witness: two-task search only");
    require_valid_metric(d0, "find_violation_witness (first metric)");
    require_valid_metric(d1, "find_violation_witness (second metric)");
    if (d0.is_trivial() || d1.is_trivial())
        throw std::invalid_argument("find_violation_witness: both metrics must be nontrivial");

    const std::size_t n = d0.size();
    GridBest best;
    std::size_t evaluations = 0;
    constexpr int kSteps = 100;  // resolution 0.01

    for (ElementId u = 0; u < n && evaluations < budget; ++u) {
        for (ElementId v = u + 1; v < n && evaluations < budget; ++v) {
            const double d = d0(u, v);
            const double dp = d1(u, v);
            const double rho_u = tb.pick_probability(u, 0b11, 0);
            const double rho_v = tb.pick_probability(v, 0b11, 0);
            const double deltas0[3] = {-d, 0.0, d};
            const double deltas1[3] = {-dp, 0.0, dp};
            for (int a = 0; a <= kSteps && evaluations < budget; ++a) {
                const double pu = a / static_cast<double>(kSteps);
                for (const double delta0 : deltas0) {
                    const double pv = pu + delta0;
                    if (pv < 0.0 || pv > 1.0) continue;
                    for (int b = 0; b <= kSteps && evaluations < budget; ++b) {
                        const double qu = b / static_cast<double>(kSteps);
                        for (const double delta1 : deltas1) {
                            const double qv = qu + delta1;
                            if (qv < 0.0 || qv > 1.0) continue;
                            ++evaluations;
                            const double t_u = pu * (1.0 - qu) + pu * qu * rho_u;
                            const double t_v = pv * (1.0 - qv) + pv * qv * rho_v;
                            const double s_u = qu * (1.0 - pu) + pu * qu * (1.0 - rho_u);
                            const double s_v = qv * (1.0 - pv) + pv * qv * (1.0 - rho_v);
                            const double excess = std::max(std::fabs(t_u - t_v) - d,
                                                           std::fabs(s_u - s_v) - dp);
                            if (excess > best.excess) {
                                best = {excess, pu, pv, qu, qv, u, v};
                            }
                        }
                    }
                }
            }
        }
    }

    WitnessResult result;
    result.u = best.u;
    result.v = best.v;
    result.evaluations = evaluations;

    const PartialAssignment seed0[2] = {{best.u, best.pu}, {best.v, best.pv}};
    const PartialAssignment seed1[2] = {{best.u, best.qu}, {best.v, best.qv}};
    auto extend = [&](const TaskMetric& m, std::span<const PartialAssignment> seed) {
        std::vector<double> p(n, 0.0);
        std::vector<bool> defined(n, false);
        std::vector<PartialAssignment> assigned(seed.begin(), seed.end());
        for (const auto& [id, prob] : assigned) {
            p[id] = prob;
            defined[id] = true;
        }
        for (ElementId x = 0; x < n; ++x) {
            if (defined[x]) continue;
            // nearest assigned neighbour as the target, then clamp
            double bd = std::numeric_limits<double>::infinity(), bp = 0.0;
            for (const auto& [id, prob] : assigned)
                if (m(id, x) < bd) {
                    bd = m(id, x);
                    bp = prob;
                }
            p[x] = fair_add(m, assigned, bp, x);
            defined[x] = true;
            assigned.emplace_back(x, p[x]);
        }
        return SoftClassifier{std::move(p)};
    };
    result.first = extend(d0, seed0);
    result.second = extend(d1, seed1);

    const SoftClassifier cs[2] = {result.first, result.second};
    result.composed = compose_competitive(cs, tb);
    const TaskMetric metrics[2] = {d0, d1};
    auto reports = audit_multiple_task_fairness(metrics, result.composed);
    result.reports = {std::move(reports[0]), std::move(reports[1])};
    result.best_excess = std::max(result.reports[0].max_excess(), result.reports[1].max_excess());
    return result;
}

}  // namespace faircompose
