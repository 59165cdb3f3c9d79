#include "faircompose/functional.hpp"

#include <algorithm>
#include <stdexcept>

namespace faircompose {

namespace {

std::size_t common_size(std::span<const SoftClassifier> classifiers, const char* what) {
    if (classifiers.empty()) throw std::invalid_argument(std::string(what) + ": need >= 1 classifier");
    const std::size_t n = classifiers.front().size();
    for (const SoftClassifier& c : classifiers) {
        if (c.size() != n) throw std::invalid_argument(std::string(what) + ": length mismatch");
        validate_probabilities(c.p, what);
    }
    return n;
}

}  // namespace

std::vector<double> compose_or(std::span<const SoftClassifier> classifiers) {
    const std::size_t n = common_size(classifiers, "compose_or");
    std::vector<double> out(n, 1.0);
    for (const SoftClassifier& c : classifiers)
        for (std::size_t u = 0; u < n; ++u) out[u] *= 1.0 - c.p[u];
    for (double& v : out) v = 1.0 - v;
    return out;
}

std::vector<double> compose_and(std::span<const SoftClassifier> classifiers) {
    const std::size_t n = common_size(classifiers, "compose_and");
    std::vector<double> out(n, 1.0);
    for (const SoftClassifier& c : classifiers)
        for (std::size_t u = 0; u < n; ++u) out[u] *= c.p[u];
    return out;
}

std::vector<double> compose_xor_exactly_one(std::span<const SoftClassifier> classifiers) {
    const std::size_t n = common_size(classifiers, "compose_xor_exactly_one");
    std::vector<double> out(n, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        // exactly-one = count distribution evaluated at 1
        double none = 1.0, one = 0.0;
        for (const SoftClassifier& c : classifiers) {
            const double p = c.p[u];
            one = one * (1.0 - p) + none * p;
            none *= 1.0 - p;
        }
        out[u] = one;
    }
    return out;
}

std::vector<double> compose_threshold(std::span<const SoftClassifier> classifiers, std::size_t k) {
    const std::size_t n = common_size(classifiers, "compose_threshold");
    if (k < 1 || k > classifiers.size())
        throw std::invalid_argument("compose_threshold: k out of range");
    std::vector<double> out(n, 0.0);
    std::vector<double> count(classifiers.size() + 1, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        // count[s] = Pr[s positives so far]; counts >= k are collapsed into
        // the k bucket since only the tail matters.
        std::fill(count.begin(), count.end(), 0.0);
        count[0] = 1.0;
        std::size_t upper = 0;
        for (const SoftClassifier& c : classifiers) {
            const double p = c.p[u];
            upper = std::min(upper + 1, k);
            for (std::size_t s = upper; s > 0; --s) {
                if (s == k)
                    count[s] += count[s - 1] * p;
                else
                    count[s] = count[s] * (1.0 - p) + count[s - 1] * p;
            }
            count[0] *= 1.0 - p;
        }
        out[u] = count[k];
    }
    return out;
}

std::vector<double> or_with_multiplicity(const SoftClassifier& c, std::span<const int> degrees) {
    if (degrees.size() != c.size())
        throw std::invalid_argument("or_with_multiplicity: length mismatch");
    validate_probabilities(c.p, "or_with_multiplicity");
    std::vector<double> out(c.size(), 0.0);
    for (std::size_t u = 0; u < c.size(); ++u) {
        if (degrees[u] < 0) throw std::invalid_argument("or_with_multiplicity: negative degree");
        double miss = 1.0;
        for (int i = 0; i < degrees[u]; ++i) miss *= 1.0 - c.p[u];
        out[u] = 1.0 - miss;
    }
    return out;
}

HeavyCheck check_heavy_or(std::span<const double> or_probabilities) {
    for (std::size_t u = 0; u < or_probabilities.size(); ++u)
        if (or_probabilities[u] < 0.5) return {false, u};
    return {true, std::nullopt};
}

HeavyCheck check_heavy_or(std::span<const SoftClassifier> classifiers) {
    return check_heavy_or(std::span<const double>(compose_or(classifiers)));
}

HeavyOrGrouping group_into_heavy_ors(std::span<const SoftClassifier> classifiers) {
    const std::size_t n = common_size(classifiers, "group_into_heavy_ors");
    HeavyOrGrouping grouping;
    std::vector<double> miss(n, 1.0);  // prod(1 - p) within the open group
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < classifiers.size(); ++i) {
        current.push_back(i);
        for (std::size_t u = 0; u < n; ++u) miss[u] *= 1.0 - classifiers[i].p[u];
        const bool heavy =
            std::all_of(miss.begin(), miss.end(), [](double m) { return 1.0 - m >= 0.5; });
        if (heavy) {
            grouping.groups.push_back(std::move(current));
            current.clear();
            std::fill(miss.begin(), miss.end(), 1.0);
        }
    }
    grouping.residual = std::move(current);
    return grouping;
}

}  // namespace faircompose
