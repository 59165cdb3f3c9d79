#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "faircompose/core.hpp"

namespace faircompose {

// Scenario files are JSON documents with a mandatory schema_version and seed.
// See README for the full schema.

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GaussianSpec {
    double mean = 0.5;
    double sd = 0.25;
};

struct TaskSpec {
    std::string name;
    std::variant<GaussianSpec, std::vector<double>> qualifications;
};

struct MetricSpec {
    enum class Kind { abs_diff, explicit_matrix };
    Kind kind = Kind::abs_diff;
    std::vector<std::vector<double>> rows;  // explicit only
};

struct ClassifierSpec {
    enum class Kind { explicit_vector, optimize };
    Kind kind = Kind::optimize;
    std::vector<double> probabilities;  // explicit only
    double cap = 0.0;                   // optimize only; utilities = qualifications
};

// Tie-break variants for the competitive study, given as strings:
//   "strict:<task index>"  -- that task always wins ties
//   "rho:<value>"          -- constant probability of picking task 0
//   "rho:q<task index>"    -- per-element, equal to that task's qualification
struct TieBreakSpec {
    enum class Kind { strict, rho_const, rho_qualification };
    Kind kind = Kind::strict;
    std::size_t task = 0;
    double rho = 0.5;
    std::string label;  // the literal scenario string, used in reports
};

struct RtcSpec {
    std::vector<double> task_distribution;
    std::vector<double> boosts{1.0};  // multiplicative probability boosts to compare
};

struct CompositionSpec {
    enum class Type {
        functional_or,
        functional_and,
        functional_xor,
        functional_threshold,
        competitive,
        randomize_then_classify,
        cohort,
        constrained
    };
    Type type = Type::competitive;
    std::size_t threshold_k = 1;                  // functional_threshold
    std::vector<TieBreakSpec> tiebreaks;          // competitive
    std::optional<RtcSpec> rtc;                   // competitive extra rows / rtc type
    std::string cohort_mechanism = "ptc";         // cohort: "ptc" | "weighted"
    std::size_t cohort_n = 1;                     // cohort
    std::size_t audit_metric = 0;                 // functional: metric to audit against
    // constrained
    std::size_t a_size = 0, b_size = 0, n = 0;
    double p = 0.0;
    std::vector<std::pair<double, double>> parts;
    bool error_on_infeasible = false;
};

struct GroupSpec {
    GroupStructure structure;
};

struct Scenario {
    int schema_version = 1;
    std::uint64_t seed = 0;
    std::size_t population_size = 0;
    std::vector<TaskSpec> tasks;
    std::vector<MetricSpec> metrics;          // one per task
    std::vector<ClassifierSpec> classifiers;  // one per task
    CompositionSpec composition;
    std::optional<GroupSpec> groups;
    std::size_t universes = 1;
    std::size_t trials = 100000;
    double epsilon = kDefaultEpsilon;
};

// Parses and validates; throws ScenarioError with a readable message.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

}  // namespace faircompose
