#include "faircompose/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <future>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "faircompose/cohort.hpp"
#include "faircompose/competitive.hpp"
#include "faircompose/construct.hpp"
#include "faircompose/functional.hpp"
#include "faircompose/population.hpp"
#include "faircompose/rng.hpp"

namespace faircompose {

namespace {

std::uint64_t universe_seed(const Scenario& scenario, std::size_t universe_index) {
    // Stable per-universe seeds; stream 0 is reserved for run-level sampling.
    return scenario.seed ^ (0x9E3779B97F4A7C15ULL * (universe_index + 1));
}

TaskMetric metric_for(const MetricSpec& spec, const std::vector<double>& qualifications) {
    if (spec.kind == MetricSpec::Kind::abs_diff) return TaskMetric::abs_diff(qualifications);
    return TaskMetric::from_rows(spec.rows);
}

TieBreaker build_tiebreak(const TieBreakSpec& spec,
                          const std::vector<RealizedTask>& tasks) {
    switch (spec.kind) {
        case TieBreakSpec::Kind::strict:
            return TieBreaker::strict_order(2, spec.task == 0 ? std::vector<std::size_t>{0, 1}
                                                              : std::vector<std::size_t>{1, 0});
        case TieBreakSpec::Kind::rho_const:
            return TieBreaker::two_task_value(
                std::vector<double>(tasks.front().qualifications.size(), spec.rho));
        case TieBreakSpec::Kind::rho_qualification:
            // task 0 wins ties with probability equal to the named task's
            // qualification
            return TieBreaker::two_task_value(tasks[spec.task].qualifications);
    }
    throw std::logic_error("unreachable tiebreak kind");
}

struct VariantAccumulator {
    std::size_t violating = 0;
    std::size_t comparisons = 0;
    double excess_sum = 0.0;
    double max_sum = 0.0;  // sum of per-universe maxima
};

}  // namespace

std::vector<RealizedTask> realize_tasks(const Scenario& scenario, std::size_t universe_index) {
    std::vector<RealizedTask> tasks;
    const std::uint64_t seed = universe_seed(scenario, universe_index);
    for (std::size_t t = 0; t < scenario.tasks.size(); ++t) {
        RealizedTask task;
        task.name = scenario.tasks[t].name;
        if (const auto* gaussian = std::get_if<GaussianSpec>(&scenario.tasks[t].qualifications)) {
            task.qualifications =
                generate_population(scenario.population_size, gaussian->mean, gaussian->sd,
                                    seed ^ (0xD1B54A32D192ED03ULL * (t + 1)), task.name)
                    .qualifications;
        } else {
            task.qualifications = std::get<std::vector<double>>(scenario.tasks[t].qualifications);
        }
        task.metric = metric_for(scenario.metrics[t], task.qualifications);

        const ClassifierSpec& spec = scenario.classifiers[t];
        if (spec.kind == ClassifierSpec::Kind::explicit_vector) {
            task.classifier = SoftClassifier{spec.probabilities};
        } else {
            task.classifier =
                optimize_fair_classifier(task.metric, {task.qualifications, spec.cap});
        }

        const FairnessReport audit =
            audit_individual_fairness(task.metric, task.classifier.p, scenario.epsilon);
        if (!audit.clean()) {
            std::ostringstream out;
            out << "task '" << task.name << "' (universe " << universe_index
                << "): classifier fails its own audit, max excess " << audit.max_excess()
                << " over " << audit.violations.size() << " pairs";
            throw std::runtime_error(out.str());
        }
        tasks.push_back(std::move(task));
    }
    return tasks;
}

ExperimentResults run_competitive_experiment(const Scenario& scenario) {
    if (scenario.tasks.size() != 2)
        throw ScenarioError("competitive experiment needs exactly two tasks");
    ExperimentResults results;
    results.pair_universe_count = scenario.universes;

    struct UniverseOutcome {
        // per variant, per task
        std::vector<std::array<FairnessReport, 2>> reports;
        std::vector<std::array<std::vector<double>, 2>> columns;  // universe 0 plots only
        std::vector<std::array<double, 2>> rtc_loss;              // per boost entry
        std::size_t rtc_violations = 0;
        std::vector<double> qual0, qual1, base0, base1;
    };

    const std::size_t variant_count = scenario.composition.tiebreaks.size();
    auto run_universe = [&](std::size_t index) {
        const auto tasks = realize_tasks(scenario, index);
        UniverseOutcome outcome;
        outcome.reports.resize(variant_count);
        const TaskMetric metrics[2] = {tasks[0].metric, tasks[1].metric};
        const SoftClassifier classifiers[2] = {tasks[0].classifier, tasks[1].classifier};
        for (std::size_t v = 0; v < variant_count; ++v) {
            const TieBreaker tb = build_tiebreak(scenario.composition.tiebreaks[v], tasks);
            const SystemOutcome composed = compose_competitive(classifiers, tb);
            auto reports = audit_multiple_task_fairness(metrics, composed, scenario.epsilon);
            outcome.reports[v] = {std::move(reports[0]), std::move(reports[1])};
            if (index == 0) {
                outcome.columns.push_back(
                    {composed.task_column(0), composed.task_column(1)});
            }
        }
        if (scenario.composition.rtc) {
            const auto& rtc = *scenario.composition.rtc;
            for (double boost : rtc.boosts) {
                SoftClassifier boosted[2];
                for (int t = 0; t < 2; ++t) {
                    boosted[t].p = classifiers[t].p;
                    for (double& p : boosted[t].p) p = std::min(1.0, p * boost);
                }
                const SystemOutcome composed =
                    randomize_then_classify(boosted, rtc.task_distribution);
                double base_total = 0.0, alloc_total = 0.0;
                for (int t = 0; t < 2; ++t) {
                    base_total += std::accumulate(classifiers[t].p.begin(),
                                                  classifiers[t].p.end(), 0.0);
                    const auto column = composed.task_column(t);
                    alloc_total += std::accumulate(column.begin(), column.end(), 0.0);
                    if (boost == 1.0) {
                        const FairnessReport report = audit_individual_fairness(
                            metrics[t], column, scenario.epsilon);
                        outcome.rtc_violations += report.violations.size();
                    }
                }
                outcome.rtc_loss.push_back({boost, 1.0 - alloc_total / base_total});
            }
        }
        if (index == 0) {
            outcome.qual0 = tasks[0].qualifications;
            outcome.qual1 = tasks[1].qualifications;
            outcome.base0 = tasks[0].classifier.p;
            outcome.base1 = tasks[1].classifier.p;
        }
        return outcome;
    };

    // Universes run in parallel on derived seeds; aggregation order is fixed
    // by universe index, so results are independent of scheduling.
    const std::size_t workers = std::max<std::size_t>(
        1, std::min<std::size_t>({scenario.universes, std::thread::hardware_concurrency(), 8}));
    std::vector<UniverseOutcome> outcomes(scenario.universes);
    if (workers == 1) {
        for (std::size_t i = 0; i < scenario.universes; ++i) outcomes[i] = run_universe(i);
    } else {
        std::vector<std::future<void>> futures;
        std::atomic<std::size_t> next{0};
        for (std::size_t w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= scenario.universes) return;
                    outcomes[i] = run_universe(i);
                }
            }));
        }
        for (auto& f : futures) f.get();
    }

    // Aggregate.
    std::vector<std::array<VariantAccumulator, 2>> totals(variant_count);
    for (std::size_t i = 0; i < scenario.universes; ++i) {
        for (std::size_t v = 0; v < variant_count; ++v) {
            for (int t = 0; t < 2; ++t) {
                const FairnessReport& report = outcomes[i].reports[v][t];
                auto& acc = totals[v][t];
                acc.violating += report.violations.size();
                acc.comparisons += report.comparisons;
                for (const Violation& violation : report.violations) {
                    acc.excess_sum += violation.excess;
                    results.pairs.push_back({scenario.composition.tiebreaks[v].label,
                                             scenario.tasks[t].name, i, violation.a, violation.b,
                                             violation.observed, violation.allowed,
                                             violation.excess});
                }
                acc.max_sum += report.max_excess();
            }
        }
    }
    for (std::size_t v = 0; v < variant_count; ++v) {
        const TieBreakSpec& spec = scenario.composition.tiebreaks[v];
        for (int t = 0; t < 2; ++t) {
            ReportRow row;
            row.composition_type = spec.label;
            row.task = scenario.tasks[t].name;
            const auto& acc = totals[v][t];
            row.pct_pairs_violating =
                acc.comparisons == 0
                    ? 0.0
                    : 100.0 * static_cast<double>(acc.violating) / static_cast<double>(acc.comparisons);
            row.avg_violation =
                acc.violating == 0 ? 0.0 : acc.excess_sum / static_cast<double>(acc.violating);
            row.max_violation = acc.max_sum / static_cast<double>(scenario.universes);
            row.dash = spec.kind == TieBreakSpec::Kind::strict &&
                       spec.task == static_cast<std::size_t>(t) && acc.violating == 0;
            results.rows.push_back(std::move(row));
        }
    }
    if (scenario.composition.rtc) {
        const auto& boosts = scenario.composition.rtc->boosts;
        for (std::size_t b = 0; b < boosts.size(); ++b) {
            RtcStats stats;
            stats.boost = boosts[b];
            for (std::size_t i = 0; i < scenario.universes; ++i)
                stats.mean_loss += outcomes[i].rtc_loss[b][1];
            stats.mean_loss /= static_cast<double>(scenario.universes);
            if (boosts[b] == 1.0)
                for (std::size_t i = 0; i < scenario.universes; ++i)
                    stats.violations += outcomes[i].rtc_violations;
            results.rtc.push_back(stats);
            std::ostringstream line;
            line << "randomize_then_classify boost " << stats.boost << ": mean allocation loss "
                 << stats.mean_loss;
            results.log.push_back(line.str());
        }
    }

    // Plots from universe 0: baseline per task plus every variant.
    const auto& first = outcomes.front();
    const std::string colors[2] = {"#c03020", "#2050c0"};
    for (int t = 0; t < 2; ++t) {
        ScatterPlot plot;
        plot.name = "independent_" + scenario.tasks[t].name;
        plot.x = first.qual0;
        plot.y = first.qual1;
        plot.intensity = t == 0 ? first.base0 : first.base1;
        plot.color = colors[t];
        results.plots.push_back(std::move(plot));
    }
    for (std::size_t v = 0; v < variant_count; ++v) {
        for (int t = 0; t < 2; ++t) {
            ScatterPlot plot;
            std::string label = scenario.composition.tiebreaks[v].label;
            std::replace(label.begin(), label.end(), ':', '-');
            std::replace(label.begin(), label.end(), '.', '_');
            plot.name = label + "_" + scenario.tasks[t].name;
            plot.x = first.qual0;
            plot.y = first.qual1;
            plot.intensity = first.columns[v][t];
            plot.color = colors[t];
            results.plots.push_back(std::move(plot));
        }
    }
    return results;
}

ExperimentResults run_functional_experiment(const Scenario& scenario) {
    ExperimentResults results;
    results.pair_universe_count = scenario.universes;
    const std::size_t metric_index = scenario.composition.audit_metric;

    std::string label;
    switch (scenario.composition.type) {
        case CompositionSpec::Type::functional_or: label = "or"; break;
        case CompositionSpec::Type::functional_and: label = "and"; break;
        case CompositionSpec::Type::functional_xor: label = "xor"; break;
        case CompositionSpec::Type::functional_threshold:
            label = "threshold:" + std::to_string(scenario.composition.threshold_k);
            break;
        default:
            throw ScenarioError("functional experiment called with a non-functional composition");
    }

    VariantAccumulator acc;
    for (std::size_t i = 0; i < scenario.universes; ++i) {
        const auto tasks = realize_tasks(scenario, i);
        std::vector<SoftClassifier> classifiers;
        classifiers.reserve(tasks.size());
        for (const auto& task : tasks) classifiers.push_back(task.classifier);
        std::vector<double> composed;
        switch (scenario.composition.type) {
            case CompositionSpec::Type::functional_or: composed = compose_or(classifiers); break;
            case CompositionSpec::Type::functional_and: composed = compose_and(classifiers); break;
            case CompositionSpec::Type::functional_xor:
                composed = compose_xor_exactly_one(classifiers);
                break;
            default:
                composed = compose_threshold(classifiers, scenario.composition.threshold_k);
                break;
        }
        const FairnessReport report = audit_individual_fairness(tasks[metric_index].metric,
                                                                composed, scenario.epsilon);
        acc.violating += report.violations.size();
        acc.comparisons += report.comparisons;
        for (const Violation& violation : report.violations) {
            acc.excess_sum += violation.excess;
            results.pairs.push_back({label, tasks[metric_index].name, i, violation.a, violation.b,
                                     violation.observed, violation.allowed, violation.excess});
        }
        acc.max_sum += report.max_excess();
    }
    ReportRow row;
    row.composition_type = label;
    row.task = scenario.tasks[metric_index].name;
    row.pct_pairs_violating =
        acc.comparisons == 0
            ? 0.0
            : 100.0 * static_cast<double>(acc.violating) / static_cast<double>(acc.comparisons);
    row.avg_violation = acc.violating == 0 ? 0.0 : acc.excess_sum / static_cast<double>(acc.violating);
    row.max_violation = acc.max_sum / static_cast<double>(scenario.universes);
    results.rows.push_back(std::move(row));
    return results;
}

ExperimentResults run_cohort_experiment(const Scenario& scenario) {
    ExperimentResults results;
    results.pair_universe_count = scenario.universes;
    const std::string label =
        "cohort:" + scenario.composition.cohort_mechanism +
        "(n=" + std::to_string(scenario.composition.cohort_n) + ")";
    VariantAccumulator acc;
    for (std::size_t i = 0; i < scenario.universes; ++i) {
        const auto tasks = realize_tasks(scenario, i);
        const SoftClassifier& classifier = tasks[0].classifier;
        const std::size_t n = scenario.composition.cohort_n;
        std::vector<double> selection(scenario.population_size, 0.0);
        if (scenario.composition.cohort_mechanism == "weighted") {
            for (ElementId u = 0; u < scenario.population_size; ++u)
                selection[u] = ws_selection_probability(classifier, n, u);
        } else if (scenario.population_size <= 8) {
            selection = ptc_selection_distribution(classifier, n);
        } else {
            Rng rng = Rng::derived(universe_seed(scenario, i), 7);
            for (std::size_t trial = 0; trial < scenario.trials; ++trial) {
                const auto members = permute_then_classify(classifier, n, rng);
                for (ElementId u : members) selection[u] += 1.0;
            }
            for (double& s : selection) s /= static_cast<double>(scenario.trials);
            results.log.push_back(
                "selection probabilities estimated by Monte Carlo; audit results carry "
                "sampling noise");
        }
        const FairnessReport report =
            audit_individual_fairness(tasks[0].metric, selection, scenario.epsilon);
        acc.violating += report.violations.size();
        acc.comparisons += report.comparisons;
        for (const Violation& violation : report.violations) {
            acc.excess_sum += violation.excess;
            results.pairs.push_back({label, tasks[0].name, i, violation.a, violation.b,
                                     violation.observed, violation.allowed, violation.excess});
        }
        acc.max_sum += report.max_excess();
    }
    ReportRow row;
    row.composition_type = label;
    row.task = scenario.tasks[0].name;
    row.pct_pairs_violating =
        acc.comparisons == 0
            ? 0.0
            : 100.0 * static_cast<double>(acc.violating) / static_cast<double>(acc.comparisons);
    row.avg_violation = acc.violating == 0 ? 0.0 : acc.excess_sum / static_cast<double>(acc.violating);
    row.max_violation = acc.max_sum / static_cast<double>(scenario.universes);
    results.rows.push_back(std::move(row));
    return results;
}

RunOutput run_scenario_to_dir(const Scenario& scenario, const std::string& out_dir,
                              std::ostream& out) {
    RunOutput output;
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    if (scenario.composition.type == CompositionSpec::Type::constrained) {
        const auto& c = scenario.composition;
        output.feasibility =
            check_constrained_feasibility(c.a_size, c.b_size, c.n, c.p, c.parts);
        const auto& report = *output.feasibility;
        out << "constrained cohort selection: |A|=" << c.a_size << " |B|=" << c.b_size
            << " n=" << c.n << " p=" << c.p << "\n"
            << "  mean acceptance in A is at least " << report.mu_a_lower
            << ", in B at most " << report.mu_b_upper << "\n"
            << "  similarity slack " << report.slack << ", forced mean gap " << report.mean_gap
            << "\n"
            << "  maximum feasible constraint fraction p_max = " << report.p_max << "\n"
            << "  verdict: " << (report.feasible ? "feasible" : "infeasible") << "\n";
        if (!report.feasible && c.error_on_infeasible) output.exit_code = 3;
        return output;
    }

    switch (scenario.composition.type) {
        case CompositionSpec::Type::competitive:
            output.results = run_competitive_experiment(scenario);
            break;
        case CompositionSpec::Type::randomize_then_classify: {
            // Treated as a competitive scenario with no tie-break rows.
            Scenario adjusted = scenario;
            adjusted.composition.type = CompositionSpec::Type::competitive;
            adjusted.composition.tiebreaks.clear();
            output.results = run_competitive_experiment(adjusted);
            break;
        }
        case CompositionSpec::Type::cohort:
            output.results = run_cohort_experiment(scenario);
            break;
        default:
            output.results = run_functional_experiment(scenario);
            break;
    }

    write_report_csv((fs::path(out_dir) / "report.csv").string(), output.results.rows);
    write_pairs_csv((fs::path(out_dir) / "pairs.csv").string(), output.results.pairs);
    for (const ScatterPlot& plot : output.results.plots)
        write_heat_scatter_svg((fs::path(out_dir) / (plot.name + ".svg")).string(), plot);
    for (const std::string& line : output.results.log) out << line << "\n";
    out << "wrote " << output.results.rows.size() << " report rows and "
        << output.results.pairs.size() << " violating pairs to " << out_dir << "\n";
    return output;
}

bool audit_scenario_stage(const Scenario& scenario, const std::string& stage, std::ostream& out) {
    auto print_report = [&](const std::string& what, const FairnessReport& report) {
        out << what << ": " << report.violations.size() << " violation(s) over "
            << report.comparisons << " comparison(s)";
        if (!report.clean())
            out << ", mean excess " << report.mean_excess() << ", max excess "
                << report.max_excess();
        out << "\n";
        for (const std::string& warning : report.warnings) out << "  warning: " << warning << "\n";
    };

    if (stage == "metric") {
        const auto tasks = realize_tasks(scenario, 0);
        for (const auto& task : tasks) {
            const MetricValidation validation = validate_metric(task.metric);
            out << "task '" << task.name << "': metric "
                << (validation.ok() ? "valid" : "INVALID") << "\n";
            for (const auto& issue : validation.issues) out << "  " << issue.describe() << "\n";
        }
        return true;
    }
    if (stage == "base") {
        const auto tasks = realize_tasks(scenario, 0);
        for (const auto& task : tasks)
            print_report("task '" + task.name + "' classifier",
                         audit_individual_fairness(task.metric, task.classifier.p,
                                                   scenario.epsilon));
        return true;
    }
    if (stage == "composed") {
        Scenario single = scenario;
        single.universes = 1;
        ExperimentResults results;
        switch (scenario.composition.type) {
            case CompositionSpec::Type::competitive:
                results = run_competitive_experiment(single);
                break;
            case CompositionSpec::Type::cohort:
                results = run_cohort_experiment(single);
                break;
            case CompositionSpec::Type::constrained:
                out << "composed stage does not apply to constrained scenarios\n";
                return true;
            case CompositionSpec::Type::randomize_then_classify: {
                single.composition.type = CompositionSpec::Type::competitive;
                single.composition.tiebreaks.clear();
                results = run_competitive_experiment(single);
                break;
            }
            default:
                results = run_functional_experiment(single);
                break;
        }
        for (const ReportRow& row : results.rows) {
            out << row.composition_type << " / " << row.task << ": ";
            if (row.dash)
                out << "-\n";
            else
                out << row.pct_pairs_violating << "% pairs violating, avg " << row.avg_violation
                    << ", max " << row.max_violation << "\n";
        }
        return true;
    }
    if (stage == "parity") {
        if (!scenario.groups) {
            out << "scenario has no group structure\n";
            return true;
        }
        const auto tasks = realize_tasks(scenario, 0);
        for (const auto& task : tasks)
            print_report(
                "task '" + task.name + "' conditional parity",
                audit_conditional_parity(scenario.groups->structure, task.classifier.p,
                                         scenario.epsilon));
        return true;
    }
    return false;
}

}  // namespace faircompose
