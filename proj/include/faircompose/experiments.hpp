#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "faircompose/core.hpp"
#include "faircompose/scenario.hpp"
#include "faircompose/subset.hpp"

namespace faircompose {

// One task of one realized universe: qualifications, metric, classifier.
struct RealizedTask {
    std::string name;
    std::vector<double> qualifications;
    TaskMetric metric;
    SoftClassifier classifier;
};

// Draws the universe for `universe_index`, builds metrics and classifiers,
// and audits every classifier against its own metric (throws with
// diagnostics if one fails -- optimizer output is certified, not trusted).
std::vector<RealizedTask> realize_tasks(const Scenario& scenario, std::size_t universe_index);

// One row of report.csv. `dash` marks tasks that a strict tie-break leaves
// untouched (rendered "-", matching zero violations).
struct ReportRow {
    std::string composition_type;
    std::string task;
    bool dash = false;
    double pct_pairs_violating = 0.0;
    double avg_violation = 0.0;
    double max_violation = 0.0;
};

// One violating pair of pairs.csv; aggregates are recomputable from these.
struct PairRecord {
    std::string composition_type;
    std::string task;
    std::size_t universe = 0;
    ElementId u = 0, v = 0;
    double observed = 0.0, allowed = 0.0, excess = 0.0;
};

struct RtcStats {
    double boost = 1.0;
    double mean_loss = 0.0;       // allocation loss vs independent classification
    std::size_t violations = 0;   // pooled over universes and tasks
};

struct ScatterPlot {
    std::string name;
    std::vector<double> x, y, intensity;
    std::string color;
};

struct ExperimentResults {
    std::vector<ReportRow> rows;
    std::vector<PairRecord> pairs;
    std::vector<RtcStats> rtc;
    std::vector<ScatterPlot> plots;
    std::vector<std::string> log;
    std::size_t pair_universe_count = 0;  // universes contributing to pairs.csv
};

ExperimentResults run_competitive_experiment(const Scenario& scenario);
ExperimentResults run_functional_experiment(const Scenario& scenario);
ExperimentResults run_cohort_experiment(const Scenario& scenario);

struct RunOutput {
    int exit_code = 0;
    ExperimentResults results;
    std::optional<FeasibilityReport> feasibility;
};

// Dispatches on the composition type, writes report.csv / pairs.csv / *.svg
// into out_dir (created if missing), and logs to `out`.
RunOutput run_scenario_to_dir(const Scenario& scenario, const std::string& out_dir,
                              std::ostream& out);

// Per-stage audit of a scenario: "metric", "base", "composed" or "parity".
// Prints findings; returns false for an unknown stage.
bool audit_scenario_stage(const Scenario& scenario, const std::string& stage, std::ostream& out);

// Named demonstration reports; returns false for an unknown name.
bool run_named_demo(const std::string& name, std::ostream& out);
std::vector<std::string> demo_names();

// CSV / SVG writers (deterministic byte output for fixed inputs).
void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows);
void write_pairs_csv(const std::string& path, const std::vector<PairRecord>& pairs);
void write_heat_scatter_svg(const std::string& path, const ScatterPlot& plot);

}  // namespace faircompose
