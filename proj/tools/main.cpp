// Command line front end: scenario validation and runs, per-stage audits,
// feasibility bounds for constrained cohort selection, and the built-in
// demonstration reports.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "faircompose/experiments.hpp"
#include "faircompose/scenario.hpp"
#include "faircompose/subset.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;

int cmd_validate(const std::string& path) {
    try {
        faircompose::load_scenario(path);
    } catch (const std::exception& err) {
        std::cerr << "invalid: " << err.what() << "\n";
        return kExitValidation;
    }
    std::cout << "ok: " << path << "\n";
    return kExitOk;
}

int cmd_run(const std::string& path, const std::string& out_dir, std::uint64_t seed,
            bool seed_given) {
    faircompose::Scenario scenario;
    try {
        scenario = faircompose::load_scenario(path);
    } catch (const std::exception& err) {
        std::cerr << "invalid: " << err.what() << "\n";
        return kExitValidation;
    }
    if (seed_given) scenario.seed = seed;
    try {
        const auto output = faircompose::run_scenario_to_dir(scenario, out_dir, std::cout);
        return output.exit_code;
    } catch (const std::exception& err) {
        std::cerr << "run failed: " << err.what() << "\n";
        return kExitValidation;
    }
}

int cmd_audit(const std::string& path, const std::string& stage) {
    faircompose::Scenario scenario;
    try {
        scenario = faircompose::load_scenario(path);
    } catch (const std::exception& err) {
        std::cerr << "invalid: " << err.what() << "\n";
        return kExitValidation;
    }
    try {
        if (!faircompose::audit_scenario_stage(scenario, stage, std::cout)) {
            std::cerr << "unknown stage '" << stage
                      << "' (expected metric, base, composed or parity)\n";
            return kExitValidation;
        }
    } catch (const std::exception& err) {
        std::cerr << "audit failed: " << err.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_demo(const std::string& name) {
    if (!faircompose::run_named_demo(name, std::cout)) {
        std::cerr << "unknown demo '" << name << "'; available:\n";
        for (const auto& known : faircompose::demo_names()) std::cerr << "  " << known << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

int cmd_feasibility(std::size_t a_size, std::size_t b_size, std::size_t n, double p,
                    const std::string& parts_text, bool strict) {
    std::vector<std::pair<double, double>> parts;
    std::stringstream stream(parts_text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        const auto colon = token.find(':');
        if (colon == std::string::npos) {
            std::cerr << "parts must look like beta:gamma[,beta:gamma...]\n";
            return kExitValidation;
        }
        parts.emplace_back(std::stod(token.substr(0, colon)), std::stod(token.substr(colon + 1)));
    }
    if (parts.empty()) parts.emplace_back(1.0, 0.0);
    try {
        const auto report = faircompose::check_constrained_feasibility(a_size, b_size, n, p, parts);
        std::cout << "mean acceptance in A >= " << report.mu_a_lower << "\n"
                  << "mean acceptance in B <= " << report.mu_b_upper << "\n"
                  << "similarity slack        " << report.slack << "\n"
                  << "forced mean gap         " << report.mean_gap << "\n"
                  << "p_max                   " << report.p_max << "\n"
                  << "verdict: " << (report.feasible ? "feasible" : "infeasible") << "\n";
        if (!report.feasible && strict) return kExitInfeasible;
    } catch (const std::exception& err) {
        std::cerr << "feasibility: " << err.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fair-classifier composition simulator and auditor"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = "out", stage = "composed", demo_name, parts = "1:0";
    std::uint64_t seed = 0;
    std::size_t a_size = 0, b_size = 0, n = 0;
    double p = 0.0;
    bool strict = false;

    auto* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

    auto* run = app.add_subcommand("run", "run a scenario and emit reports");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");
    auto* seed_option = run->add_option("--seed", seed, "override the scenario seed");

    auto* audit = app.add_subcommand("audit", "audit one stage of a scenario");
    audit->add_option("scenario", scenario_path, "scenario JSON file")->required();
    audit->add_option("--stage", stage, "metric | base | composed | parity")->required();

    auto* demo = app.add_subcommand("demo", "print a named demonstration report");
    demo->add_option("name", demo_name, "demo name (see 'demo --list')");
    bool list_demos = false;
    demo->add_flag("--list", list_demos, "list demo names");

    auto* feasibility = app.add_subcommand("feasibility", "constrained cohort feasibility bound");
    feasibility->add_option("--a", a_size, "size of the constrained group A")->required();
    feasibility->add_option("--b", b_size, "size of the rest B")->required();
    feasibility->add_option("--n", n, "cohort size")->required();
    feasibility->add_option("--p", p, "required fraction from A")->required();
    feasibility->add_option("--parts", parts, "beta:gamma list, e.g. 0.4:0.25,0.6:0.1");
    feasibility->add_flag("--strict", strict, "exit 3 when infeasible");

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) return cmd_validate(scenario_path);
    if (run->parsed()) return cmd_run(scenario_path, out_dir, seed, !seed_option->empty());
    if (audit->parsed()) return cmd_audit(scenario_path, stage);
    if (demo->parsed()) {
        if (list_demos) {
            for (const auto& known : faircompose::demo_names()) std::cout << known << "\n";
            return kExitOk;
        }
        if (demo_name.empty()) {
            std::cerr << "demo: name required (or --list)\n";
            return kExitValidation;
        }
        return cmd_demo(demo_name);
    }
    if (feasibility->parsed()) return cmd_feasibility(a_size, b_size, n, p, parts, strict);
    return kExitOk;
}
