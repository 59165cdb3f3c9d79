#include "faircompose/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace faircompose {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw ScenarioError("scenario: " + message); }

TieBreakSpec parse_tiebreak(const std::string& text, std::size_t tasks) {
    TieBreakSpec spec;
    spec.label = text;
    if (text.rfind("strict:", 0) == 0) {
        spec.kind = TieBreakSpec::Kind::strict;
        spec.task = std::stoul(text.substr(7));
        if (spec.task >= tasks) fail("tiebreak '" + text + "' names a missing task");
    } else if (text.rfind("rho:q", 0) == 0) {
        spec.kind = TieBreakSpec::Kind::rho_qualification;
        spec.task = std::stoul(text.substr(5));
        if (spec.task >= tasks) fail("tiebreak '" + text + "' names a missing task");
    } else if (text.rfind("rho:", 0) == 0) {
        spec.kind = TieBreakSpec::Kind::rho_const;
        spec.rho = std::stod(text.substr(4));
        if (!(spec.rho >= 0.0 && spec.rho <= 1.0)) fail("tiebreak '" + text + "' needs rho in [0,1]");
    } else {
        fail("unknown tiebreak '" + text + "'");
    }
    return spec;
}

MetricSpec parse_metric(const json& value) {
    MetricSpec spec;
    if (value.is_string()) {
        if (value.get<std::string>() != "abs_diff")
            fail("unknown metric kind '" + value.get<std::string>() + "'");
        spec.kind = MetricSpec::Kind::abs_diff;
        return spec;
    }
    if (value.is_object() && value.contains("explicit")) {
        spec.kind = MetricSpec::Kind::explicit_matrix;
        spec.rows = value.at("explicit").get<std::vector<std::vector<double>>>();
        return spec;
    }
    fail("metric must be \"abs_diff\" or {\"explicit\": [[...]]}");
}

ClassifierSpec parse_classifier(const json& value) {
    ClassifierSpec spec;
    if (value.is_object() && value.contains("explicit")) {
        spec.kind = ClassifierSpec::Kind::explicit_vector;
        spec.probabilities = value.at("explicit").get<std::vector<double>>();
        return spec;
    }
    if (value.is_object() && value.contains("optimize")) {
        spec.kind = ClassifierSpec::Kind::optimize;
        spec.cap = value.at("optimize").at("cap").get<double>();
        return spec;
    }
    fail("classifier must be {\"explicit\": [...]} or {\"optimize\": {\"cap\": ...}}");
}

CompositionSpec parse_composition(const json& value, std::size_t tasks) {
    if (!value.is_object() || !value.contains("type")) fail("composition needs a type");
    const std::string type = value.at("type").get<std::string>();
    CompositionSpec spec;
    if (type == "or") {
        spec.type = CompositionSpec::Type::functional_or;
    } else if (type == "and") {
        spec.type = CompositionSpec::Type::functional_and;
    } else if (type == "xor") {
        spec.type = CompositionSpec::Type::functional_xor;
    } else if (type == "threshold") {
        spec.type = CompositionSpec::Type::functional_threshold;
        spec.threshold_k = value.at("k").get<std::size_t>();
    } else if (type == "competitive") {
        spec.type = CompositionSpec::Type::competitive;
        if (!value.contains("tiebreaks") || value.at("tiebreaks").empty())
            fail("competitive composition needs a tiebreaks list");
        for (const auto& tb : value.at("tiebreaks"))
            spec.tiebreaks.push_back(parse_tiebreak(tb.get<std::string>(), tasks));
        if (value.contains("randomize_then_classify")) {
            RtcSpec rtc;
            const auto& node = value.at("randomize_then_classify");
            rtc.task_distribution = node.at("task_distribution").get<std::vector<double>>();
            if (node.contains("boosts")) rtc.boosts = node.at("boosts").get<std::vector<double>>();
            spec.rtc = std::move(rtc);
        }
    } else if (type == "randomize_then_classify") {
        spec.type = CompositionSpec::Type::randomize_then_classify;
        RtcSpec rtc;
        rtc.task_distribution = value.at("task_distribution").get<std::vector<double>>();
        if (value.contains("boosts")) rtc.boosts = value.at("boosts").get<std::vector<double>>();
        spec.rtc = std::move(rtc);
    } else if (type == "cohort") {
        spec.type = CompositionSpec::Type::cohort;
        spec.cohort_mechanism = value.value("mechanism", std::string("ptc"));
        if (spec.cohort_mechanism != "ptc" && spec.cohort_mechanism != "weighted")
            fail("cohort mechanism must be 'ptc' or 'weighted'");
        spec.cohort_n = value.at("n").get<std::size_t>();
    } else if (type == "constrained") {
        spec.type = CompositionSpec::Type::constrained;
        spec.a_size = value.at("a_size").get<std::size_t>();
        spec.b_size = value.at("b_size").get<std::size_t>();
        spec.n = value.at("n").get<std::size_t>();
        spec.p = value.at("p").get<double>();
        for (const auto& part : value.at("parts"))
            spec.parts.emplace_back(part.at(0).get<double>(), part.at(1).get<double>());
        spec.error_on_infeasible = value.value("error_on_infeasible", false);
    } else {
        fail("unknown composition type '" + type + "'");
    }
    if (value.contains("audit_metric")) {
        spec.audit_metric = value.at("audit_metric").get<std::size_t>();
        if (spec.audit_metric >= tasks) fail("audit_metric names a missing task");
    }
    return spec;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& err) {
        fail(std::string("not valid JSON: ") + err.what());
    }
    if (!doc.contains("schema_version")) fail("schema_version is mandatory");
    Scenario scenario;
    scenario.schema_version = doc.at("schema_version").get<int>();
    if (scenario.schema_version != 1) fail("unsupported schema_version");
    if (!doc.contains("seed")) fail("seed is mandatory");
    scenario.seed = doc.at("seed").get<std::uint64_t>();

    if (doc.contains("outcomes")) {
        const auto outcomes = doc.at("outcomes").get<std::vector<std::string>>();
        if (outcomes.size() != 2)
            fail("only binary outcome sets are supported (got " +
                 std::to_string(outcomes.size()) + " outcomes)");
    }

    if (!doc.contains("population")) fail("population is mandatory");
    const auto& pop = doc.at("population");
    scenario.population_size = pop.at("size").get<std::size_t>();
    if (scenario.population_size < 1) fail("population size must be >= 1");
    if (!pop.contains("tasks") || pop.at("tasks").empty()) fail("population needs >= 1 task");
    for (const auto& node : pop.at("tasks")) {
        TaskSpec task;
        task.name = node.at("name").get<std::string>();
        const auto& quals = node.at("qualifications");
        if (quals.contains("gaussian")) {
            GaussianSpec g;
            g.mean = quals.at("gaussian").at("mean").get<double>();
            g.sd = quals.at("gaussian").at("sd").get<double>();
            if (!(g.sd > 0.0)) fail("gaussian sd must be positive");
            task.qualifications = g;
        } else if (quals.contains("explicit")) {
            auto values = quals.at("explicit").get<std::vector<double>>();
            if (values.size() != scenario.population_size)
                fail("explicit qualifications for task '" + task.name + "' have the wrong length");
            for (double v : values)
                if (!(v >= 0.0 && v <= 1.0))
                    fail("explicit qualifications for task '" + task.name + "' leave [0,1]");
            task.qualifications = std::move(values);
        } else {
            fail("task qualifications must be gaussian or explicit");
        }
        scenario.tasks.push_back(std::move(task));
    }

    if (!doc.contains("metrics")) fail("metrics are mandatory (one per task)");
    if (doc.at("metrics").is_string()) {
        for (std::size_t i = 0; i < scenario.tasks.size(); ++i)
            scenario.metrics.push_back(parse_metric(doc.at("metrics")));
    } else {
        for (const auto& node : doc.at("metrics")) scenario.metrics.push_back(parse_metric(node));
    }
    if (scenario.metrics.size() != scenario.tasks.size())
        fail("every task needs a metric (" + std::to_string(scenario.tasks.size()) + " tasks, " +
             std::to_string(scenario.metrics.size()) + " metrics)");
    for (const auto& metric : scenario.metrics) {
        if (metric.kind == MetricSpec::Kind::explicit_matrix) {
            if (metric.rows.size() != scenario.population_size)
                fail("explicit metric has the wrong dimension");
            const TaskMetric m = TaskMetric::from_rows(metric.rows);
            const MetricValidation validation = validate_metric(m);
            if (!validation.ok()) fail("explicit metric: " + validation.issues.front().describe());
        }
    }

    if (!doc.contains("classifiers")) fail("classifiers are mandatory (one per task)");
    for (const auto& node : doc.at("classifiers"))
        scenario.classifiers.push_back(parse_classifier(node));
    if (scenario.classifiers.size() != scenario.tasks.size())
        fail("every task needs a classifier spec");
    for (const auto& c : scenario.classifiers) {
        if (c.kind == ClassifierSpec::Kind::explicit_vector) {
            if (c.probabilities.size() != scenario.population_size)
                fail("explicit classifier has the wrong length");
            for (double v : c.probabilities)
                if (!(v >= 0.0 && v <= 1.0)) fail("explicit classifier leaves [0,1]");
        } else if (!(c.cap >= 0.0 && c.cap <= static_cast<double>(scenario.population_size))) {
            fail("optimize cap must lie in [0, population size]");
        }
    }

    if (!doc.contains("composition")) fail("composition is mandatory");
    scenario.composition = parse_composition(doc.at("composition"), scenario.tasks.size());
    if (scenario.composition.type == CompositionSpec::Type::competitive &&
        scenario.tasks.size() != 2)
        fail("competitive composition needs exactly two tasks");

    if (doc.contains("groups")) {
        GroupSpec groups;
        const auto& node = doc.at("groups");
        groups.structure.attribute = node.at("attribute").get<std::vector<int>>();
        groups.structure.stratum = node.at("stratum").get<std::vector<int>>();
        if (groups.structure.attribute.size() != scenario.population_size ||
            groups.structure.stratum.size() != scenario.population_size)
            fail("group columns have the wrong length");
        if (node.contains("subgroups")) {
            for (const auto& [name, column] : node.at("subgroups").items()) {
                auto values = column.get<std::vector<std::uint8_t>>();
                if (values.size() != scenario.population_size)
                    fail("subgroup column '" + name + "' has the wrong length");
                groups.structure.subgroups[name] = std::move(values);
            }
        }
        scenario.groups = std::move(groups);
    }

    scenario.universes = doc.value("universes", std::size_t{1});
    if (scenario.universes < 1) fail("universes must be >= 1");
    scenario.trials = doc.value("trials", std::size_t{100000});
    scenario.epsilon = doc.value("epsilon", kDefaultEpsilon);
    if (!(scenario.epsilon >= 0.0)) fail("epsilon must be nonnegative");
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("scenario: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

}  // namespace faircompose
