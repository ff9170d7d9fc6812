#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdag/bundled_examples.hpp"
#include "mdag/dot.hpp"
#include "mdag/effect.hpp"
#include "mdag/engine.hpp"
#include "mdag/json_io.hpp"
#include "mdag/membership.hpp"
#include "mdag/oracle.hpp"
#include "mdag/swig.hpp"

namespace {

// Exit code contract: 0 success / identified / consistent, 1 input error,
// 2 not-identified or lint finding, 3 unknown.
constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNegative = 2;
constexpr int kUnknown = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mdag::parse_error(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

mdag::MDag load_graph(const std::string& path) {
    return mdag::graph_from_json_text(read_file(path), path);
}

int oracle_threads() {
    if (const char* env = std::getenv("MDAG_ID_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

int run_validate(const std::string& graph_path) {
    const mdag::MDag g = load_graph(graph_path);
    const auto violations = mdag::validate(g);
    if (violations.empty()) {
        std::cout << "valid m-DAG (" << g.digraph().vertex_count() << " vertices, "
                  << g.digraph().edge_count() << " edges)\n";
        return kOk;
    }
    for (const auto& v : violations)
        std::cout << "violation[" << v.rule << "]: " << v.detail << "\n";
    return kNegative;
}

int verdict_exit(mdag::Verdict v) {
    switch (v) {
        case mdag::Verdict::Identified: return kOk;
        case mdag::Verdict::NotIdentified: return kNegative;
        case mdag::Verdict::Unknown: return kUnknown;
    }
    return kUnknown;
}

int run_id(const std::string& graph_path, const std::string& marginal, int certify_budget,
           std::uint64_t certify_seed) {
    const mdag::MDag g = load_graph(graph_path);
    mdag::IdOptions options;
    options.certify_budget = certify_budget;
    options.certify_seed = certify_seed;

    const mdag::IdReport report = marginal.empty()
                                      ? mdag::identify_target_law(g, options)
                                      : mdag::identify_marginal(g, marginal, options);
    std::cout << mdag::id_report_to_json(report).dump(2) << "\n";
    if (report.functional) std::cout << "functional: " << report.functional->to_ascii() << "\n";
    if (report.certificate)
        std::cout << "certificate: two laws with observed TV " << report.certificate->observed_tv
                  << " and target TV " << report.certificate->target_tv << " ("
                  << report.certificate->method << ")\n";

    if (!marginal.empty()) {
        const auto attempt = mdag::sequential_swig_attempt(g, marginal);
        std::cout << "\nadjustment-style derivation for " << attempt.target << ":\n";
        for (const auto& step : attempt.steps)
            std::cout << "  " << step.equation << "    [" << step.justification << "]\n";
        for (const auto& r : attempt.residuals)
            std::cout << "  residual: " << r.variable << " in " << r.term
                      << " is observed only under its own R=1\n";
        std::cout << "  derivation " << (attempt.success ? "succeeds" : "fails") << "\n";
    }
    return verdict_exit(report.verdict);
}

int run_effect(const std::string& graph_path, const std::string& treatment,
               const std::string& outcome) {
    const mdag::MDag g = load_graph(graph_path);
    const mdag::EffectReport report = mdag::identify_causal_effect(g, treatment, outcome);
    nlohmann::json j;
    j["verdict"] = mdag::to_string(report.verdict);
    j["strategy"] = report.strategy;
    j["treatment"] = report.treatment;
    j["outcome"] = report.outcome;
    if (report.verdict == mdag::Verdict::Identified) {
        j["adjustment_set"] = report.adjustment_set;
        j["functional_ascii"] = report.outcome_functional->to_ascii();
        j["functional_latex"] = report.outcome_functional->to_latex();
    } else {
        j["failure"] = report.failure;
    }
    std::cout << j.dump(2) << "\n";
    if (report.outcome_functional)
        std::cout << "p(y^(1,a)) = " << report.outcome_functional->to_ascii() << "\n";
    return verdict_exit(report.verdict);
}

int run_swig(const std::string& graph_path, const std::string& split_csv,
             const std::string& treatment_spec) {
    const mdag::MDag g = load_graph(graph_path);
    std::set<std::string> split;
    if (split_csv.empty()) {
        for (const auto& r : g.indicators()) split.insert(r);
    } else {
        std::istringstream ss(split_csv);
        std::string item;
        while (std::getline(ss, item, ',')) split.insert(item);
    }
    mdag::Swig swig = mdag::build_swig(g, split);
    if (!treatment_spec.empty()) {
        const auto eq = treatment_spec.find('=');
        if (eq == std::string::npos)
            throw mdag::parse_error("--treatment expects VERTEX=value, got " + treatment_spec);
        swig = mdag::split_treatment(swig, treatment_spec.substr(0, eq),
                                     treatment_spec.substr(eq + 1));
    }
    std::cout << mdag::to_dot(swig);
    if (auto cycle = mdag::detect_stitch_cycle(swig)) {
        // Anchor the printed walk at an indicator when one is on the cycle.
        std::vector<std::string> walk(cycle->begin(), cycle->end() - 1);
        for (std::size_t i = 0; i < walk.size(); ++i) {
            if (g.has_vertex(walk[i]) && g.kind(walk[i]) == mdag::VertexKind::Indicator) {
                std::rotate(walk.begin(), walk.begin() + static_cast<long>(i), walk.end());
                break;
            }
        }
        walk.push_back(walk.front());
        std::cout << "lint: stitch-back cycle: " << join(walk, " -> ") << "\n";
        return kNegative;
    }
    std::cout << "lint: stitch-back clean\n";
    return kOk;
}

int run_oracle(const std::string& graph_path, int trials, std::uint64_t seed, double floor,
               double tolerance, const std::string& json_path, const std::string& junit_path) {
    const mdag::MDag g = load_graph(graph_path);
    const mdag::IdReport report = mdag::identify_target_law(g);
    if (report.verdict != mdag::Verdict::Identified) {
        std::cout << "oracle: target law not identified (" << mdag::to_string(report.verdict)
                  << " via " << report.strategy << "); nothing to verify\n";
        return verdict_exit(report.verdict);
    }
    mdag::oracle::TrialConfig config;
    auto slash = graph_path.find_last_of('/');
    config.graph_id = slash == std::string::npos ? graph_path : graph_path.substr(slash + 1);
    config.trials = trials;
    config.seed = seed;
    config.positivity_floor = floor;
    config.tolerance = tolerance;
    config.threads = oracle_threads();
    const auto suite = mdag::oracle::verify_functional(g, *report.functional, false, config);
    if (!json_path.empty()) std::ofstream(json_path) << suite.to_json() << "\n";
    if (!junit_path.empty()) std::ofstream(junit_path) << suite.to_junit_xml();
    std::cout << "oracle: graph=" << config.graph_id << " strategy=" << report.strategy
              << " trials=" << trials << " max_error=" << suite.max_error << " verdict="
              << (suite.all_passed() ? "pass" : "fail") << "\n";
    if (suite.failing_seed) std::cout << "oracle: first failing seed " << *suite.failing_seed << "\n";
    return suite.all_passed() ? kOk : kNegative;
}

int run_member(const std::string& graph_path, const std::string& law_path, double tolerance) {
    const mdag::MDag g = load_graph(graph_path);
    const mdag::DiscreteLaw law = mdag::law_from_json_text(read_file(law_path), law_path);
    const mdag::ObservedLaw obs = mdag::observed_law(law);
    const auto report = mdag::check_membership(g, obs, tolerance);
    std::cout << "residual: " << report.residual << " (" << report.method << "; " << report.note
              << ")\n";
    std::cout << (report.consistent ? "consistent with the model" : "inconsistent with the model")
              << " at tolerance " << tolerance << "\n";
    return report.consistent ? kOk : kNegative;
}

int run_render(const std::string& graph_path) {
    const mdag::MDag g = load_graph(graph_path);
    std::cout << mdag::to_dot(g);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"identification engine for missing-data DAGs"};
    app.require_subcommand(1);

    std::string graph_path, law_path, marginal, split_csv, treatment_spec, treatment, outcome;
    std::string json_path, junit_path;
    int trials = 100, certify_budget = 8;
    std::uint64_t seed = 1, certify_seed = 2026;
    double floor = 1e-3, tolerance = 1e-10, member_tolerance = 1e-6;

    auto* validate = app.add_subcommand("validate", "check the structural rules of a graph");
    validate->add_option("graph", graph_path)->required();

    auto* id = app.add_subcommand("id", "identify the target law");
    id->add_option("graph", graph_path)->required();
    id->add_option("--marginal", marginal, "counterfactual vertex to marginalize onto");
    id->add_option("--certify-budget", certify_budget, "counterexample search trials");
    id->add_option("--certify-seed", certify_seed);

    auto* effect = app.add_subcommand("effect", "identify a causal effect under missingness");
    effect->add_option("graph", graph_path)->required();
    effect->add_option("--treatment", treatment)->required();
    effect->add_option("--outcome", outcome)->required();

    auto* swig = app.add_subcommand("swig", "build the R=1 template and lint it");
    swig->add_option("graph", graph_path)->required();
    swig->add_option("--split", split_csv, "indicators to split (default: all)");
    swig->add_option("--treatment", treatment_spec, "VERTEX=value treatment split");

    auto* oracle = app.add_subcommand("oracle", "verify the identified functional by enumeration");
    oracle->add_option("graph", graph_path)->required();
    oracle->add_option("--trials", trials);
    oracle->add_option("--seed", seed);
    oracle->add_option("--floor", floor);
    oracle->add_option("--tolerance", tolerance);
    oracle->add_option("--json", json_path, "write a JSON trial report");
    oracle->add_option("--junit", junit_path, "write a JUnit XML trial report");

    auto* member = app.add_subcommand("member", "check an observed law against the model");
    member->add_option("graph", graph_path)->required();
    member->add_option("law", law_path)->required();
    member->add_option("--tolerance", member_tolerance);

    auto* render = app.add_subcommand("render", "emit DOT for a graph");
    render->add_option("graph", graph_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return run_validate(graph_path);
        if (id->parsed()) return run_id(graph_path, marginal, certify_budget, certify_seed);
        if (effect->parsed()) return run_effect(graph_path, treatment, outcome);
        if (swig->parsed()) return run_swig(graph_path, split_csv, treatment_spec);
        if (oracle->parsed())
            return run_oracle(graph_path, trials, seed, floor, tolerance, json_path, junit_path);
        if (member->parsed()) return run_member(graph_path, law_path, member_tolerance);
        if (render->parsed()) return run_render(graph_path);
    } catch (const mdag::parse_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
