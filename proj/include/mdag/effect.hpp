#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdag/engine.hpp"

namespace mdag {

// Identification of p(Y^{(1,a)}): the outcome under an intervention that
// both removes the censoring (all indicators at 1) and sets the treatment.
// The functional's free keys are the treatment and outcome counterfactual
// names; evaluation binds them to the treatment value and outcome state.
struct EffectReport {
    Verdict verdict = Verdict::Unknown;
    std::string strategy;
    std::string failure;  // which stage failed, when not identified
    std::string treatment, outcome;
    std::string treatment_proxy, outcome_proxy;
    std::vector<std::string> adjustment_set;
    std::optional<Functional> outcome_functional;
    std::optional<IdReport> stage1;
};

struct EffectOptions {
    int certify_budget = 0;
    std::uint64_t certify_seed = 2026;
};

namespace detail {

// Wraps sums over all stage-1 coordinates outside `keep`. Counterfactual
// coordinates range over their proxy's states; the missing symbol's surplus
// term vanishes because every stage-1 numerator pins the indicators at 1.
inline Functional functional_marginal(const Functional& f, const MDag& g,
                                      const std::set<std::string>& keep, SymbolPool& pool) {
    Functional out = f;
    std::vector<std::string> coords = g.counterfactuals();
    for (const auto& v : g.observed_vertices()) coords.push_back(v);
    std::sort(coords.begin(), coords.end());
    for (const auto& c : coords) {
        if (keep.count(c)) continue;
        const bool is_cf = g.kind(c) == VertexKind::Counterfactual;
        const std::string domain = is_cf ? g.pair_of_counterfactual(c)->proxy : c;
        SymbolRef b = pool.fresh(domain);
        out = Functional::sum(b, domain, out.substituted({{c, b}}));
    }
    return out;
}

}  // namespace detail

// Two-stage pipeline: identify the joint target law over counterfactuals
// and observed vertices (stage 1), then apply the g-formula for the
// treatment inside that reweighted law, using a backdoor adjustment set
// found among the identified (counterfactual or fully observed) vertices of
// the full-data graph (stage 2).
inline EffectReport identify_causal_effect(const MDag& g, const std::string& treatment,
                                           const std::string& outcome,
                                           const EffectOptions& options = {}) {
    for (const auto& v : {treatment, outcome}) {
        if (!g.has_vertex(v) || g.kind(v) != VertexKind::Counterfactual)
            throw std::invalid_argument("treatment/outcome must be counterfactual vertices: " + v);
        if (!g.pair_of_counterfactual(v))
            throw std::invalid_argument("counterfactual has no proxy pair: " + v);
    }
    if (treatment == outcome) throw std::invalid_argument("treatment equals outcome");

    EffectReport report;
    report.treatment = treatment;
    report.outcome = outcome;
    report.treatment_proxy = g.pair_of_counterfactual(treatment)->proxy;
    report.outcome_proxy = g.pair_of_counterfactual(outcome)->proxy;

    IdOptions id_options;
    id_options.include_observed = true;
    id_options.certify_budget = options.certify_budget;
    id_options.certify_seed = options.certify_seed;
    IdReport stage1 = identify_target_law(g, id_options);
    report.stage1 = stage1;
    if (stage1.verdict != Verdict::Identified) {
        report.verdict = stage1.verdict;
        report.strategy = stage1.strategy;
        report.failure = "stage-1: joint target law not identified";
        return report;
    }

    // Full-data graph: counterfactuals, unobserved confounders, observed
    // vertices; missingness machinery plays no role once stage 1 is done.
    std::set<std::string> full_vertices;
    for (const auto& v : g.counterfactuals()) full_vertices.insert(v);
    for (const auto& v : g.unobserved_vertices()) full_vertices.insert(v);
    for (const auto& v : g.observed_vertices()) full_vertices.insert(v);
    const Digraph full = g.digraph().induced(full_vertices);
    const Digraph backdoor = full.without_outgoing(treatment);

    std::vector<std::string> eligible;
    const auto forbidden = full.descendants_of({treatment});
    for (const auto& v : full_vertices) {
        if (v == treatment || v == outcome) continue;
        if (g.kind(v) == VertexKind::Unobserved) continue;
        if (forbidden.count(v)) continue;
        eligible.push_back(v);
    }
    std::sort(eligible.begin(), eligible.end());

    std::optional<std::vector<std::string>> adjustment;
    const std::size_t n = eligible.size();
    std::vector<std::vector<std::string>> subsets;
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<std::string> z;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) z.push_back(eligible[i]);
        subsets.push_back(std::move(z));
    }
    std::stable_sort(subsets.begin(), subsets.end(),
                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
    for (const auto& z : subsets) {
        if (d_separated(backdoor, {treatment}, {outcome}, {z.begin(), z.end()})) {
            adjustment = z;
            break;
        }
    }
    if (!adjustment) {
        report.verdict = Verdict::Unknown;
        report.strategy = stage1.strategy;
        report.failure = "stage-2: no valid adjustment set among identified vertices";
        return report;
    }
    report.adjustment_set = *adjustment;

    const Functional& f1 = *stage1.functional;
    detail::SymbolPool pool;
    const std::set<std::string> zset(adjustment->begin(), adjustment->end());

    std::set<std::string> keep_num = zset;
    keep_num.insert(treatment);
    keep_num.insert(outcome);
    std::set<std::string> keep_den = zset;
    keep_den.insert(treatment);

    Functional numerator = detail::functional_marginal(f1, g, keep_num, pool);
    Functional denominator = detail::functional_marginal(f1, g, keep_den, pool);

    bool z_all_observed = true;
    for (const auto& z : *adjustment)
        if (g.kind(z) != VertexKind::Observed) z_all_observed = false;

    Functional body = Functional::quotient(std::move(numerator), std::move(denominator));
    if (!adjustment->empty()) {
        Functional weight = z_all_observed
                                ? [&] {
                                      std::vector<Slot> slots;
                                      for (const auto& z : *adjustment)
                                          slots.push_back(Slot{z, SymbolRef{z, lowercase(z)}});
                                      return Functional::term(std::move(slots));
                                  }()
                                : detail::functional_marginal(f1, g, zset, pool);
        body = Functional::product({std::move(weight), std::move(body)});
        for (const auto& z : *adjustment) {
            const bool is_cf = g.kind(z) == VertexKind::Counterfactual;
            const std::string domain = is_cf ? g.pair_of_counterfactual(z)->proxy : z;
            SymbolRef b = pool.fresh(domain);
            body = Functional::sum(b, domain, body.substituted({{z, b}}));
        }
    }

    report.verdict = Verdict::Identified;
    report.strategy = stage1.strategy + "+g-formula";
    report.outcome_functional = detail::simplify(body);
    return report;
}

// E[Y^{(1,a)}] with outcome states as values 0..card-1.
inline double expected_outcome(const EffectReport& report, const ObservedLaw& obs, int value) {
    if (report.verdict != Verdict::Identified || !report.outcome_functional)
        throw std::invalid_argument("effect not identified");
    const int outcome_card = obs.cardinality(report.outcome_proxy) - 1;
    double mean = 0.0;
    for (int y = 0; y < outcome_card; ++y) {
        const double p = evaluate(*report.outcome_functional, obs,
                                  {{report.treatment, value}, {report.outcome, y}});
        mean += static_cast<double>(y) * p;
    }
    return mean;
}

// E[Y^{(1,treated)}] - E[Y^{(1,control)}].
inline double average_causal_effect(const EffectReport& report, const ObservedLaw& obs,
                                    int treated = 1, int control = 0) {
    return expected_outcome(report, obs, treated) - expected_outcome(report, obs, control);
}

}  // namespace mdag
