#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdag/engine.hpp"
#include "mdag/law.hpp"
#include "mdag/optimize.hpp"

namespace mdag {

// Result of projecting an observed law onto the model of a graph. The
// residual is a best-effort upper bound on the total-variation distance to
// the nearest member law: a small residual certifies consistency, a large
// one is evidence of violation but not a proof of distance.
struct MembershipReport {
    double residual = 0.0;
    bool consistent = false;
    bool consistency_violation = false;  // missingness pattern impossible under any member
    std::string method;
    std::string note = "residual is an upper bound from a bounded search";
};

struct MembershipOptions {
    int descent_starts = 3;
    int max_sweeps = 120;
    std::uint64_t seed = 99;
};

namespace detail {

// Rebuilds a member law from the identifying functional: counterfactual and
// observed tables from the reconstructed target law, indicator tables from
// the selection model, proxies deterministic. Exact for laws in the model;
// a deterministic projection otherwise.
inline std::optional<DiscreteLaw> reconstruct_from_functional(const MDag& g,
                                                              const ObservedLaw& obs,
                                                              const IdReport& report) {
    if (report.verdict != Verdict::Identified || !report.functional || !report.selection)
        return std::nullopt;
    if (!g.unobserved_vertices().empty()) return std::nullopt;

    const StateSpace space = StateSpace::from_graph(g);
    std::vector<std::string> free_vars = g.counterfactuals();
    for (const auto& v : g.observed_vertices()) free_vars.push_back(v);
    std::sort(free_vars.begin(), free_vars.end());

    std::vector<Distribution::Var> vars;
    for (const auto& v : free_vars) vars.push_back({v, space.card.at(v)});
    Distribution target(vars);
    try {
        std::vector<int> config(free_vars.size(), 0);
        bool done = free_vars.empty();
        while (!done) {
            std::map<std::string, int> point;
            for (std::size_t i = 0; i < free_vars.size(); ++i) point[free_vars[i]] = config[i];
            target.at(config) = std::max(0.0, evaluate(*report.functional, obs, point));
            std::size_t i = free_vars.size();
            while (true) {
                if (i == 0) {
                    done = true;
                    break;
                }
                --i;
                if (++config[i] < vars[i].card) break;
                config[i] = 0;
            }
        }
        if (target.total_mass() <= 0.0) return std::nullopt;
        target.normalize();

        DiscreteLaw law(g, space);
        for (const auto& pair : g.pairs()) law.set_table(proxy_cpt(g, space, pair));

        for (const auto& v : free_vars) {
            Cpt cpt = make_cpt_shell(g, space, v);
            for (int row = 0; row < cpt.rows(); ++row) {
                std::map<std::string, int> pv;
                int rem = row;
                for (std::size_t i = cpt.parents.size(); i-- > 0;) {
                    pv[cpt.parents[i]] = rem % cpt.parent_cards[i];
                    rem /= cpt.parent_cards[i];
                }
                double row_mass = 0.0;
                std::vector<double> masses(cpt.card, 0.0);
                for (int s = 0; s < cpt.card; ++s) {
                    auto q = pv;
                    q[v] = s;
                    masses[s] = target.prob(q);
                    row_mass += masses[s];
                }
                for (int s = 0; s < cpt.card; ++s)
                    cpt.at(row, s) = row_mass > 0.0 ? masses[s] / row_mass : 1.0 / cpt.card;
            }
            law.set_table(std::move(cpt));
        }

        for (const auto& r : g.indicators()) {
            const Functional& pi = report.selection->propensity.at(r);
            Cpt cpt = make_cpt_shell(g, space, r);
            for (int row = 0; row < cpt.rows(); ++row) {
                std::map<std::string, int> env;
                int rem = row;
                for (std::size_t i = cpt.parents.size(); i-- > 0;) {
                    env[cpt.parents[i]] = rem % cpt.parent_cards[i];
                    rem /= cpt.parent_cards[i];
                }
                double p1 = 0.5;
                try {
                    p1 = std::clamp(evaluate(pi, obs, env), 0.0, 1.0);
                } catch (const positivity_error&) {
                    // unreachable parent configuration; any row works
                }
                cpt.at(row, 1) = p1;
                cpt.at(row, 0) = 1.0 - p1;
            }
            law.set_table(std::move(cpt));
        }
        law.check_rows(1e-6);
        return law;
    } catch (const positivity_error&) {
        return std::nullopt;
    }
}

}  // namespace detail

// Minimizes the total-variation distance between `obs` and the observed
// laws of full-data laws Markov to the graph. When the graph is identified,
// the search starts from the law reconstructed through the identifying
// functional (exact for member laws); coordinate descent over table logits
// refines from there and from random multi-starts.
inline MembershipReport check_membership(const MDag& g, const ObservedLaw& obs, double tolerance,
                                         const MembershipOptions& options = {}) {
    MembershipReport report;

    // Consistency pre-check: mass on a recorded value with its indicator
    // down (or the missing symbol with it up) cannot come from any member.
    const StateSpace space = StateSpace::from_graph(g);
    double violation = 0.0;
    for (const auto& pair : g.pairs()) {
        const int missing = space.missing_value(pair.proxy);
        for (int v = 0; v < space.card.at(pair.proxy); ++v)
            violation += obs.prob({{pair.proxy, v}, {pair.indicator, v == missing ? 1 : 0}});
    }
    if (violation > 0.0) {
        report.consistency_violation = true;
        report.residual = 0.5 * violation;
        report.consistent = false;
        report.method = "consistency-precheck";
        report.note = "missingness pattern impossible under the graph; residual is a lower bound";
        return report;
    }

    double best = 1.0;
    std::string method = "coordinate-descent";

    IdOptions id_options;
    id_options.include_observed = true;
    id_options.certify_budget = 0;
    IdReport id = identify_target_law(g, id_options);
    std::optional<DiscreteLaw> seed_law = detail::reconstruct_from_functional(g, obs, id);
    if (seed_law) {
        best = obs.tv_distance(observed_law(*seed_law));
        method = "functional-reconstruction";
    }

    if (best > tolerance) {
        const auto params = detail::LawParams::layout(g, space);
        auto objective = [&](const std::vector<double>& z) {
            const Distribution cand = observed_law(params.decode(g, space, z));
            return obs.tv_distance(cand);
        };
        std::vector<std::vector<double>> starts;
        if (seed_law) starts.push_back(params.encode(*seed_law));
        for (int s = 0; s < options.descent_starts; ++s)
            starts.push_back(params.encode(
                random_law(g, space, options.seed + 31ULL * static_cast<std::uint64_t>(s), 0.01)));
        for (auto& z : starts) {
            DescentOptions dopts;
            dopts.max_sweeps = options.max_sweeps;
            const double r = coordinate_descent(z, objective, dopts);
            if (r < best) {
                best = r;
                method = "functional-reconstruction+descent";
            }
            if (best <= tolerance) break;
        }
    }

    report.residual = best;
    report.consistent = best <= tolerance;
    report.method = method;
    return report;
}

}  // namespace mdag
