#pragma once

// Independent verification layer. Everything here re-derives joints,
// margins, and interventional laws by direct summation over full
// configurations, on purpose sharing no derivation code with law.hpp
// (which expands non-proxy configurations and fills proxies by
// consistency). Disagreement between the two paths is a build failure.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mdag/functional.hpp"
#include "mdag/graph.hpp"
#include "mdag/law.hpp"
#include "mdag/rng.hpp"

namespace mdag::oracle {

namespace detail {

// Depth-first enumeration over every vertex in topological order,
// multiplying conditional table entries as it goes (proxy factors
// included: inconsistent branches carry factor zero and are pruned).
template <typename F>
inline void enumerate(const DiscreteLaw& law, F&& visit) {
    const auto order = law.graph().digraph().topological_order();
    if (!order) throw std::invalid_argument("oracle: graph has a cycle");
    std::map<std::string, int> value;
    const auto recurse = [&](auto&& self, std::size_t depth, double p) -> void {
        if (depth == order->size()) {
            visit(value, p);
            return;
        }
        const std::string& v = (*order)[depth];
        const Cpt& cpt = law.table(v);
        const int row = cpt.row_index(value);
        for (int s = 0; s < cpt.card; ++s) {
            const double q = p * cpt.at(row, s);
            if (q == 0.0) continue;
            value[v] = s;
            self(self, depth + 1, q);
        }
        value.erase(v);
    };
    recurse(recurse, 0, 1.0);
}

inline Distribution margin_by_summation(const DiscreteLaw& law, const std::set<std::string>& keep) {
    std::vector<Distribution::Var> vars;
    for (const auto& v : keep) vars.push_back({v, law.space().card.at(v)});
    Distribution out(vars);
    enumerate(law, [&](const std::map<std::string, int>& value, double p) {
        std::vector<int> config;
        config.reserve(vars.size());
        for (const auto& var : out.variables()) config.push_back(value.at(var.name));
        out.at(config) += p;
    });
    return out;
}

}  // namespace detail

inline Distribution brute_joint(const DiscreteLaw& law) {
    std::set<std::string> all;
    for (const auto& v : law.graph().digraph().vertices()) all.insert(v);
    return detail::margin_by_summation(law, all);
}

inline ObservedLaw brute_observed(const DiscreteLaw& law) {
    std::set<std::string> keep;
    const MDag& g = law.graph();
    for (const auto& v : g.digraph().vertices()) {
        const VertexKind k = g.kind(v);
        if (k == VertexKind::Proxy || k == VertexKind::Indicator || k == VertexKind::Observed)
            keep.insert(v);
    }
    return detail::margin_by_summation(law, keep);
}

inline TargetLaw brute_target(const DiscreteLaw& law, bool include_observed = false) {
    std::set<std::string> keep;
    const MDag& g = law.graph();
    for (const auto& v : g.digraph().vertices()) {
        const VertexKind k = g.kind(v);
        if (k == VertexKind::Counterfactual || (include_observed && k == VertexKind::Observed))
            keep.insert(v);
    }
    return detail::margin_by_summation(law, keep);
}

// Exact conditional-independence check: P(a, b | z) = P(a | z) P(b | z) for
// every configuration with P(z) > 0, within tolerance.
inline bool ci_holds(const DiscreteLaw& law, const std::set<std::string>& a,
                     const std::set<std::string>& b, const std::set<std::string>& z,
                     double tolerance = 1e-10) {
    std::set<std::string> abz = a;
    abz.insert(b.begin(), b.end());
    abz.insert(z.begin(), z.end());
    const Distribution m = detail::margin_by_summation(law, abz);

    bool ok = true;
    m.for_each([&](const std::vector<int>& config, double p_abz) {
        if (!ok) return;
        (void)p_abz;
        std::map<std::string, int> az, bz, zz, full;
        const auto& vars = m.variables();
        for (std::size_t i = 0; i < vars.size(); ++i) {
            const std::string& name = vars[i].name;
            full[name] = config[i];
            if (z.count(name)) {
                az[name] = config[i];
                bz[name] = config[i];
                zz[name] = config[i];
            } else if (a.count(name)) {
                az[name] = config[i];
            } else {
                bz[name] = config[i];
            }
        }
        const double pz = m.prob(zz);
        if (pz <= 0.0) return;
        const double lhs = m.prob(full) / pz;
        const double rhs = (m.prob(az) / pz) * (m.prob(bz) / pz);
        if (std::abs(lhs - rhs) > tolerance) ok = false;
    });
    return ok;
}

// Ground truth for the causal stage: truncated factorization. The
// treatment's table is deleted, its value clamped, and the joint re-summed
// onto the remaining counterfactuals (plus observed vertices on request).
inline TargetLaw intervene_truth(const DiscreteLaw& law, const std::string& treatment, int value,
                                 bool include_observed = false) {
    const MDag& g = law.graph();
    if (g.kind(treatment) != VertexKind::Counterfactual)
        throw std::invalid_argument("treatment must be a counterfactual vertex: " + treatment);

    std::set<std::string> keep;
    for (const auto& v : g.digraph().vertices()) {
        const VertexKind k = g.kind(v);
        if (v != treatment &&
            (k == VertexKind::Counterfactual || (include_observed && k == VertexKind::Observed)))
            keep.insert(v);
    }
    std::vector<Distribution::Var> vars;
    for (const auto& v : keep) vars.push_back({v, law.space().card.at(v)});
    Distribution out(vars);

    const auto order = g.digraph().topological_order();
    std::map<std::string, int> val;
    const auto recurse = [&](auto&& self, std::size_t depth, double p) -> void {
        if (depth == order->size()) {
            std::vector<int> config;
            for (const auto& var : out.variables()) config.push_back(val.at(var.name));
            out.at(config) += p;
            return;
        }
        const std::string& v = (*order)[depth];
        if (v == treatment) {
            val[v] = value;
            self(self, depth + 1, p);
            val.erase(v);
            return;
        }
        const Cpt& cpt = law.table(v);
        const int row = cpt.row_index(val);
        for (int s = 0; s < cpt.card; ++s) {
            const double q = p * cpt.at(row, s);
            if (q == 0.0) continue;
            val[v] = s;
            self(self, depth + 1, q);
        }
        val.erase(v);
    };
    recurse(recurse, 0, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Randomized trial suites
// ---------------------------------------------------------------------------

struct TrialConfig {
    std::string graph_id = "graph";
    int trials = 100;
    std::uint64_t seed = 1;
    double positivity_floor = 1e-3;
    double tolerance = 1e-10;
    int threads = 1;
};

struct TrialResult {
    std::uint64_t seed = 0;
    double max_error = 0.0;
    bool passed = false;
    std::string note;
};

struct TrialSuite {
    std::string graph_id;
    double tolerance = 0.0;
    double max_error = 0.0;
    std::optional<std::uint64_t> failing_seed;
    std::vector<TrialResult> trials;

    bool all_passed() const {
        for (const auto& t : trials)
            if (!t.passed) return false;
        return !trials.empty();
    }

    std::string to_json() const {
        std::ostringstream os;
        os.precision(17);
        os << "{\"graph\":\"" << graph_id << "\",\"tolerance\":" << tolerance
           << ",\"max_error\":" << max_error << ",\"verdict\":\""
           << (all_passed() ? "pass" : "fail") << "\",\"trials\":[";
        for (std::size_t i = 0; i < trials.size(); ++i) {
            const auto& t = trials[i];
            if (i) os << ",";
            os << "{\"seed\":" << t.seed << ",\"max_error\":" << t.max_error << ",\"verdict\":\""
               << (t.passed ? "pass" : "fail") << "\"";
            if (!t.note.empty()) os << ",\"note\":\"" << t.note << "\"";
            os << "}";
        }
        os << "]}";
        return os.str();
    }

    std::string to_junit_xml() const {
        std::ostringstream os;
        os.precision(17);
        int failures = 0;
        for (const auto& t : trials)
            if (!t.passed) ++failures;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        os << "<testsuite name=\"" << graph_id << "\" tests=\"" << trials.size() << "\" failures=\""
           << failures << "\">\n";
        for (const auto& t : trials) {
            os << "  <testcase name=\"seed-" << t.seed << "\" classname=\"" << graph_id << "\"";
            if (t.passed)
                os << "/>\n";
            else {
                os << ">\n    <failure message=\"max_error=" << t.max_error;
                if (!t.note.empty()) os << " " << t.note;
                os << "\"/>\n  </testcase>\n";
            }
        }
        os << "</testsuite>\n";
        return os.str();
    }
};

// Deterministic fan-out: results land in a seed-indexed vector, so the
// aggregation is identical at any thread count.
template <typename Fn>
inline std::vector<TrialResult> run_indexed(int n, int threads, Fn&& body) {
    std::vector<TrialResult> results(static_cast<std::size_t>(n));
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) results[static_cast<std::size_t>(i)] = body(i);
        return results;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                results[static_cast<std::size_t>(i)] = body(i);
        });
    for (auto& th : pool) th.join();
    return results;
}

// Compares evaluate(functional, observed law, point) against the target law
// at every point, over seeded random laws. Both comparison sides come from
// this module's own summation; lawlab is only used to draw the laws.
inline TrialSuite verify_functional(const MDag& g, const Functional& functional,
                                    bool include_observed, const TrialConfig& config) {
    TrialSuite suite;
    suite.graph_id = config.graph_id;
    suite.tolerance = config.tolerance;
    const StateSpace space = StateSpace::from_graph(g);

    suite.trials = run_indexed(config.trials, config.threads, [&](int i) {
        TrialResult r;
        r.seed = config.seed + static_cast<std::uint64_t>(i);
        try {
            const DiscreteLaw law = random_law(g, space, r.seed, config.positivity_floor);
            const ObservedLaw obs = brute_observed(law);
            const TargetLaw truth = brute_target(law, include_observed);
            double worst = 0.0;
            truth.for_each([&](const std::vector<int>& config_vals, double expected) {
                std::map<std::string, int> point;
                const auto& vars = truth.variables();
                for (std::size_t k = 0; k < vars.size(); ++k) point[vars[k].name] = config_vals[k];
                const double got = evaluate(functional, obs, point);
                worst = std::max(worst, std::abs(got - expected));
            });
            r.max_error = worst;
            r.passed = worst <= config.tolerance;
        } catch (const positivity_error& e) {
            r.passed = false;
            r.max_error = 1.0;
            r.note = std::string("positivity: ") + e.what();
        }
        return r;
    });

    for (const auto& t : suite.trials) {
        suite.max_error = std::max(suite.max_error, t.max_error);
        if (!t.passed && !suite.failing_seed) suite.failing_seed = t.seed;
    }
    return suite;
}

// ---------------------------------------------------------------------------
// Random graph generators for the property suites
// ---------------------------------------------------------------------------

struct RandomGraphOptions {
    int max_missing = 3;
    int max_observed = 2;
    int max_unobserved = 1;
    int cardinality = 2;
    double edge_prob = 0.45;
    double self_censor_prob = 0.0;
};

// Random valid m-DAG: full-data variables (unobserved, observed,
// counterfactual) come first in a fixed order, indicators and proxies
// after, and every optional edge points forward, so acyclicity holds by
// construction. Proxy parent sets are exactly their pairs.
inline MDag random_mdag(std::uint64_t seed, const RandomGraphOptions& opts = {}) {
    RandomStream stream(seed, "mdag");
    const int k = 1 + stream.next_below(opts.max_missing);
    const int n_obs = stream.next_below(opts.max_observed + 1);
    const int n_unobs = stream.next_below(opts.max_unobserved + 1);

    MDag g;
    std::vector<std::string> full;  // causal order among full-data vertices
    for (int i = 1; i <= n_unobs; ++i) {
        const std::string u = "U" + std::to_string(i);
        g.add_vertex(u, VertexKind::Unobserved, opts.cardinality);
        full.push_back(u);
    }
    for (int i = 1; i <= n_obs; ++i) {
        const std::string x = "X" + std::to_string(i);
        g.add_vertex(x, VertexKind::Observed, opts.cardinality);
        full.push_back(x);
    }
    std::vector<std::string> cfs, inds, proxies;
    for (int i = 1; i <= k; ++i) {
        const std::string tag = std::to_string(i);
        cfs.push_back("V" + tag + "(1)");
        inds.push_back("R" + tag);
        proxies.push_back("V" + tag);
        g.add_vertex(cfs.back(), VertexKind::Counterfactual, opts.cardinality);
        full.push_back(cfs.back());
    }
    for (int i = 0; i < k; ++i) {
        g.add_vertex(inds[i], VertexKind::Indicator, 2);
        g.add_vertex(proxies[i], VertexKind::Proxy, opts.cardinality + 1);
        g.add_pair(proxies[i], cfs[i], inds[i]);
        g.add_edge(cfs[i], proxies[i]);
        g.add_edge(inds[i], proxies[i]);
    }

    for (std::size_t i = 0; i < full.size(); ++i)
        for (std::size_t j = i + 1; j < full.size(); ++j)
            if (stream.next_bool(opts.edge_prob)) g.add_edge(full[i], full[j]);

    for (int t = 0; t < k; ++t) {
        for (const auto& v : full) {
            const bool own_cf = v == cfs[static_cast<std::size_t>(t)];
            const double p = own_cf ? opts.self_censor_prob : opts.edge_prob;
            if (stream.next_bool(p)) g.add_edge(v, inds[t]);
        }
        for (int s = 0; s < t; ++s) {
            if (stream.next_bool(opts.edge_prob)) g.add_edge(inds[s], inds[t]);
            if (stream.next_bool(opts.edge_prob)) g.add_edge(proxies[s], inds[t]);
        }
    }
    return g;
}

// Random plain DAG (observed vertices only) for the d-separation suite.
inline MDag random_plain_dag(std::uint64_t seed, int vertices, int cardinality,
                             double edge_prob = 0.4) {
    RandomStream stream(seed, "dag");
    MDag g;
    std::vector<std::string> names;
    for (int i = 1; i <= vertices; ++i) {
        names.push_back("X" + std::to_string(i));
        g.add_vertex(names.back(), VertexKind::Observed, cardinality);
    }
    for (int i = 0; i < vertices; ++i)
        for (int j = i + 1; j < vertices; ++j)
            if (stream.next_bool(edge_prob)) g.add_edge(names[i], names[j]);
    return g;
}

}  // namespace mdag::oracle
