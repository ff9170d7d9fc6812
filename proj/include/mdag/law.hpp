#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mdag/distribution.hpp"
#include "mdag/errors.hpp"
#include "mdag/graph.hpp"
#include "mdag/rng.hpp"

namespace mdag {

// Observed and target laws are plain distributions; the types name the
// margin they live on. An observed law ranges over proxies, indicators, and
// fully observed vertices, with the top state of each proxy playing the
// missing symbol. A target law ranges over counterfactuals (plus observed
// vertices when requested).
using ObservedLaw = Distribution;
using TargetLaw = Distribution;

// Per-vertex cardinalities. Indicators are pinned at 2; a proxy gets its
// partner's cardinality plus one, with the extra top state standing for the
// missing symbol.
struct StateSpace {
    std::map<std::string, int> card;
    std::int64_t enumeration_cap = 1'000'000;

    static StateSpace from_graph(const MDag& g, std::int64_t cap = 1'000'000) {
        StateSpace s;
        s.enumeration_cap = cap;
        for (const auto& v : g.digraph().vertices()) {
            switch (g.kind(v)) {
                case VertexKind::Indicator: s.card[v] = 2; break;
                case VertexKind::Proxy: {
                    const ProxyPair* p = g.pair_of_proxy(v);
                    s.card[v] = (p ? g.declared_cardinality(p->counterfactual) : 1) + 1;
                    break;
                }
                default: s.card[v] = g.declared_cardinality(v);
            }
        }
        return s;
    }

    // Uniform override for every non-indicator, non-proxy vertex.
    static StateSpace uniform(const MDag& g, int k, std::int64_t cap = 1'000'000) {
        StateSpace s = from_graph(g, cap);
        for (auto& [name, c] : s.card) {
            if (g.kind(name) == VertexKind::Indicator) continue;
            if (g.kind(name) == VertexKind::Proxy) continue;
            c = k;
        }
        for (const auto& p : g.pairs()) s.card[p.proxy] = s.card[p.counterfactual] + 1;
        return s;
    }

    int missing_value(const std::string& proxy) const { return card.at(proxy) - 1; }

    void check_cap(const MDag& g) const {
        std::int64_t non_proxy = 1;
        for (const auto& [name, c] : card) {
            if (g.kind(name) == VertexKind::Proxy) continue;
            non_proxy *= c;
            if (non_proxy > enumeration_cap)
                throw enumeration_cap_error("state space exceeds enumeration cap of " +
                                            std::to_string(enumeration_cap));
        }
    }
};

// Conditional probability table. Rows are indexed by the configuration of
// the lexicographically sorted parent list in mixed radix (first parent most
// significant).
struct Cpt {
    std::string vertex;
    std::vector<std::string> parents;
    std::vector<int> parent_cards;
    int card = 0;
    std::vector<double> table;  // rows * card

    int rows() const {
        int r = 1;
        for (int c : parent_cards) r *= c;
        return r;
    }

    int row_index(const std::map<std::string, int>& parent_values) const {
        int idx = 0;
        for (std::size_t i = 0; i < parents.size(); ++i) {
            auto it = parent_values.find(parents[i]);
            if (it == parent_values.end())
                throw std::invalid_argument("missing parent value for " + parents[i]);
            idx = idx * parent_cards[i] + it->second;
        }
        return idx;
    }

    double at(int row, int state) const { return table[static_cast<std::size_t>(row) * card + state]; }

    double& at(int row, int state) { return table[static_cast<std::size_t>(row) * card + state]; }
};

// A full-data law Markov to its graph: one table per vertex, proxies carried
// as deterministic consistency tables. Immutable in use; all operations
// below are pure.
class DiscreteLaw {
public:
    DiscreteLaw(MDag graph, StateSpace space)
        : graph_(std::move(graph)), space_(std::move(space)) {}

    const MDag& graph() const { return graph_; }
    const StateSpace& space() const { return space_; }

    void set_table(Cpt cpt) { tables_[cpt.vertex] = std::move(cpt); }

    const Cpt& table(const std::string& vertex) const {
        auto it = tables_.find(vertex);
        if (it == tables_.end()) throw std::invalid_argument("no table for vertex: " + vertex);
        return it->second;
    }

    Cpt& table_mut(const std::string& vertex) { return tables_.at(vertex); }

    // Row-sum check: every conditional row must be a distribution.
    void check_rows(double tol = 1e-12) const {
        for (const auto& [vertex, cpt] : tables_) {
            for (int r = 0; r < cpt.rows(); ++r) {
                double s = 0.0;
                for (int v = 0; v < cpt.card; ++v) {
                    if (cpt.at(r, v) < 0.0)
                        throw std::invalid_argument("negative probability in table for " + vertex);
                    s += cpt.at(r, v);
                }
                if (std::abs(s - 1.0) > tol)
                    throw std::invalid_argument("row of " + vertex + " sums to " + std::to_string(s));
            }
        }
    }

private:
    MDag graph_;
    StateSpace space_;
    std::map<std::string, Cpt> tables_;
};

namespace detail {

inline Cpt make_cpt_shell(const MDag& g, const StateSpace& space, const std::string& vertex) {
    Cpt cpt;
    cpt.vertex = vertex;
    cpt.parents = g.digraph().parents(vertex);
    for (const auto& p : cpt.parents) cpt.parent_cards.push_back(space.card.at(p));
    cpt.card = space.card.at(vertex);
    cpt.table.assign(static_cast<std::size_t>(cpt.rows()) * cpt.card, 0.0);
    return cpt;
}

// The consistency table of a proxy: copy the counterfactual when the
// indicator is 1, emit the missing symbol when it is 0.
inline Cpt proxy_cpt(const MDag& g, const StateSpace& space, const ProxyPair& pair) {
    Cpt cpt = make_cpt_shell(g, space, pair.proxy);
    const int missing = space.missing_value(pair.proxy);
    for (int r = 0; r < cpt.rows(); ++r) {
        // Decode the row back into parent values.
        std::map<std::string, int> pv;
        int rem = r;
        for (std::size_t i = cpt.parents.size(); i-- > 0;) {
            pv[cpt.parents[i]] = rem % cpt.parent_cards[i];
            rem /= cpt.parent_cards[i];
        }
        const int indicator = pv.at(pair.indicator);
        const int underlying = pv.at(pair.counterfactual);
        cpt.at(r, indicator == 1 ? underlying : missing) = 1.0;
    }
    return cpt;
}

}  // namespace detail

// Draws a full-data law Markov to the graph. Every non-proxy row is uniform
// on the simplex, then mapped to floor + (1 - card*floor) * row so each
// entry is at least `positivity_floor` exactly; proxy tables are the
// deterministic consistency tables. Reproducible: the stream for a row is
// keyed by (seed, vertex name, row index) as documented in rng.hpp.
inline DiscreteLaw random_law(const MDag& g, const StateSpace& space, std::uint64_t seed,
                              double positivity_floor = 1e-3) {
    space.check_cap(g);
    DiscreteLaw law(g, space);
    for (const auto& vertex : g.digraph().vertices()) {
        if (g.kind(vertex) == VertexKind::Proxy) {
            const ProxyPair* p = g.pair_of_proxy(vertex);
            if (!p) throw std::invalid_argument("proxy " + vertex + " has no pair");
            law.set_table(detail::proxy_cpt(g, space, *p));
            continue;
        }
        Cpt cpt = detail::make_cpt_shell(g, space, vertex);
        if (positivity_floor * cpt.card >= 1.0)
            throw std::invalid_argument("positivity floor too large for cardinality of " + vertex);
        for (int r = 0; r < cpt.rows(); ++r) {
            RandomStream stream(seed, vertex, static_cast<std::uint64_t>(r));
            const auto row = stream.next_simplex(static_cast<std::size_t>(cpt.card));
            for (int v = 0; v < cpt.card; ++v)
                cpt.at(r, v) = positivity_floor + (1.0 - positivity_floor * cpt.card) * row[v];
        }
        law.set_table(std::move(cpt));
    }
    law.check_rows();
    return law;
}

// Exact product-of-tables expansion over every vertex (proxies included;
// their coordinates carry mass only on consistent configurations).
inline Distribution joint(const DiscreteLaw& law) {
    const MDag& g = law.graph();
    const StateSpace& space = law.space();
    space.check_cap(g);

    std::vector<Distribution::Var> vars;
    for (const auto& v : g.digraph().vertices()) vars.push_back({v, space.card.at(v)});
    Distribution out(vars);

    const auto non_proxy = [&] {
        std::vector<std::string> names;
        for (const auto& v : g.digraph().vertices())
            if (g.kind(v) != VertexKind::Proxy) names.push_back(v);
        return names;
    }();

    std::map<std::string, int> value;
    const std::size_t n = non_proxy.size();
    std::vector<int> state(n, 0);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) value[non_proxy[i]] = state[i];
        for (const auto& pair : g.pairs())
            value[pair.proxy] = value.at(pair.indicator) == 1 ? value.at(pair.counterfactual)
                                                              : space.missing_value(pair.proxy);
        double p = 1.0;
        for (const auto& v : non_proxy) {
            const Cpt& cpt = law.table(v);
            p *= cpt.at(cpt.row_index(value), value.at(v));
            if (p == 0.0) break;
        }
        std::vector<int> config;
        config.reserve(out.variables().size());
        for (const auto& var : out.variables()) config.push_back(value.at(var.name));
        out.at(config) = p;

        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++state[i] < space.card.at(non_proxy[i])) break;
            state[i] = 0;
            if (i == 0) return out;
        }
        if (n == 0) return out;
    }
}

// Margin of the joint over proxies, indicators, and fully observed vertices;
// the missing symbol appears exactly where an indicator is 0.
inline ObservedLaw observed_law(const DiscreteLaw& law) {
    std::set<std::string> keep;
    const MDag& g = law.graph();
    for (const auto& v : g.digraph().vertices()) {
        const VertexKind k = g.kind(v);
        if (k == VertexKind::Proxy || k == VertexKind::Indicator || k == VertexKind::Observed)
            keep.insert(v);
    }
    return joint(law).marginal(keep);
}

// Margin of the joint over the counterfactual vertices, optionally keeping
// the fully observed ones as well.
inline TargetLaw target_law(const DiscreteLaw& law, bool include_observed = false) {
    std::set<std::string> keep;
    const MDag& g = law.graph();
    for (const auto& v : g.digraph().vertices()) {
        const VertexKind k = g.kind(v);
        if (k == VertexKind::Counterfactual || (include_observed && k == VertexKind::Observed))
            keep.insert(v);
    }
    return joint(law).marginal(keep);
}

// Conditional observed law given a partial configuration.
inline ObservedLaw condition(const ObservedLaw& obs, const std::map<std::string, int>& event) {
    return obs.condition(event);
}

}  // namespace mdag
