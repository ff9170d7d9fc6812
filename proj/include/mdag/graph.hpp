#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdag/digraph.hpp"

namespace mdag {

// Roles a vertex can play in a missing-data DAG:
//   Counterfactual — the underlying value that would be seen under full
//                    observation (the value an indicator may censor);
//   Indicator      — a binary observability switch;
//   Proxy          — the recorded variable: equals its counterfactual when
//                    the indicator is 1, the missing symbol otherwise;
//   Unobserved     — a latent confounder with no missingness machinery;
//   Observed       — a variable that is always fully recorded.
enum class VertexKind { Counterfactual, Indicator, Proxy, Unobserved, Observed };

inline const char* to_string(VertexKind k) {
    switch (k) {
        case VertexKind::Counterfactual: return "counterfactual";
        case VertexKind::Indicator: return "indicator";
        case VertexKind::Proxy: return "proxy";
        case VertexKind::Unobserved: return "unobserved";
        case VertexKind::Observed: return "observed";
    }
    return "?";
}

inline std::optional<VertexKind> vertex_kind_from(const std::string& s) {
    if (s == "counterfactual") return VertexKind::Counterfactual;
    if (s == "indicator") return VertexKind::Indicator;
    if (s == "proxy") return VertexKind::Proxy;
    if (s == "unobserved") return VertexKind::Unobserved;
    if (s == "observed") return VertexKind::Observed;
    return std::nullopt;
}

// A (proxy, counterfactual, indicator) triple.
struct ProxyPair {
    std::string proxy;
    std::string counterfactual;
    std::string indicator;
};

// One broken structural rule. Violations are data: validate() reports them
// all instead of failing on the first.
struct Violation {
    std::string rule;
    std::string detail;
    std::vector<std::string> vertices;
};

// Annotated DAG over the five vertex kinds. The structure is mutable during
// construction and treated as immutable afterwards; all operations on it are
// pure queries.
class MDag {
public:
    void add_vertex(const std::string& name, VertexKind kind, int cardinality = 2) {
        graph_.add_vertex(name);
        kinds_[name] = kind;
        cardinality_[name] = cardinality;
    }

    void add_edge(const std::string& from, const std::string& to) { graph_.add_edge(from, to); }

    void add_pair(const std::string& proxy, const std::string& counterfactual,
                  const std::string& indicator) {
        pairs_.push_back({proxy, counterfactual, indicator});
        std::sort(pairs_.begin(), pairs_.end(),
                  [](const ProxyPair& a, const ProxyPair& b) { return a.proxy < b.proxy; });
    }

    const Digraph& digraph() const { return graph_; }

    VertexKind kind(const std::string& name) const {
        auto it = kinds_.find(name);
        if (it == kinds_.end()) throw std::invalid_argument("unknown vertex: " + name);
        return it->second;
    }

    bool has_vertex(const std::string& name) const { return kinds_.count(name) > 0; }

    // Declared cardinality. For proxies this is the stored value from input;
    // StateSpace derives the effective one (counterfactual + missing symbol).
    int declared_cardinality(const std::string& name) const {
        auto it = cardinality_.find(name);
        if (it == cardinality_.end()) throw std::invalid_argument("unknown vertex: " + name);
        return it->second;
    }

    const std::vector<ProxyPair>& pairs() const { return pairs_; }

    std::vector<std::string> of_kind(VertexKind k) const {
        std::vector<std::string> out;
        for (const auto& name : graph_.vertices())
            if (kinds_.at(name) == k) out.push_back(name);
        return out;
    }

    std::vector<std::string> counterfactuals() const { return of_kind(VertexKind::Counterfactual); }
    std::vector<std::string> indicators() const { return of_kind(VertexKind::Indicator); }
    std::vector<std::string> proxies() const { return of_kind(VertexKind::Proxy); }
    std::vector<std::string> observed_vertices() const { return of_kind(VertexKind::Observed); }
    std::vector<std::string> unobserved_vertices() const { return of_kind(VertexKind::Unobserved); }

    const ProxyPair* pair_of_proxy(const std::string& proxy) const {
        for (const auto& p : pairs_)
            if (p.proxy == proxy) return &p;
        return nullptr;
    }

    const ProxyPair* pair_of_counterfactual(const std::string& cf) const {
        for (const auto& p : pairs_)
            if (p.counterfactual == cf) return &p;
        return nullptr;
    }

    const ProxyPair* pair_of_indicator(const std::string& ind) const {
        for (const auto& p : pairs_)
            if (p.indicator == ind) return &p;
        return nullptr;
    }

private:
    Digraph graph_;
    std::map<std::string, VertexKind> kinds_;
    std::map<std::string, int> cardinality_;
    std::vector<ProxyPair> pairs_;
};

// Checks the structural rules a missing-data DAG must satisfy:
//   - acyclicity;
//   - every proxy, counterfactual, and indicator sits in exactly one
//     (proxy, counterfactual, indicator) triple of the right kinds;
//   - a proxy's parents are exactly its partner counterfactual and
//     indicator, and it has no counterfactual children;
//   - no indicator or proxy points into a counterfactual (missingness and
//     its record never cause the underlying value);
//   - unobserved vertices carry no pairing machinery;
//   - indicators are binary; a proxy's declared cardinality is its
//     partner's plus one (the missing symbol).
// Returns an empty list iff the graph is a valid m-DAG.
inline std::vector<Violation> validate(const MDag& g) {
    std::vector<Violation> out;
    const auto& dg = g.digraph();

    if (auto cyc = dg.find_cycle()) {
        std::string walk;
        for (std::size_t i = 0; i < cyc->size(); ++i) {
            if (i) walk += " -> ";
            walk += (*cyc)[i];
        }
        out.push_back({"acyclicity", "directed cycle: " + walk, *cyc});
    }

    std::map<std::string, int> proxy_uses, cf_uses, ind_uses;
    for (const auto& p : g.pairs()) {
        for (const auto& v : {p.proxy, p.counterfactual, p.indicator}) {
            if (!g.has_vertex(v)) {
                out.push_back({"pairing", "pair references unknown vertex " + v, {v}});
                continue;
            }
        }
        if (g.has_vertex(p.proxy) && g.kind(p.proxy) != VertexKind::Proxy)
            out.push_back({"pairing", p.proxy + " is paired as a proxy but has kind " +
                                          to_string(g.kind(p.proxy)),
                           {p.proxy}});
        if (g.has_vertex(p.counterfactual) && g.kind(p.counterfactual) != VertexKind::Counterfactual)
            out.push_back({"pairing", p.counterfactual + " is paired as a counterfactual but has kind " +
                                          to_string(g.kind(p.counterfactual)),
                           {p.counterfactual}});
        if (g.has_vertex(p.indicator) && g.kind(p.indicator) != VertexKind::Indicator)
            out.push_back({"pairing", p.indicator + " is paired as an indicator but has kind " +
                                          to_string(g.kind(p.indicator)),
                           {p.indicator}});
        ++proxy_uses[p.proxy];
        ++cf_uses[p.counterfactual];
        ++ind_uses[p.indicator];
        if (g.has_vertex(p.counterfactual) && g.kind(p.counterfactual) == VertexKind::Unobserved)
            out.push_back({"unobserved-machinery",
                           p.counterfactual + " is unobserved but appears in a proxy pair",
                           {p.counterfactual}});
    }
    for (const auto& [v, n] : proxy_uses)
        if (n > 1) out.push_back({"pairing", "proxy " + v + " appears in " + std::to_string(n) + " pairs", {v}});
    for (const auto& [v, n] : cf_uses)
        if (n > 1)
            out.push_back({"pairing", "counterfactual " + v + " appears in " + std::to_string(n) + " pairs", {v}});
    for (const auto& [v, n] : ind_uses)
        if (n > 1)
            out.push_back({"pairing", "indicator " + v + " appears in " + std::to_string(n) + " pairs", {v}});

    for (const auto& v : g.proxies())
        if (!proxy_uses.count(v))
            out.push_back({"proxy-unpaired", "proxy " + v + " has no (counterfactual, indicator) pair", {v}});
    for (const auto& v : g.counterfactuals())
        if (!cf_uses.count(v))
            out.push_back({"counterfactual-unpaired", "counterfactual " + v + " has no proxy pair", {v}});
    for (const auto& v : g.indicators())
        if (!ind_uses.count(v))
            out.push_back({"indicator-unpaired", "indicator " + v + " has no proxy pair", {v}});

    for (const auto& v : g.proxies()) {
        const ProxyPair* p = g.pair_of_proxy(v);
        if (p) {
            std::set<std::string> want{p->counterfactual, p->indicator};
            std::set<std::string> have;
            for (const auto& u : dg.parents(v)) have.insert(u);
            if (have != want) {
                std::string detail = "proxy " + v + " must have parents exactly {" +
                                     p->counterfactual + ", " + p->indicator + "}";
                out.push_back({"proxy-parents", detail, {v}});
            }
        }
        for (const auto& c : dg.children(v))
            if (g.kind(c) == VertexKind::Counterfactual)
                out.push_back({"proxy-into-counterfactual", "edge " + v + " -> " + c, {v, c}});
    }

    for (const auto& v : g.indicators()) {
        for (const auto& c : dg.children(v))
            if (g.kind(c) == VertexKind::Counterfactual)
                out.push_back({"indicator-into-counterfactual", "edge " + v + " -> " + c, {v, c}});
        if (g.declared_cardinality(v) != 2)
            out.push_back({"indicator-cardinality",
                           "indicator " + v + " must be binary, declared " +
                               std::to_string(g.declared_cardinality(v)),
                           {v}});
    }

    for (const auto& p : g.pairs()) {
        if (!g.has_vertex(p.proxy) || !g.has_vertex(p.counterfactual)) continue;
        const int want = g.declared_cardinality(p.counterfactual) + 1;
        if (g.declared_cardinality(p.proxy) != want)
            out.push_back({"proxy-cardinality",
                           "proxy " + p.proxy + " must have cardinality " + std::to_string(want) +
                               " (partner plus missing symbol), declared " +
                               std::to_string(g.declared_cardinality(p.proxy)),
                           {p.proxy}});
    }

    return out;
}

inline bool is_valid(const MDag& g) { return validate(g).empty(); }

}  // namespace mdag
