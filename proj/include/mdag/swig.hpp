#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdag/digraph.hpp"
#include "mdag/graph.hpp"

namespace mdag {

// Single-world intervention graph derived from an m-DAG. Only the R=1
// template exists: there is no counterfactual under R=0, so no construction
// path ever materializes one.
//
// Node splitting keeps the random half (incoming edges) under the original
// name and routes outgoing edges through a fixed half. Proxies whose
// indicator has been split are relabeled to the counterfactual they now
// equal; the counterfactual vertex itself stays distinct, playing the role
// of an unobserved confounder with consistency structure.
class Swig {
public:
    struct Node {
        std::string name;        // unique key in the graph
        bool fixed = false;      // drawn boxed; no incoming edges
        std::string display;     // label for rendering
        std::string provenance;  // originating m-DAG vertex
    };

    Digraph& digraph() { return graph_; }
    const Digraph& digraph() const { return graph_; }

    void add_node(const Node& n) {
        graph_.add_vertex(n.name);
        meta_[n.name] = n;
    }

    const Node& node(const std::string& name) const {
        auto it = meta_.find(name);
        if (it == meta_.end()) throw std::invalid_argument("unknown swig node: " + name);
        return it->second;
    }

    Node& node_mut(const std::string& name) { return meta_.at(name); }

    std::vector<std::string> nodes() const { return graph_.vertices(); }

    std::vector<std::string> fixed_nodes() const {
        std::vector<std::string> out;
        for (const auto& n : graph_.vertices())
            if (meta_.at(n).fixed) out.push_back(n);
        return out;
    }

private:
    Digraph graph_;
    std::map<std::string, Node> meta_;
};

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Splits every indicator in `split` at value 1. Works on structurally
// malformed graphs as well (the stitch-cycle lint needs to inspect exactly
// those), so no validity precondition beyond the split set being indicators.
inline Swig build_swig(const MDag& g, const std::set<std::string>& split) {
    for (const auto& r : split) {
        if (!g.has_vertex(r)) throw std::invalid_argument("unknown vertex: " + r);
        if (g.kind(r) != VertexKind::Indicator)
            throw std::invalid_argument("cannot split non-indicator vertex: " + r);
    }

    Swig swig;
    const auto& dg = g.digraph();
    for (const auto& v : dg.vertices()) {
        Swig::Node n;
        n.name = v;
        n.display = v;
        n.provenance = v;
        if (g.kind(v) == VertexKind::Proxy) {
            const ProxyPair* p = g.pair_of_proxy(v);
            if (p && split.count(p->indicator)) n.display = v + "(1)";
        }
        swig.add_node(n);
    }
    std::map<std::string, std::string> out_side;
    for (const auto& r : split) {
        Swig::Node n;
        n.name = lowercase(r) + "=1";
        n.fixed = true;
        n.display = n.name;
        n.provenance = r;
        swig.add_node(n);
        out_side[r] = n.name;
    }
    for (const auto& [from, to] : dg.edges()) {
        auto it = out_side.find(from);
        swig.digraph().add_edge(it == out_side.end() ? from : it->second, to);
    }
    return swig;
}

// Standard SWIG node splitting of a treatment after the indicators are
// already split. The value label propagates into the superscript of every
// descendant's display label (e.g. Y(1) under treatment a becomes Y(1,a)).
inline Swig split_treatment(const Swig& swig, const std::string& treatment,
                            const std::string& value) {
    const Swig::Node& t = swig.node(treatment);
    if (t.fixed) throw std::invalid_argument("treatment is already fixed: " + treatment);

    Swig out;
    for (const auto& name : swig.nodes()) out.add_node(swig.node(name));

    Swig::Node fixed;
    fixed.name = value;
    fixed.fixed = true;
    fixed.display = value;
    fixed.provenance = t.provenance;
    out.add_node(fixed);

    for (const auto& [from, to] : swig.digraph().edges())
        out.digraph().add_edge(from == treatment ? value : from, to);

    for (const auto& d : out.digraph().descendants_of({value})) {
        if (d == value) continue;
        Swig::Node& n = out.node_mut(d);
        if (n.fixed) continue;
        if (!n.display.empty() && n.display.back() == ')')
            n.display.insert(n.display.size() - 1, "," + value);
        else
            n.display += "(" + value + ")";
    }
    return out;
}

// Collapses each (random, fixed) pair back into one vertex keyed by
// provenance and unions the edges. A directed cycle in the result is the
// signature of a construction that conflated a proxy with its
// counterfactual; a SWIG built from a well-formed m-DAG always stitches
// back to the acyclic input.
inline std::optional<std::vector<std::string>> detect_stitch_cycle(const Swig& swig) {
    Digraph merged;
    std::set<std::string> added;
    for (const auto& name : swig.nodes()) {
        const auto& prov = swig.node(name).provenance;
        if (added.insert(prov).second) merged.add_vertex(prov);
    }
    for (const auto& [from, to] : swig.digraph().edges()) {
        const auto& pf = swig.node(from).provenance;
        const auto& pt = swig.node(to).provenance;
        if (pf != pt) merged.add_edge(pf, pt);
    }
    return merged.find_cycle();
}

}  // namespace mdag
