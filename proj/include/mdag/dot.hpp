#pragma once

#include <sstream>
#include <string>

#include "mdag/graph.hpp"
#include "mdag/swig.hpp"

namespace mdag {

// DOT rendering. Vertex and edge ordering is lexicographic, so output is
// byte-identical across runs. Consistency edges (into proxies) draw gray,
// matching the usual m-DAG figures.
inline std::string to_dot(const MDag& g, const std::string& name = "mdag") {
    std::ostringstream os;
    os << "digraph " << name << " {\n";
    os << "  rankdir=TB;\n";
    for (const auto& v : g.digraph().vertices()) {
        os << "  \"" << v << "\"";
        switch (g.kind(v)) {
            case VertexKind::Proxy: os << " [color=gray, fontcolor=gray]"; break;
            case VertexKind::Unobserved: os << " [style=dashed]"; break;
            default: break;
        }
        os << ";\n";
    }
    for (const auto& [from, to] : g.digraph().edges()) {
        os << "  \"" << from << "\" -> \"" << to << "\"";
        if (g.kind(to) == VertexKind::Proxy) os << " [color=gray]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

// Fixed nodes draw boxed, per the SWIG convention.
inline std::string to_dot(const Swig& swig, const std::string& name = "swig") {
    std::ostringstream os;
    os << "digraph " << name << " {\n";
    os << "  rankdir=TB;\n";
    for (const auto& v : swig.nodes()) {
        const auto& node = swig.node(v);
        os << "  \"" << v << "\" [label=\"" << node.display << "\"";
        if (node.fixed) os << ", shape=box";
        os << "];\n";
    }
    for (const auto& [from, to] : swig.digraph().edges())
        os << "  \"" << from << "\" -> \"" << to << "\";\n";
    os << "}\n";
    return os.str();
}

}  // namespace mdag
