#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdag/digraph.hpp"
#include "mdag/graph.hpp"

namespace mdag {

// d-separation by reachability (Bayes-ball style, no moralization).
//
// States are (vertex, direction-of-entry); a chain or fork passes through a
// vertex outside Z, a collider passes only if the vertex has a descendant in
// Z. Linear in edges times two directions.
inline bool d_separated(const Digraph& g, const std::set<std::string>& a,
                        const std::set<std::string>& b, const std::set<std::string>& z) {
    for (const auto& sets : {&a, &b, &z})
        for (const auto& v : *sets)
            if (!g.has_vertex(v)) throw std::invalid_argument("unknown vertex: " + v);
    for (const auto& v : a)
        if (b.count(v) || z.count(v)) throw std::invalid_argument("query sets must be disjoint: " + v);
    for (const auto& v : b)
        if (z.count(v)) throw std::invalid_argument("query sets must be disjoint: " + v);

    const std::set<std::string> z_anc = z.empty() ? std::set<std::string>{} : g.ancestors_of(z);

    // Entry direction: from_child means the trail reached the vertex against
    // an edge (v <- child side), from_parent means along one.
    enum Dir { FromChild = 0, FromParent = 1 };
    std::set<std::pair<std::string, int>> visited;
    std::vector<std::pair<std::string, int>> frontier;
    for (const auto& v : a) frontier.emplace_back(v, FromChild);

    while (!frontier.empty()) {
        auto [v, dir] = frontier.back();
        frontier.pop_back();
        if (visited.count({v, dir})) continue;
        visited.insert({v, dir});
        if (b.count(v)) return false;

        const bool in_z = z.count(v) > 0;
        if (dir == FromChild) {
            if (!in_z) {
                for (const auto& p : g.parents(v)) frontier.emplace_back(p, FromChild);
                for (const auto& c : g.children(v)) frontier.emplace_back(c, FromParent);
            }
        } else {
            if (!in_z)
                for (const auto& c : g.children(v)) frontier.emplace_back(c, FromParent);
            if (z_anc.count(v))
                for (const auto& p : g.parents(v)) frontier.emplace_back(p, FromChild);
        }
    }
    return true;
}

inline bool d_separated(const MDag& g, const std::set<std::string>& a,
                        const std::set<std::string>& b, const std::set<std::string>& z) {
    return d_separated(g.digraph(), a, b, z);
}

}  // namespace mdag
