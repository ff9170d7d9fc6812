#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdag {

// Directed graph over named vertices. All query results are ordered
// lexicographically by vertex name, so every traversal is deterministic.
// Cycles are representable; acyclicity is a property to check, not a
// construction invariant.
class Digraph {
public:
    void add_vertex(const std::string& name) {
        if (name.empty()) throw std::invalid_argument("vertex name must be non-empty");
        if (index_.count(name)) throw std::invalid_argument("duplicate vertex: " + name);
        index_[name] = static_cast<int>(names_.size());
        names_.push_back(name);
        children_.emplace_back();
        parents_.emplace_back();
    }

    void add_edge(const std::string& from, const std::string& to) {
        const int u = require(from);
        const int v = require(to);
        if (u == v) throw std::invalid_argument("self-loop on vertex: " + from);
        auto& ch = children_[u];
        if (std::find(ch.begin(), ch.end(), v) != ch.end()) return;
        ch.push_back(v);
        parents_[v].push_back(u);
    }

    bool has_vertex(const std::string& name) const { return index_.count(name) > 0; }

    bool has_edge(const std::string& from, const std::string& to) const {
        auto u = index_.find(from);
        auto v = index_.find(to);
        if (u == index_.end() || v == index_.end()) return false;
        const auto& ch = children_[u->second];
        return std::find(ch.begin(), ch.end(), v->second) != ch.end();
    }

    std::size_t vertex_count() const { return names_.size(); }
    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& ch : children_) n += ch.size();
        return n;
    }

    // Vertex names in lexicographic order.
    std::vector<std::string> vertices() const {
        std::vector<std::string> out = names_;
        std::sort(out.begin(), out.end());
        return out;
    }

    // Edges as (from, to) pairs, sorted.
    std::vector<std::pair<std::string, std::string>> edges() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (std::size_t u = 0; u < names_.size(); ++u)
            for (int v : children_[u]) out.emplace_back(names_[u], names_[v]);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<std::string> parents(const std::string& name) const {
        return sorted_names(parents_[require(name)]);
    }

    std::vector<std::string> children(const std::string& name) const {
        return sorted_names(children_[require(name)]);
    }

    // All ancestors of the given set, including the set itself.
    std::set<std::string> ancestors_of(const std::set<std::string>& seeds) const {
        return closure(seeds, parents_);
    }

    std::set<std::string> descendants_of(const std::set<std::string>& seeds) const {
        return closure(seeds, children_);
    }

    // Kahn's algorithm with a lexicographic min-heap; ties always break by
    // name. Returns nullopt if the graph has a cycle.
    std::optional<std::vector<std::string>> topological_order() const {
        std::vector<int> indeg(names_.size());
        for (std::size_t v = 0; v < names_.size(); ++v)
            indeg[v] = static_cast<int>(parents_[v].size());
        auto cmp = [this](int a, int b) { return names_[a] > names_[b]; };
        std::priority_queue<int, std::vector<int>, decltype(cmp)> ready(cmp);
        for (std::size_t v = 0; v < names_.size(); ++v)
            if (indeg[v] == 0) ready.push(static_cast<int>(v));
        std::vector<std::string> order;
        while (!ready.empty()) {
            const int u = ready.top();
            ready.pop();
            order.push_back(names_[u]);
            for (int v : children_[u])
                if (--indeg[v] == 0) ready.push(v);
        }
        if (order.size() != names_.size()) return std::nullopt;
        return order;
    }

    bool is_acyclic() const { return topological_order().has_value(); }

    // A directed cycle as a closed vertex walk [v0, v1, ..., v0], or nullopt.
    // The reported cycle starts at its lexicographically smallest vertex.
    std::optional<std::vector<std::string>> find_cycle() const {
        std::vector<int> color(names_.size(), 0);
        std::vector<int> stack;
        std::optional<std::vector<int>> found;
        for (int start : sorted_indices()) {
            if (color[start] == 0) dfs_cycle(start, color, stack, found);
            if (found) break;
        }
        if (!found) return std::nullopt;
        std::vector<int> cyc = *found;
        auto smallest = std::min_element(cyc.begin(), cyc.end(), [this](int a, int b) {
            return names_[a] < names_[b];
        });
        std::rotate(cyc.begin(), smallest, cyc.end());
        std::vector<std::string> out;
        for (int v : cyc) out.push_back(names_[v]);
        out.push_back(names_[cyc.front()]);
        return out;
    }

    // Copy with the outgoing edges of `vertex` removed (backdoor-graph helper).
    Digraph without_outgoing(const std::string& vertex) const {
        Digraph g;
        for (const auto& n : vertices()) g.add_vertex(n);
        for (const auto& [from, to] : edges())
            if (from != vertex) g.add_edge(from, to);
        return g;
    }

    // Induced subgraph on `keep`.
    Digraph induced(const std::set<std::string>& keep) const {
        Digraph g;
        for (const auto& n : vertices())
            if (keep.count(n)) g.add_vertex(n);
        for (const auto& [from, to] : edges())
            if (keep.count(from) && keep.count(to)) g.add_edge(from, to);
        return g;
    }

private:
    int require(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw std::invalid_argument("unknown vertex: " + name);
        return it->second;
    }

    std::vector<std::string> sorted_names(const std::vector<int>& ids) const {
        std::vector<std::string> out;
        out.reserve(ids.size());
        for (int v : ids) out.push_back(names_[v]);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<int> sorted_indices() const {
        std::vector<int> ids(names_.size());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
        std::sort(ids.begin(), ids.end(), [this](int a, int b) { return names_[a] < names_[b]; });
        return ids;
    }

    std::set<std::string> closure(const std::set<std::string>& seeds,
                                  const std::vector<std::vector<int>>& step) const {
        std::vector<bool> seen(names_.size(), false);
        std::vector<int> frontier;
        for (const auto& s : seeds) {
            const int v = require(s);
            seen[v] = true;
            frontier.push_back(v);
        }
        while (!frontier.empty()) {
            const int u = frontier.back();
            frontier.pop_back();
            for (int v : step[u])
                if (!seen[v]) {
                    seen[v] = true;
                    frontier.push_back(v);
                }
        }
        std::set<std::string> out;
        for (std::size_t v = 0; v < names_.size(); ++v)
            if (seen[v]) out.insert(names_[v]);
        return out;
    }

    void dfs_cycle(int u, std::vector<int>& color, std::vector<int>& stack,
                   std::optional<std::vector<int>>& found) const {
        if (found) return;
        color[u] = 1;
        stack.push_back(u);
        for (int v : sorted_children(u)) {
            if (found) break;
            if (color[v] == 1) {
                auto it = std::find(stack.begin(), stack.end(), v);
                found = std::vector<int>(it, stack.end());
            } else if (color[v] == 0) {
                dfs_cycle(v, color, stack, found);
            }
        }
        stack.pop_back();
        color[u] = 2;
    }

    std::vector<int> sorted_children(int u) const {
        std::vector<int> ch = children_[u];
        std::sort(ch.begin(), ch.end(), [this](int a, int b) { return names_[a] < names_[b]; });
        return ch;
    }

    std::vector<std::string> names_;
    std::map<std::string, int> index_;
    std::vector<std::vector<int>> children_;
    std::vector<std::vector<int>> parents_;
};

}  // namespace mdag
