#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdag/errors.hpp"

namespace mdag {

// Serializes "name=value" pairs joined by ";" in lexicographic name order.
// The missing symbol (see Distribution::kMissingText) renders as "?".
inline std::string config_string(const std::map<std::string, std::string>& assignment) {
    std::string out;
    bool first = true;
    for (const auto& [name, value] : assignment) {
        if (!first) out += ";";
        out += name + "=" + value;
        first = false;
    }
    return out;
}

// Exact finite joint distribution over named integer-valued variables.
// Variables are kept sorted by name; the table is dense in mixed radix with
// the first variable most significant. Values are probabilities, never
// log-space: all state spaces here are enumerable by construction.
class Distribution {
public:
    struct Var {
        std::string name;
        int card = 0;
    };

    static constexpr const char* kMissingText = "?";

    Distribution() = default;

    explicit Distribution(std::vector<Var> vars) : vars_(std::move(vars)) {
        std::sort(vars_.begin(), vars_.end(),
                  [](const Var& a, const Var& b) { return a.name < b.name; });
        std::size_t n = 1;
        for (const auto& v : vars_) {
            if (v.card < 1) throw std::invalid_argument("variable " + v.name + " needs cardinality >= 1");
            n *= static_cast<std::size_t>(v.card);
        }
        p_.assign(n, 0.0);
    }

    const std::vector<Var>& variables() const { return vars_; }
    std::size_t size() const { return p_.size(); }

    bool has_variable(const std::string& name) const { return find(name) >= 0; }

    int cardinality(const std::string& name) const {
        const int i = find(name);
        if (i < 0) throw std::invalid_argument("unknown variable: " + name);
        return vars_[i].card;
    }

    double& at(const std::vector<int>& config) { return p_[index(config)]; }
    double at(const std::vector<int>& config) const { return p_[index(config)]; }

    // Probability of a partial assignment: sum over unassigned variables.
    double prob(const std::map<std::string, int>& assignment) const {
        std::vector<int> pin(vars_.size(), -1);
        bind(assignment, pin);
        double total = 0.0;
        std::vector<int> config(vars_.size(), 0);
        for_each_matching(pin, config, 0, [&](std::size_t idx) { total += p_[idx]; });
        return total;
    }

    double total_mass() const {
        double s = 0.0;
        for (double v : p_) s += v;
        return s;
    }

    void normalize() {
        const double s = total_mass();
        if (s <= 0.0) throw std::runtime_error("cannot normalize zero-mass distribution");
        for (double& v : p_) v /= s;
    }

    Distribution marginal(const std::set<std::string>& keep) const {
        std::vector<Var> kept;
        for (const auto& v : vars_)
            if (keep.count(v.name)) kept.push_back(v);
        if (kept.size() != keep.size())
            for (const auto& name : keep)
                if (!has_variable(name)) throw std::invalid_argument("unknown variable: " + name);
        Distribution out(kept);
        std::vector<int> config(vars_.size(), 0);
        std::vector<int> sub;
        sub.reserve(kept.size());
        for_each_config(config, 0, [&](std::size_t idx) {
            if (p_[idx] == 0.0) return;
            sub.clear();
            for (std::size_t i = 0; i < vars_.size(); ++i)
                if (keep.count(vars_[i].name)) sub.push_back(config[i]);
            out.p_[out.index(sub)] += p_[idx];
        });
        return out;
    }

    // Conditional law given the event, renormalized; same variable set with
    // all off-event mass zero. Throws positivity_error on a zero-mass event.
    Distribution condition(const std::map<std::string, int>& event) const {
        std::vector<int> pin(vars_.size(), -1);
        bind(event, pin);
        double mass = 0.0;
        std::vector<int> config(vars_.size(), 0);
        for_each_matching(pin, config, 0, [&](std::size_t idx) { mass += p_[idx]; });
        if (mass <= 0.0) {
            std::map<std::string, std::string> shown;
            for (const auto& [k, v] : event) shown[k] = value_text(k, v);
            throw positivity_error("conditional law", config_string(shown));
        }
        Distribution out = *this;
        std::fill(out.p_.begin(), out.p_.end(), 0.0);
        for_each_matching(pin, config, 0, [&](std::size_t idx) { out.p_[idx] = p_[idx] / mass; });
        return out;
    }

    // Total variation distance; requires identical variable layouts.
    double tv_distance(const Distribution& other) const {
        if (vars_.size() != other.vars_.size())
            throw std::invalid_argument("tv_distance: variable sets differ");
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i].name != other.vars_[i].name || vars_[i].card != other.vars_[i].card)
                throw std::invalid_argument("tv_distance: variable sets differ");
        double s = 0.0;
        for (std::size_t i = 0; i < p_.size(); ++i) s += std::abs(p_[i] - other.p_[i]);
        return 0.5 * s;
    }

    template <typename F>
    void for_each(F&& f) const {
        std::vector<int> config(vars_.size(), 0);
        for_each_config(config, 0, [&](std::size_t idx) { f(config, p_[idx]); });
    }

    // Rename variables through `names` (old -> new); layout re-sorts.
    Distribution relabeled(const std::map<std::string, std::string>& names) const {
        std::vector<Var> vars;
        for (const auto& v : vars_) {
            auto it = names.find(v.name);
            vars.push_back({it == names.end() ? v.name : it->second, v.card});
        }
        Distribution out(vars);
        for_each([&](const std::vector<int>& config, double p) {
            if (p == 0.0) return;
            std::map<std::string, int> assignment;
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                auto it = names.find(vars_[i].name);
                assignment[it == names.end() ? vars_[i].name : it->second] = config[i];
            }
            std::vector<int> cfg;
            for (const auto& v : out.vars_) cfg.push_back(assignment.at(v.name));
            out.at(cfg) += p;
        });
        return out;
    }

    // Value rendering for config strings; by convention the top state of a
    // variable flagged missing-capable is the missing symbol. The flag set
    // is carried by callers (see ObservedLaw helpers in law.hpp); here a
    // plain integer is rendered.
    std::string value_text(const std::string& name, int value) const {
        (void)name;
        return std::to_string(value);
    }

    std::size_t index(const std::vector<int>& config) const {
        if (config.size() != vars_.size()) throw std::invalid_argument("config arity mismatch");
        std::size_t idx = 0;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (config[i] < 0 || config[i] >= vars_[i].card)
                throw std::out_of_range("value out of range for " + vars_[i].name);
            idx = idx * static_cast<std::size_t>(vars_[i].card) + static_cast<std::size_t>(config[i]);
        }
        return idx;
    }

private:
    int find(const std::string& name) const {
        auto it = std::lower_bound(vars_.begin(), vars_.end(), name,
                                   [](const Var& v, const std::string& n) { return v.name < n; });
        if (it == vars_.end() || it->name != name) return -1;
        return static_cast<int>(it - vars_.begin());
    }

    void bind(const std::map<std::string, int>& assignment, std::vector<int>& pin) const {
        for (const auto& [name, value] : assignment) {
            const int i = find(name);
            if (i < 0) throw std::invalid_argument("unknown variable: " + name);
            if (value < 0 || value >= vars_[i].card)
                throw std::out_of_range("value out of range for " + name);
            pin[i] = value;
        }
    }

    template <typename F>
    void for_each_config(std::vector<int>& config, std::size_t depth, F&& f) const {
        if (depth == vars_.size()) {
            f(index(config));
            return;
        }
        for (int v = 0; v < vars_[depth].card; ++v) {
            config[depth] = v;
            for_each_config(config, depth + 1, f);
        }
    }

    template <typename F>
    void for_each_matching(const std::vector<int>& pin, std::vector<int>& config, std::size_t depth,
                           F&& f) const {
        if (depth == vars_.size()) {
            f(index(config));
            return;
        }
        if (pin[depth] >= 0) {
            config[depth] = pin[depth];
            for_each_matching(pin, config, depth + 1, f);
            return;
        }
        for (int v = 0; v < vars_[depth].card; ++v) {
            config[depth] = v;
            for_each_matching(pin, config, depth + 1, f);
        }
    }

    std::vector<Var> vars_;
    std::vector<double> p_;
};

}  // namespace mdag
