#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mdag/distribution.hpp"
#include "mdag/errors.hpp"

namespace mdag {

// A symbolic reference inside a functional: `key` is the environment entry
// the evaluator reads (a vertex name for free variables of the expression,
// or a generated binder for summation indices); `display` is what printing
// uses (l1, x, y', ...).
struct SymbolRef {
    std::string key;
    std::string display;

    friend bool operator==(const SymbolRef& a, const SymbolRef& b) {
        return a.key == b.key && a.display == b.display;
    }
};

// A slot assigns an observed-law variable either a literal value (a
// substitution such as R1=1) or a symbolic reference.
struct Slot {
    std::string variable;
    std::variant<int, SymbolRef> value;

    bool is_literal() const { return std::holds_alternative<int>(value); }

    friend bool operator==(const Slot& a, const Slot& b) {
        return a.variable == b.variable && a.value == b.value;
    }
};

// Expression tree over observed-law terms.
//
//   Term      p(joint | given), slots referencing proxies, indicators, and
//             fully observed variables only
//   Product   canonically ordered factors
//   Quotient  numerator / denominator with the measure-zero convention: a
//             numerator that evaluates to exactly 0 short-circuits to 0
//             without touching the denominator
//   Sum       one bound symbol ranging over the state space of a named
//             observed-law variable
//   Constant  a number
class Functional {
public:
    enum class Kind { Constant, Term, Product, Quotient, Sum };

    static Functional constant(double value) {
        Functional f(Kind::Constant);
        f.constant_ = value;
        return f;
    }

    static Functional term(std::vector<Slot> joint, std::vector<Slot> given = {}) {
        Functional f(Kind::Term);
        f.joint_ = std::move(joint);
        f.given_ = std::move(given);
        sort_slots(f.joint_);
        sort_slots(f.given_);
        return f;
    }

    // Flattens nested products and orders factors canonically.
    static Functional product(std::vector<Functional> factors) {
        std::vector<Functional> flat;
        for (auto& f : factors) {
            if (f.kind_ == Kind::Product)
                for (auto& c : f.children_) flat.push_back(std::move(c));
            else
                flat.push_back(std::move(f));
        }
        if (flat.size() == 1) return flat.front();
        std::stable_sort(flat.begin(), flat.end(), [](const Functional& a, const Functional& b) {
            return a.to_ascii() < b.to_ascii();
        });
        Functional f(Kind::Product);
        f.children_ = std::move(flat);
        return f;
    }

    static Functional quotient(Functional numerator, Functional denominator) {
        Functional f(Kind::Quotient);
        f.children_.push_back(std::move(numerator));
        f.children_.push_back(std::move(denominator));
        return f;
    }

    static Functional sum(SymbolRef bound, std::string domain_variable, Functional body) {
        Functional f(Kind::Sum);
        f.bound_ = std::move(bound);
        f.domain_variable_ = std::move(domain_variable);
        f.children_.push_back(std::move(body));
        return f;
    }

    Kind kind() const { return kind_; }
    double constant_value() const { return constant_; }
    const std::vector<Slot>& joint_slots() const { return joint_; }
    const std::vector<Slot>& given_slots() const { return given_; }
    const std::vector<Functional>& children() const { return children_; }
    const SymbolRef& bound() const { return bound_; }
    const std::string& domain_variable() const { return domain_variable_; }

    // Free symbol keys (references not bound by an enclosing sum).
    std::set<std::string> free_keys() const {
        std::set<std::string> out;
        collect_free(out, {});
        return out;
    }

    // Replaces free references whose key matches; map values are either new
    // references or literal substitutions. Bound symbols shadow as usual.
    Functional substituted(const std::map<std::string, std::variant<int, SymbolRef>>& repl) const {
        Functional out = *this;
        out.apply_substitution(repl);
        return out;
    }

    // Recursive evaluation against an observed law. `env` carries values for
    // every free key (the evaluation point) and is extended by sums.
    double evaluate(const Distribution& obs, std::map<std::string, int> env) const {
        switch (kind_) {
            case Kind::Constant: return constant_;
            case Kind::Term: return evaluate_term(obs, env);
            case Kind::Product: {
                double p = 1.0;
                for (const auto& c : children_) {
                    p *= c.evaluate(obs, env);
                    if (p == 0.0) return 0.0;
                }
                return p;
            }
            case Kind::Quotient: {
                const double num = children_[0].evaluate(obs, env);
                if (num == 0.0) return 0.0;
                const double den = children_[1].evaluate(obs, env);
                if (den == 0.0)
                    throw positivity_error(children_[1].to_ascii(), "denominator evaluates to zero");
                return num / den;
            }
            case Kind::Sum: {
                const int card = obs.cardinality(domain_variable_);
                double total = 0.0;
                for (int v = 0; v < card; ++v) {
                    env[bound_.key] = v;
                    total += children_[0].evaluate(obs, env);
                }
                env.erase(bound_.key);
                return total;
            }
        }
        return 0.0;
    }

    // Canonical ASCII form: stable slot and factor ordering, so functionals
    // that are equal up to commutativity print identically.
    std::string to_ascii() const {
        switch (kind_) {
            case Kind::Constant: {
                std::ostringstream os;
                os << constant_;
                return os.str();
            }
            case Kind::Term: {
                std::string s = "p(" + slots_ascii(joint_);
                if (!given_.empty()) s += " | " + slots_ascii(given_);
                return s + ")";
            }
            case Kind::Product: {
                std::string s;
                for (std::size_t i = 0; i < children_.size(); ++i) {
                    if (i) s += " * ";
                    s += children_[i].wrapped_ascii();
                }
                return s;
            }
            case Kind::Quotient:
                return children_[0].wrapped_ascii() + " / " + children_[1].wrapped_ascii();
            case Kind::Sum:
                return "sum_{" + bound_.display + "} " + children_[0].wrapped_always_ascii();
        }
        return "";
    }

    std::string to_latex() const {
        switch (kind_) {
            case Kind::Constant: {
                std::ostringstream os;
                os << constant_;
                return os.str();
            }
            case Kind::Term: {
                std::string s = "p(" + slots_latex(joint_);
                if (!given_.empty()) s += " \\mid " + slots_latex(given_);
                return s + ")";
            }
            case Kind::Product: {
                std::string s;
                for (std::size_t i = 0; i < children_.size(); ++i) {
                    if (i) s += " \\, ";
                    s += children_[i].wrapped_latex();
                }
                return s;
            }
            case Kind::Quotient:
                return "\\frac{" + children_[0].to_latex() + "}{" + children_[1].to_latex() + "}";
            case Kind::Sum:
                return "\\sum_{" + latex_symbol(bound_.display) + "} " + children_[0].wrapped_latex();
        }
        return "";
    }

    // name -> LaTeX: trailing "(...)" becomes a superscript, trailing digits
    // or an underscore tail become a subscript (L1(1) -> L_{1}^{(1)}).
    static std::string latex_symbol(const std::string& name) {
        std::string head = name, sup;
        const auto paren = name.find('(');
        if (paren != std::string::npos && name.back() == ')') {
            head = name.substr(0, paren);
            sup = name.substr(paren);
        }
        std::string base = head, sub;
        const auto underscore = head.find('_');
        if (underscore != std::string::npos) {
            base = head.substr(0, underscore);
            sub = head.substr(underscore + 1);
        } else {
            std::size_t i = head.size();
            while (i > 0 && std::isdigit(static_cast<unsigned char>(head[i - 1]))) --i;
            if (i < head.size() && i > 0) {
                base = head.substr(0, i);
                sub = head.substr(i);
            }
        }
        std::string out = base;
        if (!sub.empty()) out += "_{" + sub + "}";
        if (!sup.empty()) out += "^{" + sup + "}";
        return out;
    }

private:
    explicit Functional(Kind k) : kind_(k) {}

    // Slots order as references first then literals, each group by variable
    // name; this reproduces the usual p(l1, l2, R1=1, R2=1) layout.
    static void sort_slots(std::vector<Slot>& slots) {
        std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
            if (a.is_literal() != b.is_literal()) return b.is_literal();
            return a.variable < b.variable;
        });
    }

    static std::string slot_ascii(const Slot& s) {
        if (s.is_literal()) return s.variable + "=" + std::to_string(std::get<int>(s.value));
        return std::get<SymbolRef>(s.value).display;
    }

    static std::string slots_ascii(const std::vector<Slot>& slots) {
        std::string out;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (i) out += ", ";
            out += slot_ascii(slots[i]);
        }
        return out;
    }

    static std::string slots_latex(const std::vector<Slot>& slots) {
        std::string out;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (i) out += ", ";
            const Slot& s = slots[i];
            if (s.is_literal())
                out += latex_symbol(s.variable) + "{=}" + std::to_string(std::get<int>(s.value));
            else
                out += latex_symbol(std::get<SymbolRef>(s.value).display);
        }
        return out;
    }

    std::string wrapped_ascii() const {
        if (kind_ == Kind::Term || kind_ == Kind::Constant) return to_ascii();
        return "(" + to_ascii() + ")";
    }

    std::string wrapped_always_ascii() const { return "(" + to_ascii() + ")"; }

    std::string wrapped_latex() const {
        if (kind_ == Kind::Term || kind_ == Kind::Constant || kind_ == Kind::Quotient)
            return to_latex();
        return "\\left(" + to_latex() + "\\right)";
    }

    void collect_free(std::set<std::string>& out, std::set<std::string> bound_keys) const {
        if (kind_ == Kind::Term) {
            for (const auto* slots : {&joint_, &given_})
                for (const auto& s : *slots)
                    if (!s.is_literal()) {
                        const auto& k = std::get<SymbolRef>(s.value).key;
                        if (!bound_keys.count(k)) out.insert(k);
                    }
            return;
        }
        if (kind_ == Kind::Sum) bound_keys.insert(bound_.key);
        for (const auto& c : children_) c.collect_free(out, bound_keys);
    }

    void apply_substitution(const std::map<std::string, std::variant<int, SymbolRef>>& repl) {
        if (kind_ == Kind::Term) {
            for (auto* slots : {&joint_, &given_})
                for (auto& s : *slots) {
                    if (s.is_literal()) continue;
                    auto it = repl.find(std::get<SymbolRef>(s.value).key);
                    if (it != repl.end()) s.value = it->second;
                }
            sort_slots(joint_);
            sort_slots(given_);
            return;
        }
        if (kind_ == Kind::Sum && repl.count(bound_.key)) {
            auto inner = repl;
            inner.erase(bound_.key);
            for (auto& c : children_) c.apply_substitution(inner);
            return;
        }
        for (auto& c : children_) c.apply_substitution(repl);
    }

    double evaluate_term(const Distribution& obs, const std::map<std::string, int>& env) const {
        const auto resolve = [&](const Slot& s) -> int {
            if (s.is_literal()) return std::get<int>(s.value);
            const auto& key = std::get<SymbolRef>(s.value).key;
            auto it = env.find(key);
            if (it == env.end()) throw std::invalid_argument("unbound symbol: " + key);
            return it->second;
        };
        std::map<std::string, int> conditioning;
        for (const auto& s : given_) conditioning[s.variable] = resolve(s);
        std::map<std::string, int> full = conditioning;
        bool contradictory = false;
        for (const auto& s : joint_) {
            const int v = resolve(s);
            auto it = full.find(s.variable);
            if (it != full.end() && it->second != v) contradictory = true;
            full[s.variable] = v;
        }
        if (given_.empty()) return contradictory ? 0.0 : obs.prob(full);
        const double denom = obs.prob(conditioning);
        if (denom == 0.0) {
            std::map<std::string, std::string> shown;
            for (const auto& [k, v] : conditioning) shown[k] = std::to_string(v);
            throw positivity_error(to_ascii(), config_string(shown));
        }
        if (contradictory) return 0.0;
        return obs.prob(full) / denom;
    }

    Kind kind_;
    double constant_ = 0.0;
    std::vector<Slot> joint_, given_;
    std::vector<Functional> children_;
    SymbolRef bound_;
    std::string domain_variable_;
};

// Point evaluation entry: the spec-level evaluate(functional, obs, point).
inline double evaluate(const Functional& f, const Distribution& obs,
                       const std::map<std::string, int>& point) {
    return f.evaluate(obs, point);
}

}  // namespace mdag
