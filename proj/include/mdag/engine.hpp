#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mdag/certify.hpp"
#include "mdag/dsep.hpp"
#include "mdag/functional.hpp"
#include "mdag/graph.hpp"
#include "mdag/law.hpp"
#include "mdag/swig.hpp"

namespace mdag {

// Indicators whose own counterfactual points at them. A non-empty result
// rules out nonparametric identification of the target law.
inline std::vector<std::string> screen_self_censoring(const MDag& g) {
    std::vector<std::string> out;
    for (const auto& pair : g.pairs())
        if (g.digraph().has_edge(pair.counterfactual, pair.indicator)) out.push_back(pair.indicator);
    std::sort(out.begin(), out.end());
    return out;
}

// Identified propensity expression per indicator, keyed by the indicator
// name. Free symbols of each expression are the indicator's parent vertex
// names, so a propensity can be evaluated directly at a parent configuration.
struct SelectionModel {
    std::map<std::string, Functional> propensity;
};

enum class Verdict { Identified, NotIdentified, Unknown };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Identified: return "identified";
        case Verdict::NotIdentified: return "not-identified";
        case Verdict::Unknown: return "unknown";
    }
    return "?";
}

struct IdReport {
    Verdict verdict = Verdict::Unknown;
    std::string strategy;
    std::optional<Functional> functional;
    std::optional<Certificate> certificate;
    bool testable = false;
    bool npi = false;
    std::optional<SelectionModel> selection;
    std::vector<std::string> self_censoring;
    bool includes_observed = false;
};

struct IdOptions {
    bool include_observed = false;  // emit the target over counterfactuals plus observed vertices
    int certify_budget = 8;         // counterexample-search trials when strategies fail
    std::uint64_t certify_seed = 2026;
};

// ---------------------------------------------------------------------------
// Registered permutation patterns (the models identified by sequential
// fixing that place no restrictions on the observed law). The graphical
// form is registered from the missing-data literature, not derived here.
// ---------------------------------------------------------------------------

// K ordered blocks: each indicator depends on the counterfactuals of later
// blocks and the recorded proxies and indicators of earlier ones, with a
// saturated dependence among the counterfactuals themselves.
inline MDag permutation_pattern(int k) {
    MDag g;
    const auto cf = [](int i) { return "L" + std::to_string(i) + "(1)"; };
    const auto ind = [](int i) { return "R" + std::to_string(i); };
    const auto proxy = [](int i) { return "L" + std::to_string(i); };
    for (int i = 1; i <= k; ++i) {
        g.add_vertex(cf(i), VertexKind::Counterfactual, 2);
        g.add_vertex(ind(i), VertexKind::Indicator, 2);
        g.add_vertex(proxy(i), VertexKind::Proxy, 3);
        g.add_pair(proxy(i), cf(i), ind(i));
    }
    for (int i = 1; i <= k; ++i)
        for (int j = i + 1; j <= k; ++j) g.add_edge(cf(i), cf(j));
    for (int i = 1; i <= k; ++i) {
        for (int j = i + 1; j <= k; ++j) g.add_edge(cf(j), ind(i));
        for (int j = 1; j < i; ++j) {
            g.add_edge(proxy(j), ind(i));
            g.add_edge(ind(j), ind(i));
        }
        g.add_edge(cf(i), proxy(i));
        g.add_edge(ind(i), proxy(i));
    }
    return g;
}

// Exact isomorphism (respecting kinds and pairing) against the registered
// permutation patterns. Tried for K in {2, 3}; K! block orderings is cheap
// at this scale.
inline bool is_permutation_pattern(const MDag& g) {
    if (!g.observed_vertices().empty() || !g.unobserved_vertices().empty()) return false;
    const int k = static_cast<int>(g.pairs().size());
    if (k < 2 || k > 3) return false;
    if (g.counterfactuals().size() != static_cast<std::size_t>(k) ||
        g.indicators().size() != static_cast<std::size_t>(k))
        return false;

    const MDag pattern = permutation_pattern(k);
    const auto pattern_edges = pattern.digraph().edges();
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    const auto& pairs = g.pairs();
    do {
        std::map<std::string, std::string> rename;
        for (int i = 0; i < k; ++i) {
            const std::string tag = std::to_string(order[i] + 1);
            rename[pairs[i].counterfactual] = "L" + tag + "(1)";
            rename[pairs[i].indicator] = "R" + tag;
            rename[pairs[i].proxy] = "L" + tag;
        }
        std::vector<std::pair<std::string, std::string>> translated;
        for (const auto& [from, to] : g.digraph().edges())
            translated.emplace_back(rename.at(from), rename.at(to));
        std::sort(translated.begin(), translated.end());
        if (translated == pattern_edges) return true;
    } while (std::next_permutation(order.begin(), order.end()));
    return false;
}

// ---------------------------------------------------------------------------
// Strategy machinery
// ---------------------------------------------------------------------------

namespace detail {

inline std::set<std::string> as_set(const std::vector<std::string>& v) {
    return {v.begin(), v.end()};
}

// Readability rewrites applied to assembled functionals:
//  - a sum of a term over a bound symbol appearing in exactly one joint slot
//    collapses to the marginal term;
//  - a quotient of two plain terms with identical conditioning and nested
//    joint slots becomes a conditional term.
inline int count_key_uses(const Functional& f, const std::string& key) {
    int n = 0;
    switch (f.kind()) {
        case Functional::Kind::Term:
            for (const auto* slots : {&f.joint_slots(), &f.given_slots()})
                for (const auto& s : *slots)
                    if (!s.is_literal() && std::get<SymbolRef>(s.value).key == key) ++n;
            return n;
        case Functional::Kind::Sum:
            if (f.bound().key == key) return 0;
            return count_key_uses(f.children()[0], key);
        default:
            for (const auto& c : f.children()) n += count_key_uses(c, key);
            return n;
    }
}

inline bool same_slot(const Slot& a, const Slot& b) {
    return a.variable == b.variable && a.value == b.value;
}

inline Functional simplify(const Functional& f) {
    switch (f.kind()) {
        case Functional::Kind::Constant:
        case Functional::Kind::Term:
            return f;
        case Functional::Kind::Product: {
            std::vector<Functional> ch;
            for (const auto& c : f.children()) ch.push_back(simplify(c));
            return Functional::product(std::move(ch));
        }
        case Functional::Kind::Quotient: {
            Functional num = simplify(f.children()[0]);
            Functional den = simplify(f.children()[1]);
            if (num.kind() == Functional::Kind::Term && den.kind() == Functional::Kind::Term &&
                num.given_slots() == den.given_slots()) {
                const auto& nj = num.joint_slots();
                const auto& dj = den.joint_slots();
                const auto contains = [&](const Slot& s) {
                    for (const auto& t : nj)
                        if (t.variable == s.variable && t.value == s.value) return true;
                    return false;
                };
                bool nested = true;
                for (const auto& s : dj)
                    if (!contains(s)) nested = false;
                if (nested && dj.size() < nj.size()) {
                    std::vector<Slot> head;
                    for (const auto& s : nj) {
                        bool in_den = false;
                        for (const auto& t : dj)
                            if (t.variable == s.variable && t.value == s.value) in_den = true;
                        if (!in_den) head.push_back(s);
                    }
                    std::vector<Slot> given = dj;
                    for (const auto& s : num.given_slots()) given.push_back(s);
                    return Functional::term(std::move(head), std::move(given));
                }
            }
            return Functional::quotient(std::move(num), std::move(den));
        }
        case Functional::Kind::Sum: {
            Functional body = simplify(f.children()[0]);
            if (body.kind() == Functional::Kind::Term && count_key_uses(body, f.bound().key) == 1) {
                bool in_joint_only = true;
                for (const auto& s : body.given_slots())
                    if (!s.is_literal() && std::get<SymbolRef>(s.value).key == f.bound().key)
                        in_joint_only = false;
                if (in_joint_only) {
                    std::vector<Slot> joint;
                    for (const auto& s : body.joint_slots())
                        if (s.is_literal() || std::get<SymbolRef>(s.value).key != f.bound().key)
                            joint.push_back(s);
                    return Functional::term(std::move(joint), body.given_slots());
                }
            }
            return Functional::sum(f.bound(), f.domain_variable(), std::move(body));
        }
    }
    return f;
}

// Symbol factory with deterministic tick-marked displays (l1, l1', ...).
class SymbolPool {
public:
    SymbolRef fresh(const std::string& coordinate) {
        const std::string base = lowercase(coordinate);
        const int uses = uses_[base]++;
        SymbolRef ref;
        ref.key = coordinate + "#" + std::to_string(counter_++);
        ref.display = base + std::string(static_cast<std::size_t>(uses), '\'');
        return ref;
    }

private:
    int counter_ = 0;
    std::map<std::string, int> uses_;
};

using ContextValue = std::variant<int, SymbolRef>;
using Context = std::map<std::string, ContextValue>;

// Symbolic sequential fixing. Maintains the identified propensity of every
// fixed indicator and can express the current derived law's unnormalized
// mass at any assignment of its observable coordinates (all proxies and
// observed vertices plus the still-unfixed indicators) purely in terms of
// the original observed law.
class SequentialFixer {
public:
    explicit SequentialFixer(const MDag& g) : g_(g) {
        for (const auto& v : g.proxies()) base_coords_.push_back(v);
        for (const auto& v : g.observed_vertices()) base_coords_.push_back(v);
        std::sort(base_coords_.begin(), base_coords_.end());
        unfixed_ = g.indicators();
    }

    // Attempts to fix all indicators; false when some indicator's propensity
    // never becomes expressible (an unobserved parent, or a counterfactual
    // parent whose own indicator cannot be fixed first).
    bool run() {
        while (!unfixed_.empty()) {
            bool progressed = false;
            for (const auto& r : unfixed_) {
                if (!expressible(r)) continue;
                fix(r);
                progressed = true;
                break;
            }
            if (!progressed) return false;
        }
        return true;
    }

    const std::vector<std::string>& fixing_order() const { return fixed_order_; }

    SelectionModel selection() const {
        SelectionModel s;
        for (const auto& [r, f] : propensity_) s.propensity.emplace(r, f);
        return s;
    }

    // The derived law after fixing everything, evaluated at proxies bound to
    // their counterfactual's symbol and observed vertices bound to their own:
    // this is the identified full target over counterfactuals and observed
    // vertices.
    Functional full_target() const {
        Context context;
        for (const auto& pair : g_.pairs())
            context.emplace(pair.proxy,
                            SymbolRef{pair.counterfactual, lowercase(pair.proxy)});
        for (const auto& v : g_.observed_vertices())
            context.emplace(v, SymbolRef{v, lowercase(v)});
        return simplify(mass(context));
    }

private:
    // Coordinates of the current derived observable margin.
    std::vector<std::string> coordinates() const {
        std::vector<std::string> coords = base_coords_;
        coords.insert(coords.end(), unfixed_.begin(), unfixed_.end());
        std::sort(coords.begin(), coords.end());
        return coords;
    }

    bool expressible(const std::string& r) const {
        for (const auto& p : g_.digraph().parents(r)) {
            switch (g_.kind(p)) {
                case VertexKind::Unobserved: return false;
                case VertexKind::Counterfactual: {
                    const ProxyPair* pair = g_.pair_of_counterfactual(p);
                    if (!pair || !fixed_set_.count(pair->indicator)) return false;
                    break;
                }
                default: break;
            }
        }
        return true;
    }

    // Unnormalized derived mass at the assignment in `context` (one entry
    // per observable coordinate): the observed joint with every fixed
    // indicator substituted at 1, divided by the fixed propensities.
    Functional mass(const Context& context) const {
        std::vector<Slot> slots;
        for (const auto& [coord, value] : context) slots.push_back(Slot{coord, value});
        for (const auto& r : fixed_order_) slots.push_back(Slot{r, 1});
        Functional numerator = Functional::term(std::move(slots));
        if (fixed_order_.empty()) return numerator;

        std::vector<Functional> weights;
        for (const auto& r : fixed_order_) {
            std::map<std::string, std::variant<int, SymbolRef>> repl;
            for (const auto& key : propensity_.at(r).free_keys()) {
                if (g_.has_vertex(key) && g_.kind(key) == VertexKind::Indicator &&
                    fixed_set_.count(key)) {
                    repl.emplace(key, 1);
                    continue;
                }
                const std::string coord = coordinate_of(key);
                repl.emplace(key, context.at(coord));
            }
            weights.push_back(propensity_.at(r).substituted(repl));
        }
        return Functional::quotient(std::move(numerator), Functional::product(std::move(weights)));
    }

    // The observable coordinate carrying a vertex's value in the derived
    // law: a counterfactual whose indicator is fixed lives on its proxy.
    std::string coordinate_of(const std::string& vertex) const {
        if (g_.kind(vertex) == VertexKind::Counterfactual)
            return g_.pair_of_counterfactual(vertex)->proxy;
        return vertex;
    }

    void fix(const std::string& r) {
        // Conditioning coordinates keep the parent vertex name as symbol key.
        Context cond;
        std::set<std::string> cond_coords;
        for (const auto& p : g_.digraph().parents(r)) {
            if (g_.kind(p) == VertexKind::Indicator && fixed_set_.count(p)) continue;
            const std::string coord = coordinate_of(p);
            cond_coords.insert(coord);
            // Prefer the counterfactual's name as the key when both it and
            // its proxy condition on the same coordinate.
            if (!cond.count(coord) || g_.kind(p) == VertexKind::Counterfactual)
                cond[coord] = SymbolRef{p, lowercase(coord)};
        }

        const auto coords = coordinates();
        const auto build_marginal = [&](bool pin_r) {
            Context context;
            std::vector<SymbolRef> bounds;
            std::vector<std::string> bound_domains;
            for (const auto& c : coords) {
                if (cond_coords.count(c)) {
                    context[c] = cond.at(c);
                } else if (c == r && pin_r) {
                    context[c] = 1;
                } else {
                    SymbolRef b = pool_.fresh(c);
                    context[c] = b;
                    bounds.push_back(b);
                    bound_domains.push_back(c);
                }
            }
            Functional body = mass(context);
            for (std::size_t i = bounds.size(); i-- > 0;)
                body = Functional::sum(bounds[i], bound_domains[i], std::move(body));
            return body;
        };

        Functional num = build_marginal(true);
        Functional den = build_marginal(false);
        propensity_.emplace(r, simplify(Functional::quotient(std::move(num), std::move(den))));

        fixed_order_.push_back(r);
        fixed_set_.insert(r);
        unfixed_.erase(std::find(unfixed_.begin(), unfixed_.end(), r));
    }

    const MDag& g_;
    std::vector<std::string> base_coords_;
    std::vector<std::string> unfixed_;
    std::vector<std::string> fixed_order_;
    std::set<std::string> fixed_set_;
    std::map<std::string, Functional> propensity_;
    SymbolPool pool_;
};

// Propensity expression for reconstruction: p(R=1 | parents), with each
// counterfactual parent read off its proxy under that proxy's indicator
// substituted at 1. Valid under the mcar/mar/parallel strategy tests.
inline Functional parentwise_propensity(const MDag& g, const std::string& indicator) {
    std::vector<Slot> given;
    std::set<std::string> pinned;
    for (const auto& p : g.digraph().parents(indicator)) {
        if (g.kind(p) == VertexKind::Counterfactual) {
            const ProxyPair* pair = g.pair_of_counterfactual(p);
            given.push_back(Slot{pair->proxy, SymbolRef{p, lowercase(pair->proxy)}});
            pinned.insert(pair->indicator);
        } else {
            given.push_back(Slot{p, SymbolRef{p, lowercase(p)}});
        }
    }
    for (const auto& r : pinned) given.push_back(Slot{r, 1});
    return Functional::term({Slot{indicator, 1}}, std::move(given));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Target-law identification
// ---------------------------------------------------------------------------

// Strategy search in a fixed order: joint independence of the indicators
// from the counterfactuals (mcar), the same given the fully observed
// vertices (mar), sequential fixing, then parallel fixing. Identified
// reports carry the functional over counterfactuals (plus observed vertices
// when requested) and the per-indicator selection model; graphs that fail
// every strategy stay unknown unless the counterexample search certifies
// non-identification within its budget.
inline IdReport identify_target_law(const MDag& g, const IdOptions& options = {}) {
    {
        const auto violations = validate(g);
        if (!violations.empty())
            throw std::invalid_argument("identify_target_law requires a valid m-DAG: " +
                                        violations.front().rule + " (" + violations.front().detail +
                                        ")");
    }

    IdReport report;
    report.includes_observed = options.include_observed;
    report.self_censoring = screen_self_censoring(g);
    report.npi = is_permutation_pattern(g);

    const auto cf = detail::as_set(g.counterfactuals());
    const auto inds = detail::as_set(g.indicators());
    const auto obs = detail::as_set(g.observed_vertices());

    if (!report.self_censoring.empty()) {
        report.verdict = Verdict::NotIdentified;
        report.strategy = "self-censoring";
        CertifyOptions copts;
        copts.seed = options.certify_seed;
        report.certificate = certify_non_id(g, std::max(options.certify_budget, 1), copts);
        return report;
    }

    detail::SymbolPool pool;
    const auto cf_ref = [&](const ProxyPair& pair) {
        return Slot{pair.proxy, SymbolRef{pair.counterfactual, lowercase(pair.proxy)}};
    };
    const auto obs_ref = [&](const std::string& v) {
        return Slot{v, SymbolRef{v, lowercase(v)}};
    };

    // Sum a functional over every observed vertex (counterfactual-only view).
    const auto sum_out_observed = [&](Functional f) {
        for (const auto& v : g.observed_vertices()) {
            SymbolRef b = pool.fresh(v);
            f = Functional::sum(b, v, f.substituted({{v, b}}));
        }
        return detail::simplify(f);
    };

    const auto finish_identified = [&](const std::string& strategy, Functional full,
                                       SelectionModel selection) {
        report.verdict = Verdict::Identified;
        report.strategy = strategy;
        report.selection = std::move(selection);
        report.functional = options.include_observed ? detail::simplify(std::move(full))
                                                     : sum_out_observed(std::move(full));
        report.testable = !report.npi;
        return report;
    };

    const auto parentwise_selection = [&] {
        SelectionModel s;
        for (const auto& r : g.indicators())
            s.propensity.emplace(r, detail::parentwise_propensity(g, r));
        return s;
    };

    // mcar: all indicators jointly independent of every counterfactual (and,
    // for the joint target, of the observed vertices too).
    {
        std::set<std::string> other = cf;
        if (options.include_observed) other.insert(obs.begin(), obs.end());
        if (other.empty() || d_separated(g, inds, other, {})) {
            std::vector<Slot> joint;
            for (const auto& pair : g.pairs()) joint.push_back(cf_ref(pair));
            if (options.include_observed)
                for (const auto& v : g.observed_vertices()) joint.push_back(obs_ref(v));
            std::vector<Slot> given;
            for (const auto& r : g.indicators()) given.push_back(Slot{r, 1});
            Functional f = joint.empty() ? Functional::constant(1.0)
                                         : Functional::term(std::move(joint), std::move(given));
            return finish_identified("mcar", std::move(f), parentwise_selection());
        }
    }

    // mar: conditional independence given the fully observed vertices.
    if (!obs.empty() && d_separated(g, inds, cf, obs)) {
        std::vector<Slot> proxies, given, margin;
        for (const auto& pair : g.pairs()) proxies.push_back(cf_ref(pair));
        for (const auto& v : g.observed_vertices()) {
            given.push_back(obs_ref(v));
            margin.push_back(obs_ref(v));
        }
        for (const auto& r : g.indicators()) given.push_back(Slot{r, 1});
        Functional f = Functional::product(
            {Functional::term(std::move(margin)),
             Functional::term(std::move(proxies), std::move(given))});
        return finish_identified("mar", std::move(f), parentwise_selection());
    }

    // sequential fixing: peel indicators whose propensity is expressible
    // over the current derived law.
    {
        detail::SequentialFixer fixer(g);
        if (fixer.run())
            return finish_identified("sequential-fixing", fixer.full_target(), fixer.selection());
    }

    // parallel fixing: every indicator independent of its own counterfactual
    // and the other indicators given the other counterfactuals (and the
    // observed vertices).
    {
        bool all_hold = !g.pairs().empty();
        for (const auto& pair : g.pairs()) {
            std::set<std::string> a{pair.indicator};
            std::set<std::string> b{pair.counterfactual};
            for (const auto& r : g.indicators())
                if (r != pair.indicator) b.insert(r);
            std::set<std::string> z = obs;
            for (const auto& c : g.counterfactuals())
                if (c != pair.counterfactual) z.insert(c);
            if (!d_separated(g, a, b, z)) {
                all_hold = false;
                break;
            }
        }
        if (all_hold) {
            std::vector<Slot> joint;
            for (const auto& pair : g.pairs()) joint.push_back(cf_ref(pair));
            for (const auto& v : g.observed_vertices()) joint.push_back(obs_ref(v));
            for (const auto& r : g.indicators()) joint.push_back(Slot{r, 1});

            std::vector<Functional> weights;
            for (const auto& pair : g.pairs()) {
                std::vector<Slot> given;
                for (const auto& other : g.pairs())
                    if (other.proxy != pair.proxy) {
                        given.push_back(cf_ref(other));
                        given.push_back(Slot{other.indicator, 1});
                    }
                for (const auto& v : g.observed_vertices()) given.push_back(obs_ref(v));
                weights.push_back(Functional::term({Slot{pair.indicator, 1}}, std::move(given)));
            }
            Functional f = Functional::quotient(Functional::term(std::move(joint)),
                                                Functional::product(std::move(weights)));
            return finish_identified("parallel-fixing", std::move(f), parentwise_selection());
        }
    }

    // Everything failed: optionally escalate to not-identified by searching
    // for a counterexample certificate.
    if (options.certify_budget > 0) {
        CertifyOptions copts;
        copts.seed = options.certify_seed;
        if (auto cert = certify_non_id(g, options.certify_budget, copts)) {
            report.verdict = Verdict::NotIdentified;
            report.strategy = "counterexample-search";
            report.certificate = std::move(cert);
            return report;
        }
    }
    report.verdict = Verdict::Unknown;
    report.strategy = "exhausted";
    return report;
}

// Marginal wrapper: the identified joint summed onto one counterfactual.
inline IdReport identify_marginal(const MDag& g, const std::string& counterfactual,
                                  const IdOptions& options = {}) {
    if (!g.has_vertex(counterfactual) || g.kind(counterfactual) != VertexKind::Counterfactual)
        throw std::invalid_argument("identify_marginal expects a counterfactual vertex");
    IdOptions base = options;
    base.include_observed = false;
    IdReport report = identify_target_law(g, base);
    if (report.verdict != Verdict::Identified) return report;
    detail::SymbolPool pool;
    Functional f = *report.functional;
    for (const auto& pair : g.pairs()) {
        if (pair.counterfactual == counterfactual) continue;
        SymbolRef b = pool.fresh(pair.proxy);
        f = Functional::sum(b, pair.proxy, f.substituted({{pair.counterfactual, b}}));
    }
    report.functional = detail::simplify(f);
    return report;
}

// ---------------------------------------------------------------------------
// The adjustment-style derivation transcript
// ---------------------------------------------------------------------------

struct DerivationStep {
    std::string equation;
    std::string justification;
    bool holds = true;
};

struct ResidualFlag {
    std::string term;      // rendered term containing the obstruction
    std::string variable;  // the counterfactual/unobserved vertex at fault
};

struct SwigAttempt {
    std::string target;
    std::vector<DerivationStep> steps;
    std::string final_expression;
    std::vector<ResidualFlag> residuals;
    bool success = false;
    std::optional<Functional> functional;
};

// Reproduces the conditional-ignorability derivation one would read off the
// SWIG for a single marginal: adjust for the indicator's parents together
// with the other indicators, insert the R=1 substitution, apply consistency.
// Any adjustment variable that is itself counterfactual or unobserved is
// flagged: it appears in the final expression outside an R=1 substitution,
// so the expression is not a functional of the observed law.
inline SwigAttempt sequential_swig_attempt(const MDag& g, const std::string& marginal) {
    if (!g.has_vertex(marginal)) throw std::invalid_argument("unknown vertex: " + marginal);
    if (g.kind(marginal) == VertexKind::Indicator)
        throw std::invalid_argument("marginal must not be an indicator: " + marginal);

    SwigAttempt out;
    const std::string t = lowercase(marginal);
    out.target = "p(" + t + ")";

    if (g.kind(marginal) != VertexKind::Counterfactual) {
        if (g.kind(marginal) == VertexKind::Unobserved) {
            out.steps.push_back({out.target + " = " + out.target, "unobserved vertex", false});
            out.final_expression = out.target;
            out.residuals.push_back({out.target, marginal});
            return out;
        }
        out.steps.push_back({out.target + " = " + out.target, "fully observed"});
        out.final_expression = out.target;
        out.success = true;
        out.functional =
            Functional::term({Slot{marginal, SymbolRef{marginal, lowercase(marginal)}}});
        return out;
    }

    const ProxyPair* pair = g.pair_of_counterfactual(marginal);
    if (!pair) throw std::invalid_argument("counterfactual has no proxy pair: " + marginal);
    const std::string& rv = pair->indicator;

    std::set<std::string> w_set;
    for (const auto& p : g.digraph().parents(rv)) w_set.insert(p);
    for (const auto& r : g.indicators()) w_set.insert(r);
    w_set.erase(rv);
    w_set.erase(marginal);
    const std::vector<std::string> w(w_set.begin(), w_set.end());

    const bool ignorable = d_separated(g, {marginal}, {rv}, w_set);

    const auto sums = [&] {
        std::string s;
        for (const auto& v : w) s += "sum_{" + lowercase(v) + "} ";
        return s;
    };
    const auto list_of = [&](const std::vector<std::string>& names, bool with_pin) {
        std::string s;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i) s += ", ";
            s += lowercase(names[i]);
        }
        if (with_pin) s += (names.empty() ? "" : ", ") + rv + "=1";
        return s;
    };

    std::vector<std::string> w_and_t = w;
    w_and_t.push_back(marginal);
    std::sort(w_and_t.begin(), w_and_t.end());

    std::string ignor_text = "ignorability from the R=1 template: " + marginal + " _||_ " + rv;
    if (!w.empty()) ignor_text += " | " + list_of(w, false);
    if (!ignorable) ignor_text += " (does NOT hold in the graph)";

    const std::string weight = w.empty() ? "" : "p(" + list_of(w, false) + ") * ";
    const auto push_step = [&](std::string rhs, std::string justification, bool holds = true) {
        const std::string lead = out.steps.empty() ? out.target + " = " : "= ";
        out.steps.push_back({lead + rhs, std::move(justification), holds});
        out.final_expression = std::move(rhs);
    };
    const auto wrap = [&](const std::string& body) {
        return w.empty() ? body : sums() + "(" + body + ")";
    };
    if (!w.empty()) {
        push_step(wrap("p(" + list_of(w_and_t, false) + ")"), "law of total probability");
        push_step(wrap(weight + "p(" + t + " | " + list_of(w, false) + ")"), "chain rule");
    }
    push_step(wrap(weight + "p(" + t + " | " + list_of(w, true) + ")"), ignor_text, ignorable);
    push_step(wrap(weight + "p(" + lowercase(pair->proxy) + " | " + list_of(w, true) + ")"),
              "consistency: " + pair->proxy + " = " + marginal + " when " + rv + " = 1");

    for (const auto& v : w) {
        const VertexKind k = g.kind(v);
        if (k != VertexKind::Counterfactual && k != VertexKind::Unobserved) continue;
        if (!w.empty())
            out.residuals.push_back({"p(" + list_of(w, false) + ")", v});
        out.residuals.push_back(
            {"p(" + lowercase(pair->proxy) + " | " + list_of(w, true) + ")", v});
    }
    if (!ignorable && out.residuals.empty())
        out.residuals.push_back(
            {"p(" + lowercase(pair->proxy) + " | " + list_of(w, true) + ")", marginal});

    out.success = ignorable && out.residuals.empty();
    if (out.success) {
        std::vector<Slot> given;
        std::vector<SymbolRef> bounds;
        std::vector<Slot> weight_slots;
        detail::SymbolPool pool;
        for (const auto& v : w) {
            SymbolRef b = pool.fresh(v);
            bounds.push_back(b);
            given.push_back(Slot{v, b});
            weight_slots.push_back(Slot{v, b});
        }
        given.push_back(Slot{rv, 1});
        Functional body = Functional::term(
            {Slot{pair->proxy, SymbolRef{marginal, lowercase(pair->proxy)}}}, std::move(given));
        if (!w.empty())
            body = Functional::product({Functional::term(std::move(weight_slots)), std::move(body)});
        for (std::size_t i = bounds.size(); i-- > 0;)
            body = Functional::sum(bounds[i], w[i], std::move(body));
        out.functional = detail::simplify(body);
    }
    return out;
}

}  // namespace mdag
