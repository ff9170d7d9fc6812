#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdag/law.hpp"
#include "mdag/optimize.hpp"
#include "mdag/rng.hpp"

namespace mdag {

// Witness of non-identification: two full-data laws Markov to the same graph
// whose observed laws coincide while their target laws differ.
struct Certificate {
    DiscreteLaw law_a;
    DiscreteLaw law_b;
    double observed_tv = 0.0;
    double target_tv = 0.0;
    int trial = -1;
    std::string method;  // "selection-tilt" or "level-set-search"
};

struct CertifyOptions {
    std::uint64_t seed = 2026;
    double positivity_floor = 0.05;
    double observed_tolerance = 1e-9;  // observed laws must agree this closely (TV)
    double target_threshold = 1e-3;    // target laws must differ at least this much (TV)
};

namespace detail {

// Indicators whose own counterfactual points at them (the self-censoring
// edges); duplicated from engine.hpp's screen to keep this header free of
// the engine include.
inline std::vector<std::string> self_censored_indicators(const MDag& g) {
    std::vector<std::string> out;
    for (const auto& pair : g.pairs())
        if (g.digraph().has_edge(pair.counterfactual, pair.indicator)) out.push_back(pair.indicator);
    return out;
}

// Exact fiber move for a self-censored root: when the counterfactual U has
// no parents and no children besides its own indicator and proxy, the
// observed law pins only the products q(u) * q(R=1 | u, w). Shifting mass
// between two states of U and rescaling the propensity rows walks along
// that fiber, changing the target law by exactly the shifted mass.
inline std::optional<Certificate> selection_tilt(const MDag& g, const DiscreteLaw& base,
                                                 const CertifyOptions& opts) {
    for (const auto& indicator : self_censored_indicators(g)) {
        const ProxyPair* pair = g.pair_of_indicator(indicator);
        if (!pair) continue;
        const std::string& u = pair->counterfactual;
        if (!g.digraph().parents(u).empty()) continue;
        bool clean = true;
        for (const auto& c : g.digraph().children(u))
            if (c != pair->indicator && c != pair->proxy) clean = false;
        if (!clean) continue;

        const Cpt& u_cpt = base.table(u);
        const Cpt& r_cpt = base.table(indicator);
        const int u_card = u_cpt.card;
        const auto u_pos = [&]() -> int {
            for (std::size_t i = 0; i < r_cpt.parents.size(); ++i)
                if (r_cpt.parents[i] == u) return static_cast<int>(i);
            return -1;
        }();
        if (u_pos < 0) continue;

        // Largest propensity over rows sharing each U state bounds the move.
        std::vector<double> max_propensity(u_card, 0.0);
        for (int row = 0; row < r_cpt.rows(); ++row) {
            int rem = row, state = 0;
            for (std::size_t i = r_cpt.parents.size(); i-- > 0;) {
                const int v = rem % r_cpt.parent_cards[i];
                rem /= r_cpt.parent_cards[i];
                if (static_cast<int>(i) == u_pos) state = v;
            }
            max_propensity[state] = std::max(max_propensity[state], r_cpt.at(row, 1));
        }
        int source = 0;
        double slack = -1.0;
        for (int s = 0; s < u_card; ++s) {
            const double sl = u_cpt.at(0, s) * (1.0 - max_propensity[s]);
            if (sl > slack) {
                slack = sl;
                source = s;
            }
        }
        const double delta = std::min(0.5 * slack, 0.25);
        if (delta < opts.target_threshold) continue;
        const int sink = source == 0 ? 1 : 0;

        DiscreteLaw tilted = base;
        Cpt& qu = tilted.table_mut(u);
        qu.at(0, sink) += delta;
        qu.at(0, source) -= delta;
        Cpt& qr = tilted.table_mut(indicator);
        for (int row = 0; row < qr.rows(); ++row) {
            int rem = row, state = 0;
            for (std::size_t i = qr.parents.size(); i-- > 0;) {
                const int v = rem % qr.parent_cards[i];
                rem /= qr.parent_cards[i];
                if (static_cast<int>(i) == u_pos) state = v;
            }
            if (state != source && state != sink) continue;
            const double scaled = u_cpt.at(0, state) * r_cpt.at(row, 1) / qu.at(0, state);
            qr.at(row, 1) = scaled;
            qr.at(row, 0) = 1.0 - scaled;
        }
        tilted.check_rows(1e-9);

        Certificate cert{base, tilted, 0.0, 0.0, -1, "selection-tilt"};
        cert.observed_tv = observed_law(base).tv_distance(observed_law(tilted));
        cert.target_tv = target_law(base).tv_distance(target_law(tilted));
        if (cert.observed_tv <= opts.observed_tolerance && cert.target_tv >= opts.target_threshold)
            return cert;
    }
    return std::nullopt;
}

// Logit parameterization of every free (non-proxy) table row.
struct LawParams {
    std::vector<std::string> vertices;
    std::vector<int> offsets;  // per vertex, into the flat logit vector
    int size = 0;

    static LawParams layout(const MDag& g, const StateSpace& space) {
        LawParams lp;
        for (const auto& v : g.digraph().vertices()) {
            if (g.kind(v) == VertexKind::Proxy) continue;
            lp.vertices.push_back(v);
            lp.offsets.push_back(lp.size);
            int rows = 1;
            for (const auto& p : g.digraph().parents(v)) rows *= space.card.at(p);
            lp.size += rows * space.card.at(v);
        }
        return lp;
    }

    DiscreteLaw decode(const MDag& g, const StateSpace& space, const std::vector<double>& z) const {
        DiscreteLaw law(g, space);
        for (const auto& pair : g.pairs()) law.set_table(detail::proxy_cpt(g, space, pair));
        for (std::size_t vi = 0; vi < vertices.size(); ++vi) {
            Cpt cpt = detail::make_cpt_shell(g, space, vertices[vi]);
            int at = offsets[vi];
            for (int r = 0; r < cpt.rows(); ++r) {
                double total = 0.0;
                for (int s = 0; s < cpt.card; ++s) total += std::exp(z[at + s]);
                for (int s = 0; s < cpt.card; ++s) cpt.at(r, s) = std::exp(z[at + s]) / total;
                at += cpt.card;
            }
            law.set_table(std::move(cpt));
        }
        return law;
    }

    std::vector<double> encode(const DiscreteLaw& law) const {
        std::vector<double> z(static_cast<std::size_t>(size), 0.0);
        for (std::size_t vi = 0; vi < vertices.size(); ++vi) {
            const Cpt& cpt = law.table(vertices[vi]);
            int at = offsets[vi];
            for (int r = 0; r < cpt.rows(); ++r)
                for (int s = 0; s < cpt.card; ++s) z[at++] = std::log(std::max(cpt.at(r, s), 1e-12));
        }
        return z;
    }
};

}  // namespace detail

// Searches for two laws Markov to the graph whose observed laws agree within
// opts.observed_tolerance in total variation while the target laws differ by
// at least opts.target_threshold. Each trial first attempts the exact
// selection tilt, then a random restart descended onto the observed-law
// level set (squared-distance objective) with one local re-perturbation.
// Exhausting the budget proves nothing; the caller's verdict stays unknown.
inline std::optional<Certificate> certify_non_id(const MDag& g, int budget,
                                                 const CertifyOptions& opts = {}) {
    const StateSpace space = StateSpace::from_graph(g);
    if (g.counterfactuals().empty()) return std::nullopt;
    const auto params = detail::LawParams::layout(g, space);

    for (int trial = 0; trial < budget; ++trial) {
        const std::uint64_t trial_seed = opts.seed + 7919ULL * static_cast<std::uint64_t>(trial);
        const DiscreteLaw anchor = random_law(g, space, trial_seed, opts.positivity_floor);

        if (auto cert = detail::selection_tilt(g, anchor, opts)) {
            cert->trial = trial;
            return cert;
        }

        const Distribution anchor_obs = observed_law(anchor);
        const TargetLaw anchor_target = target_law(anchor);
        auto objective = [&](const std::vector<double>& z) {
            const Distribution obs = observed_law(params.decode(g, space, z));
            double sq = 0.0;
            anchor_obs.for_each([&](const std::vector<int>& cfg, double pa) {
                const double pb = obs.at(cfg);
                sq += (pa - pb) * (pa - pb);
            });
            return sq;
        };

        std::vector<double> z =
            params.encode(random_law(g, space, trial_seed ^ 0x5bd1e995ULL, opts.positivity_floor));
        DescentOptions dopts;
        dopts.max_sweeps = 120;
        coordinate_descent(z, objective, dopts);

        auto check = [&](const std::vector<double>& zz) -> std::optional<Certificate> {
            const DiscreteLaw cand = params.decode(g, space, zz);
            const double tv_obs = anchor_obs.tv_distance(observed_law(cand));
            const double tv_target = anchor_target.tv_distance(target_law(cand));
            if (tv_obs <= opts.observed_tolerance && tv_target >= opts.target_threshold)
                return Certificate{anchor, cand, tv_obs, tv_target, trial, "level-set-search"};
            return std::nullopt;
        };
        if (auto cert = check(z)) return cert;

        // One local move: nudge a coordinate, then settle back onto the
        // level set and re-test.
        RandomStream stream(trial_seed, "perturb");
        std::vector<double> z2 = z;
        if (!z2.empty()) {
            z2[stream.next_below(static_cast<int>(z2.size()))] += stream.next_bool(0.5) ? 1.0 : -1.0;
            DescentOptions d2;
            d2.max_sweeps = 60;
            coordinate_descent(z2, objective, d2);
            if (auto cert = check(z2)) return cert;
        }
    }
    return std::nullopt;
}

}  // namespace mdag
