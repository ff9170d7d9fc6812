#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdag/certify.hpp"
#include "mdag/engine.hpp"
#include "mdag/graph.hpp"
#include "mdag/law.hpp"

namespace mdag {

// Input problems carry enough location detail to act on: either a JSON
// syntax position (line/column) or the offending field path.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

namespace json_detail {

using nlohmann::json;

inline json parse_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::ostringstream os;
        os << source << ":" << line << ":" << column << ": " << e.what();
        throw parse_error(os.str());
    }
}

inline const json& field(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw parse_error(where + ": missing field \"" + key + "\"");
    return j.at(key);
}

}  // namespace json_detail

// ---------------------------------------------------------------------------
// Graph JSON
//   {"vertices":[{"name":str,"kind":str,"cardinality":int}],
//    "edges":[[from,to]],
//    "pairs":[{"proxy":str,"counterfactual":str,"indicator":str}]}
// ---------------------------------------------------------------------------

inline MDag graph_from_json(const nlohmann::json& j, const std::string& source = "graph") {
    using json_detail::field;
    MDag g;
    if (!j.is_object()) throw parse_error(source + ": top level must be an object");
    const auto& vertices = field(j, "vertices", source);
    if (!vertices.is_array()) throw parse_error(source + ".vertices: must be an array");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const std::string where = source + ".vertices[" + std::to_string(i) + "]";
        const auto& v = vertices[i];
        const std::string name = field(v, "name", where).get<std::string>();
        const std::string kind_text = field(v, "kind", where).get<std::string>();
        const auto kind = vertex_kind_from(kind_text);
        if (!kind) throw parse_error(where + ".kind: unknown kind \"" + kind_text + "\"");
        const int card = v.contains("cardinality") ? v.at("cardinality").get<int>() : 2;
        if (card < 2) throw parse_error(where + ".cardinality: must be at least 2");
        try {
            g.add_vertex(name, *kind, card);
        } catch (const std::invalid_argument& e) {
            throw parse_error(where + ": " + e.what());
        }
    }
    const auto& edges = field(j, "edges", source);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string where = source + ".edges[" + std::to_string(i) + "]";
        const auto& e = edges[i];
        if (!e.is_array() || e.size() != 2) throw parse_error(where + ": expected [from, to]");
        try {
            g.add_edge(e[0].get<std::string>(), e[1].get<std::string>());
        } catch (const std::invalid_argument& ex) {
            throw parse_error(where + ": " + ex.what());
        }
    }
    if (j.contains("pairs")) {
        const auto& pairs = j.at("pairs");
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const std::string where = source + ".pairs[" + std::to_string(i) + "]";
            const auto& p = pairs[i];
            g.add_pair(json_detail::field(p, "proxy", where).get<std::string>(),
                       json_detail::field(p, "counterfactual", where).get<std::string>(),
                       json_detail::field(p, "indicator", where).get<std::string>());
        }
    }
    return g;
}

inline MDag graph_from_json_text(const std::string& text, const std::string& source = "graph") {
    return graph_from_json(json_detail::parse_text(text, source), source);
}

inline nlohmann::json graph_to_json(const MDag& g) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (const auto& v : g.digraph().vertices())
        j["vertices"].push_back({{"name", v},
                                 {"kind", to_string(g.kind(v))},
                                 {"cardinality", g.declared_cardinality(v)}});
    j["edges"] = nlohmann::json::array();
    for (const auto& [from, to] : g.digraph().edges()) j["edges"].push_back({from, to});
    j["pairs"] = nlohmann::json::array();
    for (const auto& p : g.pairs())
        j["pairs"].push_back({{"proxy", p.proxy},
                              {"counterfactual", p.counterfactual},
                              {"indicator", p.indicator}});
    return j;
}

// ---------------------------------------------------------------------------
// Law JSON
//   {"graph": <graph JSON>, "tables": {vertex: {"<parent config>": [p, ...]}}}
// Parent configs are "name=value" pairs joined by ";" in lexicographic name
// order ("" for root vertices); a proxy's missing symbol renders as "?".
// ---------------------------------------------------------------------------

namespace json_detail {

inline std::string value_text(const MDag& g, const StateSpace& space, const std::string& vertex,
                              int value) {
    if (g.kind(vertex) == VertexKind::Proxy && value == space.missing_value(vertex))
        return Distribution::kMissingText;
    return std::to_string(value);
}

inline int value_from_text(const MDag& g, const StateSpace& space, const std::string& vertex,
                           const std::string& text, const std::string& where) {
    if (text == Distribution::kMissingText) {
        if (g.kind(vertex) != VertexKind::Proxy)
            throw parse_error(where + ": missing symbol on non-proxy vertex " + vertex);
        return space.missing_value(vertex);
    }
    try {
        return std::stoi(text);
    } catch (...) {
        throw parse_error(where + ": bad value \"" + text + "\" for " + vertex);
    }
}

inline std::string row_key(const MDag& g, const StateSpace& space, const Cpt& cpt, int row) {
    std::map<std::string, std::string> assignment;
    int rem = row;
    for (std::size_t i = cpt.parents.size(); i-- > 0;) {
        assignment[cpt.parents[i]] =
            value_text(g, space, cpt.parents[i], rem % cpt.parent_cards[i]);
        rem /= cpt.parent_cards[i];
    }
    return config_string(assignment);
}

}  // namespace json_detail

inline nlohmann::json law_to_json(const DiscreteLaw& law) {
    nlohmann::json j;
    j["graph"] = graph_to_json(law.graph());
    j["tables"] = nlohmann::json::object();
    const MDag& g = law.graph();
    for (const auto& v : g.digraph().vertices()) {
        const Cpt& cpt = law.table(v);
        nlohmann::json rows = nlohmann::json::object();
        for (int r = 0; r < cpt.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (int s = 0; s < cpt.card; ++s) row.push_back(cpt.at(r, s));
            rows[json_detail::row_key(g, law.space(), cpt, r)] = std::move(row);
        }
        j["tables"][v] = std::move(rows);
    }
    return j;
}

inline DiscreteLaw law_from_json(const nlohmann::json& j, const std::string& source = "law") {
    using json_detail::field;
    MDag g = graph_from_json(field(j, "graph", source), source + ".graph");
    StateSpace space = StateSpace::from_graph(g);
    DiscreteLaw law(g, space);
    const auto& tables = field(j, "tables", source);
    for (const auto& v : g.digraph().vertices()) {
        const std::string where = source + ".tables." + v;
        if (!tables.contains(v)) throw parse_error(where + ": missing table");
        Cpt cpt = detail::make_cpt_shell(g, space, v);
        for (const auto& [key, row] : tables.at(v).items()) {
            std::map<std::string, int> parent_values;
            if (!key.empty()) {
                std::istringstream ss(key);
                std::string item;
                while (std::getline(ss, item, ';')) {
                    const auto eq = item.find('=');
                    if (eq == std::string::npos)
                        throw parse_error(where + ": bad config key \"" + key + "\"");
                    const std::string name = item.substr(0, eq);
                    parent_values[name] = json_detail::value_from_text(
                        g, space, name, item.substr(eq + 1), where);
                }
            }
            if (parent_values.size() != cpt.parents.size())
                throw parse_error(where + ": config key \"" + key + "\" does not cover parents");
            const int r = cpt.row_index(parent_values);
            if (!row.is_array() || static_cast<int>(row.size()) != cpt.card)
                throw parse_error(where + ": row \"" + key + "\" needs " +
                                  std::to_string(cpt.card) + " probabilities");
            for (int s = 0; s < cpt.card; ++s) cpt.at(r, s) = row[s].get<double>();
        }
        law.set_table(std::move(cpt));
    }
    try {
        law.check_rows(1e-9);
    } catch (const std::invalid_argument& e) {
        throw parse_error(source + ": " + e.what());
    }
    return law;
}

inline DiscreteLaw law_from_json_text(const std::string& text, const std::string& source = "law") {
    return law_from_json(json_detail::parse_text(text, source), source);
}

// ---------------------------------------------------------------------------
// Report JSON
// ---------------------------------------------------------------------------

inline nlohmann::json id_report_to_json(const IdReport& report) {
    nlohmann::json j;
    j["verdict"] = to_string(report.verdict);
    j["strategy"] = report.strategy;
    if (report.functional) {
        j["functional_ascii"] = report.functional->to_ascii();
        j["functional_latex"] = report.functional->to_latex();
    }
    if (report.certificate) {
        j["certificate"] = {{"law_a", law_to_json(report.certificate->law_a)},
                            {"law_b", law_to_json(report.certificate->law_b)},
                            {"observed_tv", report.certificate->observed_tv},
                            {"target_tv", report.certificate->target_tv},
                            {"method", report.certificate->method}};
    }
    j["testable"] = report.testable;
    j["npi"] = report.npi;
    return j;
}

}  // namespace mdag
