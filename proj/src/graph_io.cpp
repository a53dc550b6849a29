#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cdnots/graph.hpp"

namespace cdnots {

using nlohmann::json;

namespace {

json node_json(const LaggedNode& n) {
    if (n.is_time()) return json{{"var", "T"}};
    return json{{"var", n.var}, {"lag", n.lag}};
}

LaggedNode node_from_json(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("var")) throw std::runtime_error("graph json: " + path + ": expected {\"var\", \"lag\"}");
    const json& v = j.at("var");
    if (v.is_string()) {
        if (v.get<std::string>() != "T") throw std::runtime_error("graph json: " + path + ".var: expected index or \"T\"");
        return LaggedNode::time();
    }
    if (!v.is_number_integer()) throw std::runtime_error("graph json: " + path + ".var: expected integer");
    if (!j.contains("lag") || !j.at("lag").is_number_integer()) {
        throw std::runtime_error("graph json: " + path + ".lag: expected integer");
    }
    return LaggedNode::variable(v.get<int>(), j.at("lag").get<int>());
}

std::string dot_id(const MixedGraph& g, const LaggedNode& n) {
    if (n.is_time()) return "T";
    std::string label = g.label(n);
    std::string out = "\"";
    for (char c : label) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string to_json(const MixedGraph& g) {
    json edges = json::array();
    for (const auto& e : g.summary_edges()) {
        edges.push_back({{"from", node_json(e.from)},
                         {"to", node_json(e.to)},
                         {"mark", e.directed ? "directed" : "undirected"},
                         {"max_p", e.max_p}});
    }
    json doc{{"n_vars", g.n_vars()}, {"max_lag", g.max_lag()}, {"names", g.names()}, {"edges", edges}};
    return doc.dump(2) + "\n";
}

MixedGraph graph_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("graph json: ") + e.what());
    }
    auto need = [&](const char* key) -> const json& {
        if (!doc.is_object() || !doc.contains(key)) throw std::runtime_error(std::string("graph json: missing /") + key);
        return doc.at(key);
    };
    const json& nv = need("n_vars");
    const json& ml = need("max_lag");
    const json& names = need("names");
    const json& edges = need("edges");
    if (!nv.is_number_integer()) throw std::runtime_error("graph json: /n_vars: expected integer");
    if (!ml.is_number_integer()) throw std::runtime_error("graph json: /max_lag: expected integer");
    if (!names.is_array()) throw std::runtime_error("graph json: /names: expected array");
    if (!edges.is_array()) throw std::runtime_error("graph json: /edges: expected array");

    std::vector<std::string> name_list;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!names[i].is_string()) throw std::runtime_error("graph json: /names/" + std::to_string(i) + ": expected string");
        name_list.push_back(names[i].get<std::string>());
    }
    std::vector<WindowEdge> list;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string path = "/edges/" + std::to_string(i);
        const json& e = edges[i];
        if (!e.is_object() || !e.contains("from") || !e.contains("to") || !e.contains("mark")) {
            throw std::runtime_error("graph json: " + path + ": expected from, to, mark");
        }
        WindowEdge w;
        w.from = node_from_json(e.at("from"), path + "/from");
        w.to = node_from_json(e.at("to"), path + "/to");
        const json& mark = e.at("mark");
        if (mark == "directed") {
            w.directed = true;
        } else if (mark != "undirected") {
            throw std::runtime_error("graph json: " + path + "/mark: expected \"directed\" or \"undirected\"");
        }
        if (e.contains("max_p")) {
            if (!e.at("max_p").is_number()) throw std::runtime_error("graph json: " + path + "/max_p: expected number");
            w.max_p = e.at("max_p").get<double>();
        }
        list.push_back(w);
    }
    return MixedGraph::from_edges(nv.get<int>(), ml.get<int>(), std::move(name_list), list);
}

std::string_view p_value_color(double p) {
    if (p <= 0.01) return "black";
    if (p <= 0.05) return "orange";
    return "red";
}

std::string to_dot(const MixedGraph& g) {
    std::ostringstream os;
    os << "digraph cdnots {\n  rankdir=LR;\n";
    for (const auto& n : g.nodes()) {
        os << "  " << dot_id(g, n);
        if (n.is_time()) os << " [shape=box]";
        os << ";\n";
    }
    for (const auto& e : g.window_edges()) {
        os << "  " << dot_id(g, e.from) << " -> " << dot_id(g, e.to) << " [color=" << p_value_color(e.max_p);
        if (!e.directed) os << ", dir=none";
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace cdnots
