#include "cdnots/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace cdnots {

MixedGraph::MixedGraph(int n_vars, int max_lag, std::vector<std::string> names)
    : n_vars_(n_vars), max_lag_(max_lag), names_(std::move(names)) {
    if (n_vars < 1) throw std::invalid_argument("graph: needs at least one variable");
    if (max_lag < 0) throw std::invalid_argument("graph: max lag must be non-negative");
    if (names_.empty()) {
        for (int i = 0; i < n_vars; ++i) names_.push_back("x" + std::to_string(i));
    }
    if (static_cast<int>(names_.size()) != n_vars) throw std::invalid_argument("graph: name count mismatch");
}

std::string MixedGraph::label(const LaggedNode& node) const {
    return node_label(node, node.is_time() ? std::string() : names_.at(static_cast<std::size_t>(node.var)));
}

std::vector<LaggedNode> MixedGraph::nodes() const {
    std::vector<LaggedNode> out;
    for (int i = 0; i < n_vars_; ++i) {
        for (int l = 0; l <= max_lag_; ++l) out.push_back(LaggedNode::variable(i, l));
    }
    out.push_back(LaggedNode::time());
    return out;
}

bool MixedGraph::in_window(const LaggedNode& node) const {
    return node.is_time() || (node.var >= 0 && node.var < n_vars_ && node.lag >= 0 && node.lag <= max_lag_);
}

std::vector<EdgeKey> MixedGraph::all_keys() const {
    std::vector<EdgeKey> keys;
    for (int j = 0; j < n_vars_; ++j) {
        for (int i = 0; i < n_vars_; ++i) {
            for (int l = 0; l <= max_lag_; ++l) {
                if (l == 0 && i >= j) continue;
                keys.push_back({LaggedNode::variable(i, l), LaggedNode::variable(j, 0)});
            }
        }
    }
    for (int j = 0; j < n_vars_; ++j) keys.push_back({LaggedNode::time(), LaggedNode::variable(j, 0)});
    std::sort(keys.begin(), keys.end());
    return keys;
}

ClassRef MixedGraph::classify(const LaggedNode& u, const LaggedNode& v) const {
    if (!in_window(u) || !in_window(v)) throw std::out_of_range("graph: node outside the lag window");
    if (u == v) throw std::invalid_argument("graph: self-edges are not allowed");
    if (u.is_time()) return {{u, LaggedNode::variable(v.var, 0)}, true};
    if (v.is_time()) return {{v, LaggedNode::variable(u.var, 0)}, false};
    if (u.lag > v.lag) return {{LaggedNode::variable(u.var, u.lag - v.lag), LaggedNode::variable(v.var, 0)}, true};
    if (u.lag < v.lag) return {{LaggedNode::variable(v.var, v.lag - u.lag), LaggedNode::variable(u.var, 0)}, false};
    if (u.var < v.var) return {{LaggedNode::variable(u.var, 0), LaggedNode::variable(v.var, 0)}, true};
    return {{LaggedNode::variable(v.var, 0), LaggedNode::variable(u.var, 0)}, false};
}

void MixedGraph::check_key(const EdgeKey& key) const {
    const auto& s = key.second;
    const auto& f = key.first;
    if (s.is_time() || s.lag != 0 || s.var < 0 || s.var >= n_vars_) {
        throw std::invalid_argument("graph: edge key must end at a lag-0 variable");
    }
    if (!f.is_time()) {
        if (!in_window(f)) throw std::invalid_argument("graph: edge key starts outside the lag window");
        if (f.lag == 0 && f.var >= s.var) throw std::invalid_argument("graph: contemporaneous key not canonical");
    }
}

std::optional<EdgeMark> MixedGraph::edge(const EdgeKey& key) const {
    if (auto it = edges_.find(key); it != edges_.end()) return it->second;
    return std::nullopt;
}

void MixedGraph::set_edge(const EdgeKey& key, EdgeMark mark) {
    check_key(key);
    if (mark.mark == Mark::Backward && (key.first.is_time() || key.first.lag > 0)) {
        const std::string what = key.first.is_time() ? "into the time node" : "backwards in time";
        throw std::invalid_argument("graph: edge " + label(key.second) + " -> " + label(key.first) + " points " + what);
    }
    if (!(mark.max_p >= 0.0 && mark.max_p <= 1.0)) throw std::invalid_argument("graph: max_p outside [0, 1]");
    edges_[key] = mark;
}

void MixedGraph::remove_edge(const EdgeKey& key) { edges_.erase(key); }

bool MixedGraph::adjacent(const LaggedNode& u, const LaggedNode& v) const {
    if (u == v) return false;
    return edges_.contains(classify(u, v).key);
}

bool MixedGraph::directed(const LaggedNode& u, const LaggedNode& v) const {
    if (u == v) return false;
    const ClassRef ref = classify(u, v);
    const auto it = edges_.find(ref.key);
    if (it == edges_.end()) return false;
    return (it->second.mark == Mark::Forward && ref.u_is_first) || (it->second.mark == Mark::Backward && !ref.u_is_first);
}

bool MixedGraph::undirected(const LaggedNode& u, const LaggedNode& v) const {
    if (u == v) return false;
    const auto it = edges_.find(classify(u, v).key);
    return it != edges_.end() && it->second.mark == Mark::Undirected;
}

std::vector<LaggedNode> MixedGraph::neighbors(const LaggedNode& u) const {
    std::vector<LaggedNode> out;
    for (const auto& v : nodes()) {
        if (v != u && adjacent(u, v)) out.push_back(v);
    }
    return out;
}

std::vector<WindowEdge> MixedGraph::window_edges() const {
    std::vector<WindowEdge> out;
    for (const auto& [key, em] : edges_) {
        std::vector<std::pair<LaggedNode, LaggedNode>> copies;
        if (key.first.is_time()) {
            for (int l = 0; l <= max_lag_; ++l) copies.emplace_back(key.first, LaggedNode::variable(key.second.var, l));
        } else {
            for (int m = 0; m + key.first.lag <= max_lag_; ++m) {
                copies.emplace_back(LaggedNode::variable(key.first.var, key.first.lag + m),
                                    LaggedNode::variable(key.second.var, m));
            }
        }
        for (auto [a, b] : copies) {
            if (em.mark == Mark::Backward) std::swap(a, b);
            out.push_back({a, b, em.mark != Mark::Undirected, em.max_p});
        }
    }
    return out;
}

std::vector<SummaryEdge> MixedGraph::summary_edges() const {
    std::vector<SummaryEdge> out;
    out.reserve(edges_.size());
    for (const auto& [key, em] : edges_) {
        SummaryEdge e{key.first, key.second, key.lag(), em.mark != Mark::Undirected, em.max_p};
        if (em.mark == Mark::Backward) std::swap(e.from, e.to);
        out.push_back(e);
    }
    return out;
}

MixedGraph MixedGraph::from_edges(int n_vars, int max_lag, std::vector<std::string> names,
                                  const std::vector<WindowEdge>& edges) {
    MixedGraph g(n_vars, max_lag, std::move(names));
    std::map<EdgeKey, std::pair<LaggedNode, LaggedNode>> source;
    for (const auto& e : edges) {
        const ClassRef ref = g.classify(e.from, e.to);
        const Mark mark = !e.directed ? Mark::Undirected : (ref.u_is_first ? Mark::Forward : Mark::Backward);
        const EdgeMark em{mark, e.max_p};
        if (auto existing = g.edge(ref.key)) {
            if (existing->mark != em.mark) {
                const auto& [a, b] = source[ref.key];
                throw std::invalid_argument("graph: replication violation between " + g.label(e.from) + " - " +
                                            g.label(e.to) + " and " + g.label(a) + " - " + g.label(b));
            }
            continue;
        }
        g.set_edge(ref.key, em);
        source[ref.key] = {e.from, e.to};
    }
    return g;
}

bool MixedGraph::operator==(const MixedGraph& other) const {
    return n_vars_ == other.n_vars_ && max_lag_ == other.max_lag_ && names_ == other.names_ && edges_ == other.edges_;
}

}  // namespace cdnots
