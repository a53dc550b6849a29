#pragma once

// Lagged causal graphs over the nodes {(i, l) : i < N, l <= L} plus the
// time-index node T.
//
// Edges are stored once per replication class. A class is keyed by its
// representative (first, second) where `second` is a lag-0 variable and
// `first` is either T or a variable (i, l) with l > 0, or l == 0 and
// i < second.var. Every shifted copy (i, l + m) - (j, m) that fits in the
// window carries the same mark, so replication holds by construction.
// T - (i, 0) additionally stands for T - (i, l) at every lag.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdnots/node.hpp"

namespace cdnots {

enum class Mark {
    Undirected,
    Forward,   // first -> second
    Backward,  // second -> first (only between two lag-0 variables)
};

struct EdgeMark {
    Mark mark = Mark::Undirected;
    double max_p = 0.0;

    bool operator==(const EdgeMark&) const = default;
};

struct EdgeKey {
    LaggedNode first;
    LaggedNode second;

    int lag() const { return first.is_time() ? 0 : first.lag; }
    auto operator<=>(const EdgeKey&) const = default;
};

// How a concrete pair of window nodes maps onto its class.
struct ClassRef {
    EdgeKey key;
    bool u_is_first = true;  // the first argument plays the role of key.first
};

// An edge between two concrete window nodes; `directed` means from -> to.
struct WindowEdge {
    LaggedNode from;
    LaggedNode to;
    bool directed = false;
    double max_p = 0.0;
};

struct SummaryEdge {
    LaggedNode from;  // cause when directed, key.first otherwise
    LaggedNode to;
    int lag = 0;
    bool directed = false;
    double max_p = 0.0;
};

class MixedGraph {
public:
    MixedGraph(int n_vars, int max_lag, std::vector<std::string> names = {});

    // Builds from arbitrary window edges; replicas of one class must agree.
    static MixedGraph from_edges(int n_vars, int max_lag, std::vector<std::string> names,
                                 const std::vector<WindowEdge>& edges);

    int n_vars() const { return n_vars_; }
    int max_lag() const { return max_lag_; }
    const std::vector<std::string>& names() const { return names_; }
    std::string label(const LaggedNode& node) const;

    // All window nodes, variable-major, T last.
    std::vector<LaggedNode> nodes() const;
    bool in_window(const LaggedNode& node) const;

    // Every replication class that fits the (N, L) window.
    std::vector<EdgeKey> all_keys() const;
    ClassRef classify(const LaggedNode& u, const LaggedNode& v) const;

    const std::map<EdgeKey, EdgeMark>& edges() const { return edges_; }
    std::optional<EdgeMark> edge(const EdgeKey& key) const;
    void set_edge(const EdgeKey& key, EdgeMark mark);
    void remove_edge(const EdgeKey& key);
    bool empty() const { return edges_.empty(); }

    bool adjacent(const LaggedNode& u, const LaggedNode& v) const;
    // u -> v present
    bool directed(const LaggedNode& u, const LaggedNode& v) const;
    bool undirected(const LaggedNode& u, const LaggedNode& v) const;
    std::vector<LaggedNode> neighbors(const LaggedNode& u) const;

    // Concrete edges between window nodes, representatives and replicas.
    std::vector<WindowEdge> window_edges() const;

    // One entry per class.
    std::vector<SummaryEdge> summary_edges() const;

    bool operator==(const MixedGraph& other) const;

private:
    void check_key(const EdgeKey& key) const;

    int n_vars_;
    int max_lag_;
    std::vector<std::string> names_;
    std::map<EdgeKey, EdgeMark> edges_;
};

std::string to_json(const MixedGraph& g);
MixedGraph graph_from_json(const std::string& text);
std::string to_dot(const MixedGraph& g);

// DOT colour for an edge's skeleton p-value: <= 0.01, <= 0.05, above.
std::string_view p_value_color(double p);

}  // namespace cdnots
