#pragma once

// The lag window of a MixedGraph as a PDAG over concrete nodes. Orienting one
// edge orients its whole replication class, in the PDAG and in the graph.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cdnots/graph.hpp"
#include "cdnots/orient.hpp"

namespace cdnots::detail {

class WindowPdag {
public:
    explicit WindowPdag(MixedGraph& g);

    orient::Pdag& pdag() { return pdag_; }
    const LaggedNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    int index(const LaggedNode& n) const { return index_.at(n); }
    std::string label(int i) const { return g_.label(node(i)); }

    // Orients a -> b together with every replica; refuses when the class is
    // already directed, the direction is forbidden, or a cycle would appear.
    bool orient_class(int a, int b);
    orient::OrientFn orienter() {
        return [this](int a, int b) { return orient_class(a, b); };
    }

private:
    MixedGraph& g_;
    std::vector<LaggedNode> nodes_;
    std::map<LaggedNode, int> index_;
    orient::Pdag pdag_;
};

// Window copies of a class as (first-role, second-role) pairs.
std::vector<std::pair<LaggedNode, LaggedNode>> class_replicas(const MixedGraph& g, const EdgeKey& key);

}  // namespace cdnots::detail
