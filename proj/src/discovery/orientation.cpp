#include <algorithm>

#include "cdnots/discovery.hpp"
#include "window_pdag.hpp"

namespace cdnots {

namespace detail {

std::vector<std::pair<LaggedNode, LaggedNode>> class_replicas(const MixedGraph& g, const EdgeKey& key) {
    std::vector<std::pair<LaggedNode, LaggedNode>> out;
    if (key.first.is_time()) {
        for (int l = 0; l <= g.max_lag(); ++l) out.emplace_back(key.first, LaggedNode::variable(key.second.var, l));
    } else {
        for (int m = 0; m + key.first.lag <= g.max_lag(); ++m) {
            out.emplace_back(LaggedNode::variable(key.first.var, key.first.lag + m),
                             LaggedNode::variable(key.second.var, m));
        }
    }
    return out;
}

WindowPdag::WindowPdag(MixedGraph& g) : g_(g), nodes_(g.nodes()), pdag_(static_cast<int>(nodes_.size())) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i]] = static_cast<int>(i);
    for (const auto& e : g.window_edges()) {
        if (e.directed) {
            pdag_.add_directed(index(e.from), index(e.to));
        } else {
            pdag_.add_undirected(index(e.from), index(e.to));
        }
    }
}

bool WindowPdag::orient_class(int a, int b) {
    const ClassRef ref = g_.classify(node(a), node(b));
    const auto em = g_.edge(ref.key);
    if (!em || em->mark != Mark::Undirected) return false;
    const Mark mark = ref.u_is_first ? Mark::Forward : Mark::Backward;
    if (mark == Mark::Backward && (ref.key.first.is_time() || ref.key.first.lag > 0)) return false;

    orient::Pdag trial = pdag_;
    std::vector<std::pair<int, int>> arcs;
    for (const auto& [f, s] : class_replicas(g_, ref.key)) {
        const int fi = index(f);
        const int si = index(s);
        arcs.emplace_back(mark == Mark::Forward ? std::pair{fi, si} : std::pair{si, fi});
        trial.orient(arcs.back().first, arcs.back().second);
    }
    for (const auto& [from, to] : arcs) {
        if (trial.has_directed_path(to, from)) return false;
    }
    pdag_ = std::move(trial);
    g_.set_edge(ref.key, {mark, em->max_p});
    return true;
}

}  // namespace detail

MixedGraph orient_stage3(MixedGraph g, const SepsetRecord& sepsets, TestLog* log) {
    for (const auto& [key, em] : std::map<EdgeKey, EdgeMark>(g.edges())) {
        if (em.mark != Mark::Undirected) continue;
        if (key.first.is_time() || key.first.lag > 0) g.set_edge(key, {Mark::Forward, em.max_p});
    }

    detail::WindowPdag w(g);
    auto in_sepset = [&](int ia, int ib, int ic) {
        const LaggedNode a = w.node(ia);
        const LaggedNode b = w.node(ib);
        const LaggedNode c = w.node(ic);
        const ClassRef ref = g.classify(a, b);
        const auto* sep = sepsets.find(ref.key);
        if (!sep) return false;
        int shift;
        if (ref.key.first.is_time()) {
            shift = a.is_time() ? b.lag : a.lag;
        } else {
            shift = ref.u_is_first ? b.lag : a.lag;
        }
        LaggedNode shifted = c;
        if (!c.is_time()) {
            if (c.lag - shift < 0) return false;
            shifted.lag = c.lag - shift;
        }
        return std::find(sep->begin(), sep->end(), shifted) != sep->end();
    };

    std::vector<std::string> conflicts;
    orient::orient_colliders(w.pdag(), in_sepset, w.orienter(), &conflicts, [&](int i) { return w.label(i); });
    orient::apply_meek_rules(w.pdag(), w.orienter());
    if (log) {
        for (auto& c : conflicts) log->warnings.push_back(std::move(c));
    }
    return g;
}

}  // namespace cdnots
