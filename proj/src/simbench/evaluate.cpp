#include <set>
#include <stdexcept>

#include "cdnots/simbench.hpp"

namespace cdnots {

double f_score(double precision, double recall) {
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

EvalMetrics evaluate(const MixedGraph& truth, const MixedGraph& estimate) {
    if (truth.n_vars() != estimate.n_vars() || truth.max_lag() != estimate.max_lag()) {
        throw std::invalid_argument("evaluate: graphs differ in variables or max lag");
    }
    EvalMetrics m;
    std::set<EdgeKey> keys;
    for (const auto& [k, e] : truth.edges()) keys.insert(k);
    for (const auto& [k, e] : estimate.edges()) keys.insert(k);
    for (const auto& k : keys) {
        const auto t = truth.edge(k);
        const auto e = estimate.edge(k);
        if (t && e) {
            ++m.tp;
            if (t->mark != e->mark) ++m.shd;
        } else {
            ++m.shd;
            if (e) {
                ++m.fp;
            } else {
                ++m.fn;
            }
        }
    }
    m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : 1.0;
    m.recall = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 1.0;
    if (m.tp + m.fp == 0 && m.tp + m.fn > 0) m.precision = 0.0;
    if (m.tp + m.fn == 0 && m.tp + m.fp > 0) m.recall = 0.0;
    m.f_score = f_score(m.precision, m.recall);
    return m;
}

}  // namespace cdnots
