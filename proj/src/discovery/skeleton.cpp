#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <set>
#include <stdexcept>
#include <thread>

#include "cdnots/discovery.hpp"

namespace cdnots {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t node_code(const LaggedNode& n) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(n.var)) << 32) ^ static_cast<std::uint32_t>(n.lag);
}

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CDNOTS_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Calls f(subset) for each size-k subset of `items` in lexicographic order
// until f returns true.
template <class F>
bool for_each_subset(const std::vector<LaggedNode>& items, std::size_t k, F&& f) {
    if (k > items.size()) return false;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<LaggedNode> subset(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) subset[i] = items[idx[i]];
        if (f(subset)) return true;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == items.size() - k + i - 1) --i;
        if (i == 0) return false;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

struct PairOutcome {
    std::vector<TestLogEntry> entries;
    bool removed = false;
    std::vector<LaggedNode> sepset;
    double max_p = 0.0;
    bool testable = false;
    std::exception_ptr error;
};

std::string describe(const MixedGraph& g, const LaggedNode& a, const LaggedNode& b,
                     const std::vector<LaggedNode>& cond) {
    std::string s = g.label(a) + " _||_ " + g.label(b) + " | {";
    for (std::size_t i = 0; i < cond.size(); ++i) s += (i ? ", " : "") + g.label(cond[i]);
    return s + "}";
}

}  // namespace

std::uint64_t test_seed(std::uint64_t base, const EdgeKey& key, std::span<const LaggedNode> cond) {
    std::uint64_t h = splitmix(base);
    h = splitmix(h ^ node_code(key.first));
    h = splitmix(h ^ node_code(key.second));
    for (const auto& c : cond) h = splitmix(h ^ node_code(c));
    return h;
}

std::optional<int> default_max_cond_size(int n_vars) {
    if (n_vars <= 6) return std::nullopt;
    return 3;
}

void DiscoveryConfig::validate() const {
    if (max_lag < 0) throw std::invalid_argument("max_lag must be non-negative");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (max_cond_size && *max_cond_size < 0) throw std::invalid_argument("max_cond_size must be non-negative");
    if (stage4_window < 2) throw std::invalid_argument("stage4_window must be at least 2");
    if (!(stage4_margin >= 0.0)) throw std::invalid_argument("stage4_margin must be non-negative");
    if (threads < 0) throw std::invalid_argument("threads must be non-negative");
}

const std::vector<LaggedNode>* SepsetRecord::find(const EdgeKey& key) const {
    const auto it = sets.find(key);
    return it == sets.end() ? nullptr : &it->second;
}

DiscoveryResult skeleton_search(const LaggedDesignMatrix& design, const std::vector<std::string>& names,
                                const DiscoveryConfig& cfg, CiTester& tester) {
    cfg.validate();
    if (design.max_lag() != cfg.max_lag) throw std::invalid_argument("skeleton: design lag differs from config");
    DiscoveryResult res{MixedGraph(design.n_vars(), design.max_lag(), names), {}, {}};
    MixedGraph& g = res.graph;
    for (const auto& key : g.all_keys()) g.set_edge(key, {Mark::Undirected, 0.0});

    const std::optional<int> cap = cfg.max_cond_size ? cfg.max_cond_size : default_max_cond_size(design.n_vars());
    const int n_workers = worker_count(cfg.threads);

    for (int level = 0;; ++level) {
        if (cap && level > *cap) break;
        const MixedGraph snapshot = g;
        std::vector<EdgeKey> keys;
        for (const auto& [key, em] : snapshot.edges()) keys.push_back(key);
        std::vector<PairOutcome> outcomes(keys.size());
        const std::size_t k = static_cast<std::size_t>(level);

        auto run_pair = [&](std::size_t idx) {
            PairOutcome& out = outcomes[idx];
            const EdgeKey& key = keys[idx];
            const LaggedNode a = key.first;
            const LaggedNode b = key.second;
            std::vector<std::vector<LaggedNode>> sides;
            auto without = [&](const LaggedNode& of, const LaggedNode& drop, bool vars_only) {
                std::vector<LaggedNode> s;
                for (const auto& v : snapshot.neighbors(of)) {
                    if (v == drop || (vars_only && v.is_time())) continue;
                    s.push_back(v);
                }
                return s;
            };
            if (a.is_time()) {
                sides.push_back(without(b, a, true));
            } else {
                sides.push_back(without(a, b, false));
                sides.push_back(without(b, a, false));
            }
            std::set<std::vector<LaggedNode>> tried;
            for (const auto& side : sides) {
                if (side.size() < k) continue;
                out.testable = true;
                const bool done = for_each_subset(side, k, [&](const std::vector<LaggedNode>& s) {
                    if (!tried.insert(s).second) return false;
                    CITestResult r;
                    try {
                        r = tester.test(a, b, s, test_seed(cfg.seed, key, s));
                    } catch (const std::exception& e) {
                        throw std::runtime_error("CI test failed for " + describe(snapshot, a, b, s) + ": " + e.what());
                    }
                    out.entries.push_back({key, s, r, level});
                    out.max_p = std::max(out.max_p, r.p_value);
                    if (r.p_value > cfg.alpha) {
                        out.removed = true;
                        out.sepset = s;
                        return true;
                    }
                    return false;
                });
                if (done) break;
            }
        };

        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < keys.size(); i = next++) {
                try {
                    run_pair(i);
                } catch (...) {
                    outcomes[i].error = std::current_exception();
                }
            }
        };
        const int spawn = std::min<int>(n_workers, static_cast<int>(keys.size()));
        if (spawn <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }

        bool any_testable = false;
        std::size_t count = 0;
        for (std::size_t i = 0; i < keys.size(); ++i) {
            PairOutcome& out = outcomes[i];
            if (out.error) std::rethrow_exception(out.error);
            any_testable = any_testable || out.testable;
            count += out.entries.size();
            for (auto& e : out.entries) res.log.entries.push_back(std::move(e));
            const EdgeMark prev = *g.edge(keys[i]);
            if (out.removed) {
                g.remove_edge(keys[i]);
                res.sepsets.sets[keys[i]] = out.sepset;
            } else {
                g.set_edge(keys[i], {Mark::Undirected, std::max(prev.max_p, out.max_p)});
            }
        }
        res.log.tests_per_level.push_back(count);
        if (!any_testable) break;
    }
    return res;
}

ReplayTester::ReplayTester(const TestLog& log) {
    for (const auto& e : log.entries) results_[{e.pair, e.cond}] = e.result;
}

CITestResult ReplayTester::test(const LaggedNode& a, const LaggedNode& b, std::span<const LaggedNode> cond,
                                std::uint64_t) {
    std::vector<LaggedNode> c(cond.begin(), cond.end());
    const auto it = results_.find({EdgeKey{a, b}, c});
    if (it == results_.end()) throw std::out_of_range("replay: test not in the recorded log");
    return it->second;
}

}  // namespace cdnots
