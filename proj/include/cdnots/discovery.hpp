#pragma once

// The discovery engine: complete initial graph over the lag window plus the
// time node, PC-stable skeleton search with replicated edge classes,
// orientation from background knowledge, colliders and Meek's rules, and the
// optional module-change orientation of edges between nonstationary series.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdnots/citest.hpp"
#include "cdnots/dataset.hpp"
#include "cdnots/graph.hpp"

namespace cdnots {

struct DiscoveryConfig {
    int max_lag = 1;
    double alpha = 0.05;
    CiTestConfig ci;
    // Largest conditioning set; nullopt picks default_max_cond_size().
    std::optional<int> max_cond_size;
    std::uint64_t seed = 0;
    bool stage4_enabled = true;
    int stage4_window = 10;
    double stage4_margin = 0.25;
    int stage4_min_block_rows = 30;
    // Worker threads for one skeleton level; 0 reads CDNOTS_THREADS, then
    // falls back to the hardware concurrency.
    int threads = 0;

    void validate() const;
};

// Unbounded (nullopt) for up to six series, otherwise 3.
std::optional<int> default_max_cond_size(int n_vars);

struct SepsetRecord {
    std::map<EdgeKey, std::vector<LaggedNode>> sets;

    const std::vector<LaggedNode>* find(const EdgeKey& key) const;
};

struct TestLogEntry {
    EdgeKey pair;
    std::vector<LaggedNode> cond;
    CITestResult result;
    int level = 0;
};

struct TestLog {
    std::vector<TestLogEntry> entries;
    std::vector<std::size_t> tests_per_level;
    std::size_t stage4_evaluations = 0;
    std::vector<std::string> warnings;

    std::size_t skeleton_tests() const { return entries.size(); }
};

struct DiscoveryResult {
    MixedGraph graph;
    SepsetRecord sepsets;
    TestLog log;
};

// Stage 2 on a prepared design matrix. The returned graph is undirected.
DiscoveryResult skeleton_search(const LaggedDesignMatrix& design, const std::vector<std::string>& names,
                                const DiscoveryConfig& cfg, CiTester& tester);

// Time node and arrow-of-time orientation, colliders, Meek to a fixpoint.
MixedGraph orient_stage3(MixedGraph skeleton, const SepsetRecord& sepsets, TestLog* log = nullptr);

// Module-change orientation for undirected edges between two series that are
// both adjacent to the time node, then Meek again.
MixedGraph orient_stage4(MixedGraph g, const LaggedDesignMatrix& design, const DiscoveryConfig& cfg,
                         TestLog* log = nullptr);

// Dependence between the per-block descriptors of cause and effect|cause
// modules; lower means more independent module changes.
double module_change_score(const LaggedDesignMatrix& design, const MixedGraph& g, const LaggedNode& cause,
                           const LaggedNode& effect, int blocks);

DiscoveryResult discover(const LaggedDesignMatrix& design, const std::vector<std::string>& names,
                         const DiscoveryConfig& cfg, CiTester& tester);

// Standardizes, lag-embeds and runs all stages with the configured test.
DiscoveryResult discover(const TimeSeriesDataset& ds, const DiscoveryConfig& cfg);

// Answers every test from a recorded log; unseen tests throw.
class ReplayTester final : public CiTester {
public:
    explicit ReplayTester(const TestLog& log);
    CITestResult test(const LaggedNode& a, const LaggedNode& b, std::span<const LaggedNode> cond,
                      std::uint64_t seed) override;
    std::string_view name() const override { return "replay"; }

private:
    std::map<std::pair<EdgeKey, std::vector<LaggedNode>>, CITestResult> results_;
};

// Per-test seed derived from the run seed, the pair and the conditioning set.
std::uint64_t test_seed(std::uint64_t base, const EdgeKey& key, std::span<const LaggedNode> cond);

}  // namespace cdnots
