#pragma once

// Synthetic lagged structural models, graph metrics and the benchmark runner.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cdnots/citest.hpp"
#include "cdnots/dataset.hpp"
#include "cdnots/discovery.hpp"
#include "cdnots/graph.hpp"

namespace cdnots {

enum class Mechanism { Linear, Quadratic, Exponential, Sine };

std::string_view mechanism_name(Mechanism m);
Mechanism parse_mechanism(std::string_view name);

// c * f(x); quadratic and exponential inputs are clipped to [-3, 3].
double apply_mechanism(Mechanism m, double coef, double x);

struct SimSpec {
    int n_nodes = 3;
    int n_samples = 500;
    int max_lag = 1;
    double edge_density = 0.2;
    std::vector<std::pair<Mechanism, double>> mechanisms{{Mechanism::Linear, 1.0}};
    double noise_scale = 1.0;
    double coef_min = 0.3;
    double coef_max = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// "linear:1;sine:0.5"
std::string format_mechanisms(const std::vector<std::pair<Mechanism, double>>& m);
std::vector<std::pair<Mechanism, double>> parse_mechanisms(std::string_view text);

struct SimEdge {
    LaggedNode from;  // (i, l) drives (to, 0)
    int to = 0;
    Mechanism mechanism = Mechanism::Linear;
    double coef = 0.0;
};

struct SimInstance {
    MixedGraph truth;
    TimeSeriesDataset data;
    SimSpec spec;
    std::vector<SimEdge> edges;
    // Innovation added to each observation, same shape as data.
    Eigen::MatrixXd noise;
};

SimInstance generate(const SimSpec& spec);

struct EvalMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    int shd = 0;
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

// Summary-edge comparison. Adjacent pairs count as true positives whatever
// their marks; SHD charges 1 per missing, extra or differently marked class.
EvalMetrics evaluate(const MixedGraph& truth, const MixedGraph& estimate);

double f_score(double precision, double recall);

struct BenchmarkGrid {
    std::vector<SimSpec> specs;
    std::vector<CiTestKind> tests;
    std::vector<double> alphas;
    DiscoveryConfig base;

    void validate() const;
};

// nodes x samples x seeds specs cloned from `tmpl`; seeds 0..n_seeds-1 are
// offset by tmpl.seed.
std::vector<SimSpec> desk_specs(const SimSpec& tmpl, const std::vector<int>& nodes, const std::vector<int>& samples,
                                int n_seeds);

struct BenchmarkRow {
    SimSpec spec;
    std::string test_name;
    double alpha = 0.0;
    EvalMetrics metrics;
    double wall_ms = 0.0;
    std::size_t n_tests = 0;
    std::string status = "ok";

    // Identifies the row for resuming; excludes results and timing.
    std::string key() const;
};

extern const std::vector<std::string> kBenchmarkColumns;

std::string format_row(const BenchmarkRow& row);
std::vector<BenchmarkRow> read_benchmark_csv(const std::filesystem::path& path);

// Appends one row per (spec, test, alpha) not already in `out`; returns all
// rows of the file afterwards. Failures are recorded in the status column.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkGrid& grid, const std::filesystem::path& out);

}  // namespace cdnots
