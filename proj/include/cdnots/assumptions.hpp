#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdnots/citest.hpp"
#include "cdnots/graph.hpp"

namespace cdnots {

struct StationarityEntry {
    int var = 0;
    std::string name;
    bool nonstationary = false;
};

// A series is nonstationary iff it is adjacent to the time node.
std::vector<StationarityEntry> stationarity_report(const MixedGraph& g);

struct LinearityConfig {
    double alpha = 0.05;
    CiTestConfig ci{CiTestKind::KcitHbe, {}, {}, {}};
    double jitter = 1e-4;
    // Ridge penalties tried by leave-one-out; the best one is used.
    std::vector<double> penalties{1e-3, 1e-2, 1e-1, 1.0, 10.0};
    std::uint64_t seed = 0;
};

struct LinearityReport {
    std::string target;
    std::string tested_parent;
    std::vector<std::string> conditioning;
    double p_value = 1.0;
    bool reject = false;
    std::string test_name;
    double penalty = 0.0;
};

// Regresses y on (x, Z) with the kernel x x' + RBF(Z), then tests the
// residual against x given Z. Rejection means y is not linear in x with
// additive noise.
LinearityReport linearity_test(VectorRef y, VectorRef x, MatrixRef z, const LinearityConfig& cfg = {});

}  // namespace cdnots
