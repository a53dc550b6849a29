#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cdnots/assumptions.hpp"
#include "cdnots/discovery.hpp"

using namespace cdnots;

namespace {

const Eigen::MatrixXd kNoZ(0, 0);

Eigen::VectorXd normal(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
    return v;
}

Eigen::VectorXd uniform(Eigen::Index n, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

}  // namespace

TEST_CASE("stationarity readout") {
    MixedGraph g(3, 1, {"a", "b", "c"});
    for (const auto& e : stationarity_report(g)) CHECK_FALSE(e.nonstationary);
    g.set_edge({LaggedNode::time(), LaggedNode::variable(1, 0)}, {Mark::Forward, 0.0});
    const auto rep = stationarity_report(g);
    REQUIRE(rep.size() == 3);
    CHECK_FALSE(rep[0].nonstationary);
    CHECK(rep[1].nonstationary);
    CHECK(rep[1].name == "b");
    CHECK_FALSE(rep[2].nonstationary);
    const auto again = stationarity_report(g);
    for (std::size_t i = 0; i < rep.size(); ++i) CHECK(again[i].nonstationary == rep[i].nonstationary);
}

TEST_CASE("ou process with one lag reads as stationary") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    Eigen::MatrixXd x(1000, 1);
    double prev = 0.0;
    for (int t = 0; t < 1000; ++t) {
        prev = std::exp(-1.0) * prev + std::sqrt(1.0 - std::exp(-2.0)) * g(rng);
        x(t, 0) = prev;
    }
    DiscoveryConfig cfg;
    cfg.ci.kind = CiTestKind::KcitHbe;
    const auto res = discover(TimeSeriesDataset(x, {"X"}), cfg);
    for (const auto& e : stationarity_report(res.graph)) CHECK_FALSE(e.nonstationary);
}

TEST_CASE("linear relation is not rejected") {
    int accept = 0;
    for (int s = 0; s < 50; ++s) {
        std::mt19937_64 rng(100 + s);
        const Eigen::VectorXd x = normal(500, rng);
        const Eigen::VectorXd y = 2.0 * x + normal(500, rng);
        const auto rep = linearity_test(y, x, kNoZ);
        CHECK(rep.p_value >= 0.0);
        CHECK(rep.p_value <= 1.0);
        accept += !rep.reject;
    }
    CHECK(accept >= 45);
}

TEST_CASE("quadratic relation is rejected") {
    int reject = 0;
    for (int s = 0; s < 50; ++s) {
        std::mt19937_64 rng(200 + s);
        const Eigen::VectorXd x = uniform(500, rng, -1.0, 1.0);
        const Eigen::VectorXd y = x.array().square().matrix() + normal(500, rng);
        reject += linearity_test(y, x, kNoZ).reject;
    }
    CHECK(reject >= 45);
}

TEST_CASE("nonlinear heteroscedastic dependence on Z is allowed") {
    int accept = 0;
    for (int s = 0; s < 50; ++s) {
        std::mt19937_64 rng(300 + s);
        const Eigen::VectorXd x = normal(500, rng);
        const Eigen::VectorXd z = normal(500, rng);
        const Eigen::VectorXd e = normal(500, rng);
        const Eigen::VectorXd y =
            z.array().sin() + x.array() + (1.0 + z.array().square()) * e.array();
        accept += !linearity_test(y, x, z).reject;
    }
    CHECK(accept >= 40);
}

TEST_CASE("permuted parent is calibrated") {
    int reject = 0;
    for (int s = 0; s < 100; ++s) {
        std::mt19937_64 rng(400 + s);
        const Eigen::VectorXd x = uniform(300, rng, -1.0, 1.0);
        Eigen::VectorXd y = x.array().square().matrix() + 0.3 * normal(300, rng);
        std::vector<Eigen::Index> perm(300);
        for (Eigen::Index i = 0; i < 300; ++i) perm[static_cast<std::size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::VectorXd yp(300);
        for (Eigen::Index i = 0; i < 300; ++i) yp(i) = y(perm[static_cast<std::size_t>(i)]);
        reject += linearity_test(yp, x, kNoZ).reject;
    }
    CHECK(reject <= 12);
}

TEST_CASE("linearity test options and errors") {
    std::mt19937_64 rng(5);
    const Eigen::VectorXd x = normal(200, rng);
    const Eigen::VectorXd y = x + normal(200, rng);
    LinearityConfig cfg;
    cfg.ci.kind = CiTestKind::ParCorr;
    const auto rep = linearity_test(y, x, kNoZ, cfg);
    CHECK(rep.test_name == "parcorr");
    CHECK(std::find(cfg.penalties.begin(), cfg.penalties.end(), rep.penalty) != cfg.penalties.end());
    // A linear fit leaves a residual with no linear trace of x.
    CHECK(rep.p_value > 0.5);
    CHECK_THROWS_AS(linearity_test(y, normal(199, rng), kNoZ), std::invalid_argument);
    cfg.penalties.clear();
    CHECK_THROWS_AS(linearity_test(y, x, kNoZ, cfg), std::invalid_argument);
    Eigen::VectorXd bad = y;
    bad(3) = std::nan("");
    CHECK_THROWS(linearity_test(bad, x, kNoZ));
}
