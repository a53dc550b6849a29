#include <algorithm>
#include <deque>
#include <memory>
#include <map>
#include <mutex>
#include <stdexcept>

#include "cdnots/citest.hpp"
#include "cdnots/kernels.hpp"
#include "kcit_core.hpp"

namespace cdnots {

std::string_view ci_test_name(CiTestKind kind) {
    switch (kind) {
        case CiTestKind::ParCorr:
            return "parcorr";
        case CiTestKind::KcitSw:
            return "kcit-sw";
        case CiTestKind::KcitHbe:
            return "kcit-hbe";
        case CiTestKind::RcotSw:
            return "rcot-sw";
        case CiTestKind::RcotHbe:
            return "rcot-hbe";
        case CiTestKind::CmiKnn:
            return "cmiknn";
    }
    return "unknown";
}

CiTestKind parse_ci_test(std::string_view name) {
    for (CiTestKind k : kAllCiTests) {
        if (ci_test_name(k) == name) return k;
    }
    throw std::invalid_argument("unknown CI test '" + std::string(name) + "'");
}

bool is_randomized(CiTestKind kind) {
    return kind == CiTestKind::RcotSw || kind == CiTestKind::RcotHbe || kind == CiTestKind::CmiKnn;
}

CITestResult run_ci_test(const CiTestConfig& cfg, VectorRef x, VectorRef y, MatrixRef z, std::uint64_t seed) {
    switch (cfg.kind) {
        case CiTestKind::ParCorr:
            return parcorr_test(x, y, z);
        case CiTestKind::KcitSw:
            return kcit_test(x, y, z, NullApprox::Satterthwaite, cfg.kcit);
        case CiTestKind::KcitHbe:
            return kcit_test(x, y, z, NullApprox::HallBuckleyEagleson, cfg.kcit);
        case CiTestKind::RcotSw:
            return rcot_test(x, y, z, NullApprox::Satterthwaite, seed, cfg.rcot);
        case CiTestKind::RcotHbe:
            return rcot_test(x, y, z, NullApprox::HallBuckleyEagleson, seed, cfg.rcot);
        case CiTestKind::CmiKnn:
            return cmiknn_test(x, y, z, cfg.cmiknn, seed);
    }
    throw std::logic_error("run_ci_test: unhandled test kind");
}

namespace {

class GatheringTester final : public CiTester {
public:
    GatheringTester(const LaggedDesignMatrix& design, CiTestConfig cfg) : design_(design), cfg_(cfg) {}

    CITestResult test(const LaggedNode& a, const LaggedNode& b, std::span<const LaggedNode> cond,
                      std::uint64_t seed) override {
        const Eigen::MatrixXd z = design_.gather({cond.begin(), cond.end()});
        return run_ci_test(cfg_, design_.column(a), design_.column(b), z, seed);
    }

    std::string_view name() const override { return ci_test_name(cfg_.kind); }

private:
    const LaggedDesignMatrix& design_;
    CiTestConfig cfg_;
};

// Bounded FIFO map from a key to a shared immutable value.
template <class Key, class Value>
class FifoCache {
public:
    explicit FifoCache(std::size_t capacity) : capacity_(capacity) {}

    std::shared_ptr<const Value> find(const Key& key) const {
        const auto it = map_.find(key);
        return it == map_.end() ? nullptr : it->second;
    }

    std::shared_ptr<const Value> insert(const Key& key, std::shared_ptr<const Value> value) {
        auto [it, inserted] = map_.emplace(key, std::move(value));
        if (inserted) {
            order_.push_back(key);
            if (order_.size() > capacity_) {
                map_.erase(order_.front());
                order_.pop_front();
            }
        }
        return it->second;
    }

private:
    std::size_t capacity_;
    std::map<Key, std::shared_ptr<const Value>> map_;
    std::deque<Key> order_;
};

std::size_t matrices_within(std::size_t bytes, Eigen::Index n, std::size_t floor) {
    const std::size_t each = static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * sizeof(double);
    return std::max(floor, bytes / std::max<std::size_t>(each, 1));
}

// KCIT over a design matrix. Unconditional Grams with their spectra, the
// ridge residualisers of recent conditioning sets and the residualised
// (node, Z) Grams are reused across tests.
class CachingKcitTester final : public CiTester {
public:
    CachingKcitTester(const LaggedDesignMatrix& design, CiTestConfig cfg)
        : design_(design),
          cfg_(cfg),
          approx_(cfg.kind == CiTestKind::KcitSw ? NullApprox::Satterthwaite : NullApprox::HallBuckleyEagleson),
          residualizers_(matrices_within(std::size_t{128} << 20, design.rows(), 2)),
          residualized_(matrices_within(std::size_t{256} << 20, design.rows(), 4)) {
        if (design_.rows() < 10) throw std::invalid_argument("kcit: needs at least 10 samples");
        standardized_ = kernels::zscore_columns(design_.columns());
    }

    CITestResult test(const LaggedNode& a, const LaggedNode& b, std::span<const LaggedNode> cond,
                      std::uint64_t) override {
        CITestResult res;
        if (cond.empty()) {
            auto ga = node_gram(a);
            auto gb = node_gram(b);
            res = kcit::unconditional(ga->gram, ga->eig, gb->gram, gb->eig, approx_, cfg_.kcit);
        } else {
            const std::vector<LaggedNode> key(cond.begin(), cond.end());
            auto ka = residualized(a, key);
            auto kb = residualized(b, key);
            res = kcit::conditional(*ka, *kb, static_cast<int>(key.size()), approx_);
        }
        res.test_name = std::string(name());
        return res;
    }

    std::string_view name() const override { return ci_test_name(cfg_.kind); }

private:
    struct NodeGram {
        Eigen::MatrixXd gram;
        std::vector<double> eig;
    };

    Eigen::MatrixXd stack(const std::vector<LaggedNode>& nodes) const {
        Eigen::MatrixXd out(standardized_.rows(), static_cast<Eigen::Index>(nodes.size()));
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            out.col(static_cast<Eigen::Index>(k)) = standardized_.col(design_.column_of(nodes[k]));
        }
        return out;
    }

    std::shared_ptr<const NodeGram> node_gram(const LaggedNode& node) {
        {
            std::lock_guard lock(mutex_);
            if (auto it = grams_.find(node); it != grams_.end()) return it->second;
        }
        auto g = std::make_shared<NodeGram>();
        g->gram = kcit::centered_gram(standardized_.col(design_.column_of(node)));
        g->eig = kcit::symmetric_eigenvalues(g->gram);
        std::lock_guard lock(mutex_);
        return grams_.emplace(node, std::move(g)).first->second;
    }

    std::shared_ptr<const Eigen::MatrixXd> residualizer(const std::vector<LaggedNode>& key) {
        {
            std::lock_guard lock(mutex_);
            if (auto hit = residualizers_.find(key)) return hit;
        }
        auto rz = std::make_shared<const Eigen::MatrixXd>(
            kcit::ridge_residualizer(kcit::centered_gram(stack(key)), cfg_.kcit.ridge));
        std::lock_guard lock(mutex_);
        return residualizers_.insert(key, std::move(rz));
    }

    std::shared_ptr<const Eigen::MatrixXd> residualized(const LaggedNode& node, const std::vector<LaggedNode>& cond) {
        std::pair<LaggedNode, std::vector<LaggedNode>> key{node, cond};
        {
            std::lock_guard lock(mutex_);
            if (auto hit = residualized_.find(key)) return hit;
        }
        auto rz = residualizer(cond);
        std::vector<LaggedNode> joint{node};
        joint.insert(joint.end(), cond.begin(), cond.end());
        auto k = std::make_shared<const Eigen::MatrixXd>(kcit::residualize(kcit::centered_gram(stack(joint)), *rz));
        std::lock_guard lock(mutex_);
        return residualized_.insert(key, std::move(k));
    }

    const LaggedDesignMatrix& design_;
    CiTestConfig cfg_;
    NullApprox approx_;
    Eigen::MatrixXd standardized_;
    std::mutex mutex_;
    std::map<LaggedNode, std::shared_ptr<const NodeGram>> grams_;
    FifoCache<std::vector<LaggedNode>, Eigen::MatrixXd> residualizers_;
    FifoCache<std::pair<LaggedNode, std::vector<LaggedNode>>, Eigen::MatrixXd> residualized_;
};

}  // namespace

std::unique_ptr<CiTester> make_tester(const LaggedDesignMatrix& design, const CiTestConfig& cfg) {
    if (cfg.kind == CiTestKind::KcitSw || cfg.kind == CiTestKind::KcitHbe) {
        return std::make_unique<CachingKcitTester>(design, cfg);
    }
    return std::make_unique<GatheringTester>(design, cfg);
}

}  // namespace cdnots
