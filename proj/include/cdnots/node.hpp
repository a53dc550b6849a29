#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>

namespace cdnots {

// A vertex of the lagged graph: variable `var` observed `lag` steps in the
// past, or the time-index node. The time node orders after every variable.
struct LaggedNode {
    static constexpr int kTimeVar = std::numeric_limits<int>::max();

    int var = 0;
    int lag = 0;

    static constexpr LaggedNode variable(int v, int l) { return {v, l}; }
    static constexpr LaggedNode time() { return {kTimeVar, 0}; }

    constexpr bool is_time() const { return var == kTimeVar; }

    auto operator<=>(const LaggedNode&) const = default;
};

// "T" for the time node, otherwise name(t) or name(t-l).
std::string node_label(const LaggedNode& node, const std::string& var_name);

}  // namespace cdnots

template <>
struct std::hash<cdnots::LaggedNode> {
    std::size_t operator()(const cdnots::LaggedNode& n) const noexcept {
        return std::hash<long long>{}((static_cast<long long>(n.var) << 20) ^ n.lag);
    }
};
