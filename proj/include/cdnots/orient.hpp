#pragma once

// Edge orientation on partially directed graphs: unshielded colliders from
// separating sets, then Meek's rules R1-R4 to a fixpoint.

#include <functional>
#include <string>
#include <vector>

namespace cdnots::orient {

// a - b when both arcs are present, a -> b when only arc(a, b) is.
class Pdag {
public:
    explicit Pdag(int n);

    int size() const { return n_; }
    void add_undirected(int a, int b);
    void add_directed(int a, int b);
    void remove(int a, int b);
    // Turns a - b into a -> b.
    void orient(int a, int b);

    bool adjacent(int a, int b) const { return arc(a, b) || arc(b, a); }
    bool directed(int a, int b) const { return arc(a, b) && !arc(b, a); }
    bool undirected(int a, int b) const { return arc(a, b) && arc(b, a); }
    bool has_directed_path(int from, int to) const;

    bool operator==(const Pdag&) const = default;

private:
    bool arc(int a, int b) const { return arcs_[static_cast<std::size_t>(a * n_ + b)] != 0; }
    void set_arc(int a, int b, bool on) { arcs_[static_cast<std::size_t>(a * n_ + b)] = on ? 1 : 0; }

    int n_;
    std::vector<char> arcs_;
};

// Is c in the separating set recorded for the nonadjacent pair (a, b)?
using SepsetQuery = std::function<bool(int a, int b, int c)>;

// Attempts to orient a - b as a -> b (plus whatever the caller ties to it).
// Returns true when the graph changed.
using OrientFn = std::function<bool(int a, int b)>;

// Orients a - b when it is undirected and a -> b closes no directed cycle.
OrientFn single_edge_orienter(Pdag& g);

// For every unshielded a - c - b with c outside sepset(a, b), orients
// a -> c <- b. An edge already directed the other way is left alone and the
// clash reported through `conflicts`. Triples are read off the adjacency
// before any orientation. Returns the number of edges oriented.
int orient_colliders(Pdag& g, const SepsetQuery& in_sepset, const OrientFn& orient,
                     std::vector<std::string>* conflicts = nullptr,
                     const std::function<std::string(int)>& label = {});

// Meek R1-R4 until nothing changes. Returns the number of edges oriented.
int apply_meek_rules(Pdag& g, const OrientFn& orient);

}  // namespace cdnots::orient
