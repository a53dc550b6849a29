#include "cdnots/orient.hpp"

#include <stdexcept>

namespace cdnots::orient {

Pdag::Pdag(int n) : n_(n), arcs_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {
    if (n < 0) throw std::invalid_argument("pdag: negative size");
}

void Pdag::add_undirected(int a, int b) {
    if (a == b) throw std::invalid_argument("pdag: self-loop");
    set_arc(a, b, true);
    set_arc(b, a, true);
}

void Pdag::add_directed(int a, int b) {
    if (a == b) throw std::invalid_argument("pdag: self-loop");
    set_arc(a, b, true);
    set_arc(b, a, false);
}

void Pdag::remove(int a, int b) {
    set_arc(a, b, false);
    set_arc(b, a, false);
}

void Pdag::orient(int a, int b) {
    if (!adjacent(a, b)) throw std::invalid_argument("pdag: orienting a missing edge");
    set_arc(a, b, true);
    set_arc(b, a, false);
}

bool Pdag::has_directed_path(int from, int to) const {
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::vector<int> stack{from};
    seen[static_cast<std::size_t>(from)] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        if (u == to) return true;
        for (int v = 0; v < n_; ++v) {
            if (!seen[static_cast<std::size_t>(v)] && directed(u, v)) {
                seen[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
            }
        }
    }
    return false;
}

OrientFn single_edge_orienter(Pdag& g) {
    return [&g](int a, int b) {
        if (!g.undirected(a, b) || g.has_directed_path(b, a)) return false;
        g.orient(a, b);
        return true;
    };
}

int orient_colliders(Pdag& g, const SepsetQuery& in_sepset, const OrientFn& orient,
                     std::vector<std::string>* conflicts, const std::function<std::string(int)>& label) {
    auto name = [&](int i) { return label ? label(i) : std::to_string(i); };
    const int n = g.size();
    struct Triple {
        int a, c, b;
    };
    std::vector<Triple> triples;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (g.adjacent(a, b)) continue;
            for (int c = 0; c < n; ++c) {
                if (c == a || c == b || !g.adjacent(a, c) || !g.adjacent(b, c)) continue;
                if (!in_sepset(a, b, c)) triples.push_back({a, c, b});
            }
        }
    }
    int count = 0;
    auto into = [&](int from, int to, const Triple& t) {
        if (g.directed(from, to)) return;
        if (g.undirected(from, to) && orient(from, to)) {
            ++count;
            return;
        }
        if (conflicts) {
            conflicts->push_back("collider " + name(t.a) + " -> " + name(t.c) + " <- " + name(t.b) +
                                 " conflicts with existing orientation of " + name(from) + " - " + name(to));
        }
    };
    for (const auto& t : triples) {
        into(t.a, t.c, t);
        into(t.b, t.c, t);
    }
    return count;
}

int apply_meek_rules(Pdag& g, const OrientFn& orient) {
    const int n = g.size();
    int count = 0;

    auto r1 = [&](int a, int b) {
        for (int c = 0; c < n; ++c) {
            if (c != b && g.directed(c, a) && !g.adjacent(c, b)) return true;
        }
        return false;
    };
    auto r2 = [&](int a, int b) {
        for (int c = 0; c < n; ++c) {
            if (g.directed(a, c) && g.directed(c, b)) return true;
        }
        return false;
    };
    auto r3 = [&](int a, int b) {
        for (int c = 0; c < n; ++c) {
            if (!g.undirected(a, c) || !g.directed(c, b)) continue;
            for (int d = c + 1; d < n; ++d) {
                if (g.undirected(a, d) && g.directed(d, b) && !g.adjacent(c, d)) return true;
            }
        }
        return false;
    };
    // a - d, d -> c -> b, a adjacent to c, d and b nonadjacent.
    auto r4 = [&](int a, int b) {
        for (int c = 0; c < n; ++c) {
            if (c == a || c == b || !g.directed(c, b) || !g.adjacent(a, c)) continue;
            for (int d = 0; d < n; ++d) {
                if (d == a || d == b || d == c) continue;
                if (g.undirected(a, d) && g.directed(d, c) && !g.adjacent(d, b)) return true;
            }
        }
        return false;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == b || !g.undirected(a, b)) continue;
                if ((r1(a, b) || r2(a, b) || r3(a, b) || r4(a, b)) && orient(a, b)) {
                    ++count;
                    changed = true;
                }
            }
        }
    }
    return count;
}

}  // namespace cdnots::orient
