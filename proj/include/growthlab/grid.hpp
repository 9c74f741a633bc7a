#pragma once

#include <cstdint>
#include <cstdlib>

#include "growthlab/rng.hpp"

// Planar lattice primitives shared by the FPP/LPP/polymer kernels.

namespace growthlab {

struct Coord {
    int32_t x = 0;
    int32_t y = 0;

    friend bool operator==(Coord a, Coord b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(Coord a, Coord b) { return !(a == b); }
};

inline int64_t l1_norm(Coord v) { return int64_t(std::abs(v.x)) + std::abs(v.y); }
inline int64_t l1_dist(Coord a, Coord b) { return int64_t(std::abs(a.x - b.x)) + std::abs(a.y - b.y); }

// Lexicographic order used for deterministic tie-breaking of geodesics.
inline bool lex_less(Coord a, Coord b) { return a.x != b.x ? a.x < b.x : a.y < b.y; }

// An undirected lattice edge, stored as its lower endpoint plus direction.
// dir 0 = +e1 (right), dir 1 = +e2 (up).
struct Edge {
    Coord v;
    uint8_t dir = 0;

    Coord other() const { return dir == 0 ? Coord{v.x + 1, v.y} : Coord{v.x, v.y + 1}; }
    // Graph distance from the origin to the closest endpoint.
    int64_t dist_origin() const {
        const int64_t a = l1_norm(v), b = l1_norm(other());
        return a < b ? a : b;
    }
    friend bool operator==(Edge a, Edge b) { return a.v == b.v && a.dir == b.dir; }
};

// L1 ball around a center; the finite universe of a passage-time query.
struct Box {
    Coord center;
    int32_t radius = 0;

    bool contains(Coord v) const { return l1_dist(v, center) <= radius; }
    bool on_boundary(Coord v) const { return l1_dist(v, center) == radius; }
    bool contains_edge(Edge e) const { return contains(e.v) && contains(e.other()); }
};

inline uint32_t zigzag32(int32_t n) { return (uint32_t(n) << 1) ^ uint32_t(n >> 31); }

// Injective 64-bit cell ids over vertices and edges via doubled coordinates:
// a vertex maps to (2x, 2y), an edge to its doubled midpoint (odd parity).
inline uint64_t vertex_cell(Coord v) {
    return uint64_t(zigzag32(2 * v.x)) | (uint64_t(zigzag32(2 * v.y)) << 32);
}

inline uint64_t edge_cell(Edge e) {
    const int32_t mx = 2 * e.v.x + (e.dir == 0 ? 1 : 0);
    const int32_t my = 2 * e.v.y + (e.dir == 1 ? 1 : 0);
    return uint64_t(zigzag32(mx)) | (uint64_t(zigzag32(my)) << 32);
}

}  // namespace growthlab
