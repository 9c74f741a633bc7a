#pragma once

#include <cstdint>
#include <cstring>
#include <limits>
#include <memory>
#include <vector>

#include "growthlab/grid.hpp"

// Reusable sparse workspace for label-setting searches on a box. The box can
// be far larger than the explored set, so per-vertex state lives in 64x64
// tiles allocated on first touch and recycled between searches. One instance
// serves one thread; replica parallelism uses one workspace per worker.

namespace growthlab::fpp_detail {

inline constexpr double kUnreached = std::numeric_limits<double>::infinity();

// flag layout: bits 0..2 = predecessor direction + 1 (0 means none),
// bit 3 = settled.
inline constexpr uint8_t kSettledBit = 0x8;

// Neighbor offsets, indexed by direction.
inline constexpr int32_t kDx[4] = {1, 0, -1, 0};
inline constexpr int32_t kDy[4] = {0, 1, 0, -1};

struct Tile {
    static constexpr int kBits = 6;
    static constexpr int kSide = 1 << kBits;
    static constexpr int kCells = kSide * kSide;
    double dist[kCells];
    uint8_t flag[kCells];
};

struct HeapEntry {
    double d;
    int32_t x;
    int32_t y;
};

inline bool heap_after(const HeapEntry& a, const HeapEntry& b) {
    // Min-heap on (d, x, y); the coordinate tie-break fixes the settle order.
    if (a.d != b.d) return a.d > b.d;
    if (a.x != b.x) return a.x > b.x;
    return a.y > b.y;
}

class GridScratch {
  public:
    void bind(const Box& box) {
        box_ = box;
        x0_ = box.center.x - box.radius;
        y0_ = box.center.y - box.radius;
        const int32_t side = 2 * box.radius + 1;
        tiles_per_row_ = (side + Tile::kSide - 1) / Tile::kSide;
        directory_.assign(size_t(tiles_per_row_) * tiles_per_row_, -1);
        for (int32_t slot : used_) free_.push_back(slot);
        used_.clear();
        heap_.clear();
    }

    const Box& box() const { return box_; }

    struct Cell {
        Tile* tile;
        int idx;
        double& dist() const { return tile->dist[idx]; }
        uint8_t& flag() const { return tile->flag[idx]; }
    };

    // Allocates the tile on first touch.
    Cell cell(Coord v) {
        const uint32_t cx = uint32_t(v.x - x0_), cy = uint32_t(v.y - y0_);
        const uint32_t ti = (cy >> Tile::kBits) * uint32_t(tiles_per_row_) + (cx >> Tile::kBits);
        int32_t slot = directory_[ti];
        if (slot < 0) {
            slot = acquire_tile();
            directory_[ti] = slot;
        }
        const int idx = int((cy & (Tile::kSide - 1)) << Tile::kBits | (cx & (Tile::kSide - 1)));
        return Cell{pool_[size_t(slot)].get(), idx};
    }

    // Read-only view; null tile means untouched (dist = +inf).
    const Tile* peek_tile(Coord v) const {
        const uint32_t cx = uint32_t(v.x - x0_), cy = uint32_t(v.y - y0_);
        const uint32_t ti = (cy >> Tile::kBits) * uint32_t(tiles_per_row_) + (cx >> Tile::kBits);
        const int32_t slot = directory_[ti];
        return slot < 0 ? nullptr : pool_[size_t(slot)].get();
    }

    double dist(Coord v) const {
        const Tile* t = peek_tile(v);
        if (!t) return kUnreached;
        const uint32_t cx = uint32_t(v.x - x0_), cy = uint32_t(v.y - y0_);
        return t->dist[(cy & (Tile::kSide - 1)) << Tile::kBits | (cx & (Tile::kSide - 1))];
    }

    bool settled(Coord v) const {
        const Tile* t = peek_tile(v);
        if (!t) return false;
        const uint32_t cx = uint32_t(v.x - x0_), cy = uint32_t(v.y - y0_);
        return (t->flag[(cy & (Tile::kSide - 1)) << Tile::kBits | (cx & (Tile::kSide - 1))] &
                kSettledBit) != 0;
    }

    // Predecessor direction of v, or -1.
    int pred_dir(Coord v) const {
        const Tile* t = peek_tile(v);
        if (!t) return -1;
        const uint32_t cx = uint32_t(v.x - x0_), cy = uint32_t(v.y - y0_);
        const int p =
            t->flag[(cy & (Tile::kSide - 1)) << Tile::kBits | (cx & (Tile::kSide - 1))] & 0x7;
        return p - 1;
    }

    std::vector<HeapEntry>& heap() { return heap_; }

  private:
    int32_t acquire_tile() {
        int32_t slot;
        if (!free_.empty()) {
            slot = free_.back();
            free_.pop_back();
        } else {
            pool_.push_back(std::make_unique<Tile>());
            slot = int32_t(pool_.size()) - 1;
        }
        Tile* t = pool_[size_t(slot)].get();
        std::fill(t->dist, t->dist + Tile::kCells, kUnreached);
        std::memset(t->flag, 0, sizeof(t->flag));
        used_.push_back(slot);
        return slot;
    }

    Box box_{};
    int32_t x0_ = 0, y0_ = 0;
    int32_t tiles_per_row_ = 0;
    std::vector<int32_t> directory_;
    std::vector<std::unique_ptr<Tile>> pool_;
    std::vector<int32_t> used_;
    std::vector<int32_t> free_;
    std::vector<HeapEntry> heap_;
};

// Label-setting shortest-path expansion from `source` confined to the box.
// `weight(u, dir, v)` returns the (nonnegative) weight of the edge u -> v;
// `on_settle(v, d)` runs when v is finalized and stops the search by
// returning true. Distinguished geodesics: at every relaxation, equal-length
// alternatives keep the lexicographically smallest predecessor.
template <class WeightF, class OnSettle>
void run_dijkstra(GridScratch& ws, Coord source, WeightF&& weight, OnSettle&& on_settle) {
    auto& heap = ws.heap();
    heap.clear();
    {
        auto c = ws.cell(source);
        c.dist() = 0.0;
    }
    heap.push_back(HeapEntry{0.0, source.x, source.y});
    const Box box = ws.box();
    while (!heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), heap_after);
        const HeapEntry top = heap.back();
        heap.pop_back();
        const Coord u{top.x, top.y};
        auto cu = ws.cell(u);
        if (cu.flag() & kSettledBit) continue;  // stale entry
        cu.flag() |= kSettledBit;
        if (on_settle(u, top.d)) return;
        for (int dir = 0; dir < 4; ++dir) {
            const Coord v{u.x + kDx[dir], u.y + kDy[dir]};
            if (!box.contains(v)) continue;
            auto cv = ws.cell(v);
            if (cv.flag() & kSettledBit) continue;
            const double w = weight(u, dir, v);
            const double nd = top.d + w;
            if (nd < cv.dist()) {
                cv.dist() = nd;
                cv.flag() = uint8_t((cv.flag() & kSettledBit) | ((dir ^ 2) + 1));
                heap.push_back(HeapEntry{nd, v.x, v.y});
                std::push_heap(heap.begin(), heap.end(), heap_after);
            } else if (nd == cv.dist() && (cv.flag() & 0x7) != 0) {
                // Tie: keep the lexicographically smallest predecessor.
                const int cur = (cv.flag() & 0x7) - 1;
                const Coord cur_pred{v.x + kDx[cur], v.y + kDy[cur]};
                if (lex_less(u, cur_pred))
                    cv.flag() = uint8_t((cv.flag() & kSettledBit) | ((dir ^ 2) + 1));
            }
        }
    }
}

// Walks predecessor directions from v back to the source.
inline std::vector<Coord> walk_path(const GridScratch& ws, Coord source, Coord v) {
    std::vector<Coord> rev;
    Coord cur = v;
    rev.push_back(cur);
    while (!(cur == source)) {
        const int dir = ws.pred_dir(cur);
        if (dir < 0) return {};  // unreached
        cur = Coord{cur.x + kDx[dir], cur.y + kDy[dir]};
        rev.push_back(cur);
    }
    return std::vector<Coord>(rev.rbegin(), rev.rend());
}

// Bidirectional variant for point-to-point values: explores two half-radius
// balls instead of one full ball. Returns the passage time and, through
// `vertices`, one optimal path x -> y (fwd tree to the meeting vertex, then
// the bwd tree onward). The alternation and meeting rules are deterministic,
// which is all the distinguished-path contract requires; for atomless laws
// the optimal path is a.s. unique anyway.
template <class WeightF>
double bidirectional_passage(GridScratch& fwd, GridScratch& bwd, const Box& box, Coord x, Coord y,
                             WeightF&& weight, std::vector<Coord>* vertices) {
    fwd.bind(box);
    bwd.bind(box);
    if (x == y) {
        if (vertices) *vertices = {x};
        return 0.0;
    }
    auto& hf = fwd.heap();
    auto& hb = bwd.heap();
    fwd.cell(x).dist() = 0.0;
    hf.push_back(HeapEntry{0.0, x.x, x.y});
    bwd.cell(y).dist() = 0.0;
    hb.push_back(HeapEntry{0.0, y.x, y.y});
    double best = kUnreached;
    Coord meet{0, 0};
    const auto consider = [&](double cand, Coord v) {
        if (cand < best) {
            best = cand;
            meet = v;
        }
    };
    while (!hf.empty() || !hb.empty()) {
        const double topf = hf.empty() ? kUnreached : hf.front().d;
        const double topb = hb.empty() ? kUnreached : hb.front().d;
        if (topf + topb >= best) break;
        const bool take_fwd = topf <= topb;  // deterministic alternation
        GridScratch& self = take_fwd ? fwd : bwd;
        GridScratch& other = take_fwd ? bwd : fwd;
        auto& heap = self.heap();
        std::pop_heap(heap.begin(), heap.end(), heap_after);
        const HeapEntry top = heap.back();
        heap.pop_back();
        const Coord u{top.x, top.y};
        auto cu = self.cell(u);
        if (cu.flag() & kSettledBit) continue;
        cu.flag() |= kSettledBit;
        for (int dir = 0; dir < 4; ++dir) {
            const Coord v{u.x + kDx[dir], u.y + kDy[dir]};
            if (!box.contains(v)) continue;
            auto cv = self.cell(v);
            if (cv.flag() & kSettledBit) {
                continue;
            }
            const double w = weight(u, dir, v);
            const double nd = top.d + w;
            if (nd < cv.dist()) {
                cv.dist() = nd;
                cv.flag() = uint8_t((cv.flag() & kSettledBit) | ((dir ^ 2) + 1));
                heap.push_back(HeapEntry{nd, v.x, v.y});
                std::push_heap(heap.begin(), heap.end(), heap_after);
            }
            const double od = other.dist(v);
            if (od < kUnreached) consider(nd + od, v);
        }
    }
    if (best == kUnreached) return kUnreached;
    if (vertices) {
        const auto head = walk_path(fwd, x, meet);  // x .. meet
        const auto tail = walk_path(bwd, y, meet);  // y .. meet
        vertices->assign(head.begin(), head.end());
        for (size_t i = tail.size() - 1; i-- > 0;) vertices->push_back(tail[i]);
    }
    return best;
}

}  // namespace growthlab::fpp_detail
