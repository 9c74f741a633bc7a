#include "growthlab/fpp.hpp"

#include <cmath>
#include <stdexcept>

#include "growthlab/parallel.hpp"
#include "grid_scratch.hpp"

namespace growthlab::fpp {

using fpp_detail::GridScratch;
using fpp_detail::kDx;
using fpp_detail::kDy;

namespace {

thread_local GridScratch t_scratch;
thread_local GridScratch t_scratch_bwd;

// Canonical undirected edge for a step from u in direction dir.
inline Edge step_edge(Coord u, int dir) {
    switch (dir) {
        case 0: return Edge{u, 0};
        case 1: return Edge{u, 1};
        case 2: return Edge{{u.x - 1, u.y}, 0};
        default: return Edge{{u.x, u.y - 1}, 1};
    }
}

std::vector<Edge> path_edges(const std::vector<Coord>& vertices) {
    std::vector<Edge> edges;
    edges.reserve(vertices.size() > 0 ? vertices.size() - 1 : 0);
    for (size_t i = 1; i < vertices.size(); ++i) {
        const Coord a = vertices[i - 1], b = vertices[i];
        const int dir = b.x == a.x + 1 ? 0 : b.x == a.x - 1 ? 2 : b.y == a.y + 1 ? 1 : 3;
        edges.push_back(step_edge(a, dir));
    }
    return edges;
}

bool touches_boundary(const Box& box, const std::vector<Coord>& vertices) {
    for (Coord v : vertices)
        if (box.on_boundary(v)) return true;
    return false;
}

template <class WeightF>
PassageResult passage_with_field(GridScratch& ws, const Box& box, Coord x, Coord y,
                                 WeightF&& weight) {
    if (!box.contains(x) || !box.contains(y))
        throw std::invalid_argument("passage_time: endpoints must lie inside the box");
    ws.bind(box);
    bool found = false;
    fpp_detail::run_dijkstra(ws, x, weight, [&](Coord v, double) {
        if (v == y) {
            found = true;
            return true;
        }
        return false;
    });
    if (!found) throw std::runtime_error("passage_time: target unreachable (corrupt box)");
    PassageResult res;
    res.value = ws.dist(y);
    const auto vertices = fpp_detail::walk_path(ws, x, y);
    res.path = path_edges(vertices);
    res.per_edge_weights.reserve(res.path.size());
    for (size_t i = 0; i < res.path.size(); ++i) {
        const Coord a = vertices[i], b = vertices[i + 1];
        const int dir = b.x == a.x + 1 ? 0 : b.x == a.x - 1 ? 2 : b.y == a.y + 1 ? 1 : 3;
        res.per_edge_weights.push_back(weight(a, dir, b));
    }
    res.touched_boundary = touches_boundary(box, vertices);
    return res;
}

}  // namespace

EdgeEnvironment::EdgeEnvironment(Box box_, WeightLaw law_, uint64_t seed_)
    : box(box_), law(std::move(law_)), seed(seed_) {
    law.validate();
    if (law.ess_inf() < 0)
        throw std::invalid_argument("negative-weight: FPP requires a nonnegative law");
    if (box.radius < 1) throw std::invalid_argument("EdgeEnvironment: box radius must be >= 1");
}

CoupledEdgeEnvironment::CoupledEdgeEnvironment(Box box_, coupling::CoupledField field_)
    : box(box_), field(std::move(field_)) {
    if (field.spec().kind != CouplingKind::Min)
        throw std::invalid_argument("FPP coupling must be the min-of-m kind");
    if (field.law().ess_inf() < 0)
        throw std::invalid_argument("negative-weight: FPP requires a nonnegative law");
}

Box default_box(Coord x, Coord y) {
    const Coord mid{(x.x + y.x) / 2, (x.y + y.y) / 2};
    const int64_t r = 3 * std::max<int64_t>(l1_dist(x, y), 2);
    return Box{mid, int32_t(r)};
}

PassageResult passage_time(const EdgeEnvironment& env, Coord x, Coord y) {
    return passage_with_field(t_scratch, env.box, x, y, [&](Coord u, int dir, Coord) {
        return env.weight(step_edge(u, dir));
    });
}

PassageResult passage_time(const CoupledEdgeEnvironment& env, Coord x, Coord y, bool perturbed) {
    if (perturbed)
        return passage_with_field(t_scratch, env.box, x, y, [&](Coord u, int dir, Coord) {
            return env.field.x_tilde(coupling::Location::at_edge(step_edge(u, dir)));
        });
    return passage_with_field(t_scratch, env.box, x, y, [&](Coord u, int dir, Coord) {
        return env.field.x(edge_cell(step_edge(u, dir)));
    });
}

GrowthBall growth_ball(const EdgeEnvironment& env, double t) {
    if (!(t >= 0)) throw std::invalid_argument("growth_ball: t must be >= 0");
    if (!env.box.contains(Coord{0, 0}))
        throw std::invalid_argument("growth_ball: box must contain the origin");
    GridScratch& ws = t_scratch;
    ws.bind(env.box);
    GrowthBall ball;
    ball.t = t;
    bool hit_boundary = false;
    fpp_detail::run_dijkstra(
        ws, Coord{0, 0},
        [&](Coord u, int dir, Coord) { return env.weight(step_edge(u, dir)); },
        [&](Coord v, double d) {
            if (d > t) return true;  // everything later is farther
            ball.reached.push_back(v);
            if (env.box.on_boundary(v)) {
                hit_boundary = true;
                return true;
            }
            return false;
        });
    if (hit_boundary) throw std::runtime_error("ball-hits-boundary: growth ball reached the box edge");
    return ball;
}

std::vector<TimeConstantRow> time_constant_estimate(const WeightLaw& law, double ux, double uy,
                                                    const std::vector<int>& n_list, int replicas,
                                                    uint64_t seed, int workers) {
    check_conditions(law);  // validates the law; condition failures are the caller's call
    std::vector<TimeConstantRow> rows;
    for (size_t ni = 0; ni < n_list.size(); ++ni) {
        const int n = n_list[ni];
        const Coord target{int32_t(std::floor(n * ux)), int32_t(std::floor(n * uy))};
        if (l1_norm(target) == 0)
            throw std::invalid_argument("time_constant_estimate: degenerate direction");
        const auto values = run_indexed<double>(replicas, workers, [&](int64_t r) {
            const uint64_t rseed = derive_seed(seed, (uint64_t(ni) << 32) | uint64_t(r));
            EdgeEnvironment env(default_box({0, 0}, target), law, rseed);
            return passage_time(env, {0, 0}, target).value / double(n);
        });
        double mean = 0;
        for (double v : values) mean += v;
        mean /= double(replicas);
        double var = 0;
        for (double v : values) var += (v - mean) * (v - mean);
        var /= std::max(1, replicas - 1);
        rows.push_back({n, mean, std::sqrt(var / replicas)});
    }
    return rows;
}

bool event_En(const EdgeEnvironment& env, Coord x, int n, double delta, double rho) {
    if (!(delta > 0) || !(rho > 0)) throw std::invalid_argument("event_En: delta, rho must be > 0");
    if (l1_dist(x, env.box.center) + n > env.box.radius)
        throw std::invalid_argument("event_En: B_n(x) must lie inside the box");
    GridScratch& ws = t_scratch;
    ws.bind(env.box);
    const int64_t boundary_total = 4 * int64_t(n);
    int64_t boundary_settled = 0;
    fpp_detail::run_dijkstra(
        ws, x, [&](Coord u, int dir, Coord) { return env.weight(step_edge(u, dir)); },
        [&](Coord v, double) {
            if (l1_dist(v, x) == n) ++boundary_settled;
            return boundary_settled == boundary_total;
        });
    const double threshold = env.law.ess_inf() + 2.0 * delta;
    // Scan all 4n boundary points, reusing the one shortest-path tree.
    for (int i = 0; i < n; ++i) {
        const Coord offsets[4] = {{int32_t(n - i), int32_t(i)},
                                  {int32_t(-i), int32_t(n - i)},
                                  {int32_t(i - n), int32_t(-i)},
                                  {int32_t(i), int32_t(i - n)}};
        for (const Coord& off : offsets) {
            const Coord y{x.x + off.x, x.y + off.y};
            const auto vertices = fpp_detail::walk_path(ws, x, y);
            int64_t bad = 0;
            for (size_t k = 1; k < vertices.size(); ++k) {
                const Coord a = vertices[k - 1], b = vertices[k];
                const int dir = b.x == a.x + 1 ? 0 : b.x == a.x - 1 ? 2 : b.y == a.y + 1 ? 1 : 3;
                if (env.weight(step_edge(a, dir)) >= threshold) ++bad;
            }
            if (double(bad) < rho * double(n)) return true;
        }
    }
    return false;
}

double geodesic_w_sum(const CoupledEdgeEnvironment& env, Coord x, Coord y) {
    const auto res = passage_with_field(
        t_scratch, env.box, x, y,
        [&](Coord u, int dir, Coord) { return env.field.x(edge_cell(step_edge(u, dir))); });
    double acc = 0;
    for (const Edge& e : res.path) acc += env.field.w(edge_cell(e));
    return acc;
}

PerturbedPassage perturbed_passage(const CoupledEdgeEnvironment& env, Coord x, Coord y) {
    if (!env.box.contains(x) || !env.box.contains(y))
        throw std::invalid_argument("perturbed_passage: endpoints must lie inside the box");
    PerturbedPassage out;
    // Both searches are point-to-point values, so the half-ball bidirectional
    // kernel applies; D only needs one optimal path of the unperturbed field.
    std::vector<Coord> vertices;
    out.t = fpp_detail::bidirectional_passage(
        t_scratch, t_scratch_bwd, env.box, x, y,
        [&](Coord u, int dir, Coord) { return env.field.x(edge_cell(step_edge(u, dir))); },
        &vertices);
    for (size_t i = 1; i < vertices.size(); ++i) {
        const Coord a = vertices[i - 1], b = vertices[i];
        const int dir = b.x == a.x + 1 ? 0 : b.x == a.x - 1 ? 2 : b.y == a.y + 1 ? 1 : 3;
        const Edge e = step_edge(a, dir);
        const auto loc = coupling::Location::at_edge(e);
        if (env.field.y(loc)) out.d_lb += env.field.z(edge_cell(e));
    }
    out.touched_boundary = touches_boundary(env.box, vertices);
    out.t_tilde = fpp_detail::bidirectional_passage(
        t_scratch, t_scratch_bwd, env.box, x, y,
        [&](Coord u, int dir, Coord) {
            return env.field.x_tilde(coupling::Location::at_edge(step_edge(u, dir)));
        },
        nullptr);
    return out;
}

ConfinementResult geodesic_confinement(const EdgeEnvironment& env, double ux, double uy, int n,
                                       double exponent) {
    const Coord target{int32_t(std::floor(n * ux)), int32_t(std::floor(n * uy))};
    const auto res = passage_time(env, {0, 0}, target);
    const double sx = n * ux, sy = n * uy;
    const double len2 = sx * sx + sy * sy;
    ConfinementResult out;
    Coord cur{0, 0};
    auto visit = [&](Coord v) {
        double t = len2 > 0 ? (v.x * sx + v.y * sy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double dev = std::hypot(v.x - t * sx, v.y - t * sy);
        out.max_deviation = std::max(out.max_deviation, dev);
    };
    visit(cur);
    for (const Edge& e : res.path) {
        cur = cur == e.v ? e.other() : e.v;
        visit(cur);
    }
    out.inside = out.max_deviation <= std::pow(double(n), exponent);
    return out;
}

}  // namespace growthlab::fpp
