#include "growthlab/lpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace growthlab::lpp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_ordered(Coord u, Coord v) {
    if (v.x < u.x || v.y < u.y)
        throw std::invalid_argument("not-ordered: target must dominate the start coordinatewise");
}

template <class WeightF>
double sweep_value(Coord u, Coord v, WeightF&& weight) {
    const int a = v.x - u.x, b = v.y - u.y;
    std::vector<double> row(size_t(a) + 1);
    row[0] = 0.0;
    for (int i = 1; i <= a; ++i) row[size_t(i)] = row[size_t(i) - 1] + weight(Coord{u.x + i, u.y});
    for (int j = 1; j <= b; ++j) {
        row[0] += weight(Coord{u.x, u.y + j});
        for (int i = 1; i <= a; ++i) {
            const double w = weight(Coord{u.x + i, u.y + j});
            row[size_t(i)] = w + std::max(row[size_t(i) - 1], row[size_t(i)]);
        }
    }
    return row[size_t(a)];
}

}  // namespace

VertexEnvironment::VertexEnvironment(WeightLaw law_, uint64_t seed_, int extent_)
    : law(std::move(law_)), seed(seed_), extent(extent_) {
    law.validate();
    if (extent < 1) throw std::invalid_argument("VertexEnvironment: extent must be >= 1");
}

double last_passage_value(const VertexEnvironment& env, Coord u, Coord v) {
    require_ordered(u, v);
    return sweep_value(u, v, [&](Coord w) { return env.weight(w); });
}

LppResult last_passage(const VertexEnvironment& env, Coord u, Coord v) {
    require_ordered(u, v);
    const int a = v.x - u.x, b = v.y - u.y;
    LppResult res;
    if (a == 0 && b == 0) return res;  // empty sum

    // Full sweep with a predecessor bit per cell (0: from e1/left, 1: from e2/below).
    std::vector<double> row(size_t(a) + 1);
    std::vector<uint8_t> pred((size_t(a) + 1) * (size_t(b) + 1), 0);
    row[0] = 0.0;
    for (int i = 1; i <= a; ++i) {
        row[size_t(i)] = row[size_t(i) - 1] + env.weight(Coord{u.x + i, u.y});
        pred[size_t(i)] = 0;
    }
    for (int j = 1; j <= b; ++j) {
        row[0] += env.weight(Coord{u.x, u.y + j});
        pred[size_t(j) * (size_t(a) + 1)] = 1;
        for (int i = 1; i <= a; ++i) {
            const double w = env.weight(Coord{u.x + i, u.y + j});
            const double from_left = row[size_t(i) - 1];
            const double from_below = row[size_t(i)];
            // Ties prefer the e1 predecessor.
            const bool below = from_below > from_left;
            row[size_t(i)] = w + (below ? from_below : from_left);
            pred[size_t(j) * (size_t(a) + 1) + size_t(i)] = below ? 1 : 0;
        }
    }
    res.value = row[size_t(a)];

    std::vector<Coord> rev;
    Coord cur = v;
    while (!(cur == u)) {
        rev.push_back(cur);
        const uint8_t p = pred[size_t(cur.y - u.y) * (size_t(a) + 1) + size_t(cur.x - u.x)];
        cur = p == 0 ? Coord{cur.x - 1, cur.y} : Coord{cur.x, cur.y - 1};
    }
    rev.push_back(u);
    res.path.assign(rev.rbegin(), rev.rend());
    res.per_vertex_weights.reserve(res.path.size() - 1);
    for (size_t i = 1; i < res.path.size(); ++i)
        res.per_vertex_weights.push_back(env.weight(res.path[i]));
    return res;
}

double last_passage_to_line(const VertexEnvironment& env, int n) {
    if (n < 1) throw std::invalid_argument("last_passage_to_line: n must be >= 1");
    // Level-by-level over anti-diagonals; level l holds (i, l - i), i = 0..l.
    std::vector<double> prev{0.0}, cur;
    for (int l = 1; l <= n; ++l) {
        cur.assign(size_t(l) + 1, kNegInf);
        for (int i = 0; i <= l; ++i) {
            double best = kNegInf;
            if (i >= 1) best = prev[size_t(i) - 1];          // from (i-1, l-i) via e1
            if (i <= l - 1) best = std::max(best, prev[size_t(i)]);  // via e2
            cur[size_t(i)] = env.weight(Coord{i, l - i}) + best;
        }
        std::swap(prev, cur);
    }
    double best = kNegInf;
    for (double v : prev) best = std::max(best, v);
    return best;
}

int min_closed_sites(double p, int n, uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("min_closed_sites: p must be in [0,1]");
    if (n < 1) throw std::invalid_argument("min_closed_sites: n must be >= 1");
    const auto closed = [&](int x, int y) {
        return rng_u01(seed, vertex_cell(Coord{x, y}), rng_domain::kSite) >= p;
    };
    // G_t(v) = min closed sites among the last t steps of a directed path
    // ending at v. One triangular array updated in place for t = 1..n: shells
    // are processed in descending order so shell l-1 still holds G_{t-1}.
    const int top = 2 * n;
    const auto idx = [&](int l, int x) { return size_t(l) * (size_t(l) + 1) / 2 + size_t(x); };
    std::vector<int32_t> g(idx(top, top) + 1, 0);
    for (int t = 1; t <= n; ++t) {
        for (int l = top; l >= t; --l) {
            // Shells l >= t >= 1 always have at least one predecessor.
            for (int x = l; x >= 0; --x) {
                const int y = l - x;
                int32_t best = std::numeric_limits<int32_t>::max();
                if (x >= 1) best = g[idx(l - 1, x - 1)];
                if (y >= 1) best = std::min(best, g[idx(l - 1, x)]);
                g[idx(l, x)] = best + (closed(x, y) ? 1 : 0);
            }
        }
    }
    int32_t best = std::numeric_limits<int32_t>::max();
    for (int l = n; l <= top; ++l)
        for (int x = 0; x <= l; ++x) best = std::min(best, g[idx(l, x)]);
    return int(best);
}

double min_w_sum_directed(const coupling::CoupledField& field, int n) {
    if (field.spec().kind != CouplingKind::Max)
        throw std::invalid_argument("min_w_sum_directed requires max-coupling");
    if (n < 1) throw std::invalid_argument("min_w_sum_directed: n must be >= 1");
    // Paths of length n starting on the shell ||v_0||_1 = n; cost excludes the start.
    std::vector<double> prev(size_t(n) + 1, 0.0), cur;
    for (int l = n + 1; l <= 2 * n; ++l) {
        cur.assign(size_t(l) + 1, 0.0);
        for (int i = 0; i <= l; ++i) {
            const int y = l - i;
            double best = std::numeric_limits<double>::infinity();
            if (i >= 1) best = prev[size_t(i) - 1];
            if (y >= 1 && i < l) best = std::min(best, prev[size_t(i)]);
            cur[size_t(i)] = best + field.w(vertex_cell(Coord{i, y}));
        }
        std::swap(prev, cur);
    }
    double best = std::numeric_limits<double>::infinity();
    for (double v : prev) best = std::min(best, v);
    return best;
}

PerturbedLpp perturbed_lpp(const coupling::CoupledField& field, Coord v) {
    if (field.spec().kind != CouplingKind::Max)
        throw std::invalid_argument("perturbed_lpp requires max-coupling");
    require_ordered({0, 0}, v);
    PerturbedLpp out;

    // Unperturbed sweep with predecessors, for the distinguished maximizer.
    const int a = v.x, b = v.y;
    std::vector<double> row(size_t(a) + 1);
    std::vector<uint8_t> pred((size_t(a) + 1) * (size_t(b) + 1), 0);
    row[0] = 0.0;
    for (int i = 1; i <= a; ++i) row[size_t(i)] = row[size_t(i) - 1] + field.x(vertex_cell(Coord{i, 0}));
    for (int j = 1; j <= b; ++j) {
        row[0] += field.x(vertex_cell(Coord{0, j}));
        pred[size_t(j) * (size_t(a) + 1)] = 1;
        for (int i = 1; i <= a; ++i) {
            const double w = field.x(vertex_cell(Coord{i, j}));
            const bool below = row[size_t(i)] > row[size_t(i) - 1];
            row[size_t(i)] = w + (below ? row[size_t(i)] : row[size_t(i) - 1]);
            pred[size_t(j) * (size_t(a) + 1) + size_t(i)] = below ? 1 : 0;
        }
    }
    out.t = row[size_t(a)];

    Coord cur = v;
    while (!(cur == Coord{0, 0})) {
        const auto loc = coupling::Location::at_site(cur);
        if (field.y(loc)) out.d_lb += field.z(vertex_cell(cur));
        const uint8_t p = pred[size_t(cur.y) * (size_t(a) + 1) + size_t(cur.x)];
        cur = p == 0 ? Coord{cur.x - 1, cur.y} : Coord{cur.x, cur.y - 1};
    }

    out.t_tilde = sweep_value({0, 0}, v, [&](Coord w) {
        return field.x_tilde(coupling::Location::at_site(w));
    });
    return out;
}

double choose_s_prime(const WeightLaw& law, double delta, double tail_prob) {
    if (!(delta > 0)) throw std::invalid_argument("choose_s_prime: delta must be > 0");
    if (!(tail_prob > 0 && tail_prob < 1))
        throw std::invalid_argument("choose_s_prime: tail_prob must be in (0,1)");
    const double sup = law.ess_sup();
    if (std::isfinite(sup)) return sup;
    // P(X >= q + 1) <= P(X > q) <= tail_prob / 2 < tail_prob.
    const double q = law.quantile(1.0 - 0.5 * tail_prob);
    return q + 1.0 + 2.0 * delta;
}

}  // namespace growthlab::lpp
