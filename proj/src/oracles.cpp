#include "growthlab/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace growthlab::oracles {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SapState {
    const Box* box;
    Coord target;
    const EdgeWeightFn* weight;
    std::map<std::pair<int32_t, int32_t>, bool> visited;
    double best = kInf;
};

Edge edge_between(Coord a, Coord b) {
    if (b.x == a.x + 1 && b.y == a.y) return Edge{a, 0};
    if (b.x == a.x - 1 && b.y == a.y) return Edge{b, 0};
    if (b.y == a.y + 1 && b.x == a.x) return Edge{a, 1};
    return Edge{b, 1};
}

void sap_dfs(SapState& st, Coord cur, double acc) {
    if (acc >= st.best) return;  // nonnegative weights prune
    if (cur == st.target) {
        st.best = acc;
        return;
    }
    const Coord steps[4] = {{cur.x + 1, cur.y}, {cur.x, cur.y + 1}, {cur.x - 1, cur.y},
                            {cur.x, cur.y - 1}};
    for (const Coord& nxt : steps) {
        if (!st.box->contains(nxt)) continue;
        auto key = std::make_pair(nxt.x, nxt.y);
        if (st.visited[key]) continue;
        st.visited[key] = true;
        sap_dfs(st, nxt, acc + (*st.weight)(edge_between(cur, nxt)));
        st.visited[key] = false;
    }
}

// Enumerates all directed paths of length n from `start`, invoking
// visit(path_vertices, path_weight_sum) for each.
template <class Visit>
void walk_directed(const VertexWeightFn& weight, Coord start, int n, Visit&& visit) {
    std::vector<Coord> path(size_t(n) + 1);
    path[0] = start;
    // Each path is one 2^n bit pattern: bit i says step i goes e2.
    for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
        Coord cur = start;
        double h = 0;
        for (int i = 0; i < n; ++i) {
            cur = (mask >> i) & 1 ? Coord{cur.x, cur.y + 1} : Coord{cur.x + 1, cur.y};
            path[size_t(i) + 1] = cur;
            h += weight(cur);
        }
        visit(path, h);
    }
}

}  // namespace

double fpp_min_over_paths(const Box& box, Coord x, Coord y, const EdgeWeightFn& weight) {
    if (box.radius > 3) throw std::invalid_argument("fpp oracle: box radius capped at 3");
    if (!box.contains(x) || !box.contains(y))
        throw std::invalid_argument("fpp oracle: endpoints must lie inside the box");
    SapState st;
    st.box = &box;
    st.target = y;
    st.weight = &weight;
    st.visited[{x.x, x.y}] = true;
    sap_dfs(st, x, 0.0);
    return st.best;
}

double lpp_max_over_paths(Coord u, Coord v, const VertexWeightFn& weight) {
    const int a = v.x - u.x, b = v.y - u.y;
    if (a < 0 || b < 0) throw std::invalid_argument("lpp oracle: not-ordered endpoints");
    if (a + b > 20) throw std::invalid_argument("lpp oracle: path length capped at 20");
    if (a + b == 0) return 0.0;
    double best = -kInf;
    const int n = a + b;
    for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
        if (int(__builtin_popcountll(mask)) != b) continue;  // exactly b up-steps
        Coord cur = u;
        double h = 0;
        for (int i = 0; i < n; ++i) {
            cur = (mask >> i) & 1 ? Coord{cur.x, cur.y + 1} : Coord{cur.x + 1, cur.y};
            h += weight(cur);
        }
        best = std::max(best, h);
    }
    return best;
}

double polymer_logz(const VertexWeightFn& weight, double beta, int n) {
    if (n > 20) throw std::invalid_argument("polymer oracle: n capped at 20");
    std::vector<double> hs;
    hs.reserve(size_t(1) << n);
    walk_directed(weight, {0, 0}, n, [&](const std::vector<Coord>&, double h) {
        hs.push_back(beta * h);
    });
    const double m = *std::max_element(hs.begin(), hs.end());
    double acc = 0;
    for (double h : hs) acc += std::exp(h - m);
    return m + std::log(acc);
}

std::vector<double> polymer_endpoint(const VertexWeightFn& weight, double beta, int n) {
    if (n > 20) throw std::invalid_argument("polymer oracle: n capped at 20");
    std::vector<double> hs;
    std::vector<int> ends;
    walk_directed(weight, {0, 0}, n, [&](const std::vector<Coord>& path, double h) {
        hs.push_back(beta * h);
        ends.push_back(path.back().x);
    });
    const double m = *std::max_element(hs.begin(), hs.end());
    std::vector<double> probs(size_t(n) + 1, 0.0);
    double z = 0;
    for (size_t k = 0; k < hs.size(); ++k) {
        const double w = std::exp(hs[k] - m);
        probs[size_t(ends[k])] += w;
        z += w;
    }
    for (double& p : probs) p /= z;
    return probs;
}

std::vector<std::vector<double>> polymer_occupation(const VertexWeightFn& weight, double beta,
                                                    int n) {
    if (n > 20) throw std::invalid_argument("polymer oracle: n capped at 20");
    std::vector<std::vector<double>> occ(size_t(n) + 1);
    for (int l = 0; l <= n; ++l) occ[size_t(l)].assign(size_t(l) + 1, 0.0);
    double z = 0;
    std::vector<double> hs;
    std::vector<std::vector<Coord>> paths;
    walk_directed(weight, {0, 0}, n, [&](const std::vector<Coord>& path, double h) {
        hs.push_back(beta * h);
        paths.push_back(path);
    });
    const double m = *std::max_element(hs.begin(), hs.end());
    for (size_t k = 0; k < hs.size(); ++k) {
        const double w = std::exp(hs[k] - m);
        z += w;
        for (const Coord& v : paths[k]) occ[size_t(v.x + v.y)][size_t(v.x)] += w;
    }
    for (auto& level : occ)
        for (double& p : level) p /= z;
    return occ;
}

double polymer_gibbs_average_diff(const VertexWeightFn& weight, const VertexWeightFn& weight_tilde,
                                  double beta, int n) {
    if (n > 20) throw std::invalid_argument("polymer oracle: n capped at 20");
    std::vector<double> hs, diffs;
    walk_directed(weight, {0, 0}, n, [&](const std::vector<Coord>& path, double h) {
        hs.push_back(beta * h);
        double ht = 0;
        for (size_t i = 1; i < path.size(); ++i) ht += weight_tilde(path[i]);
        diffs.push_back(beta * ht - beta * h);
    });
    const double m = *std::max_element(hs.begin(), hs.end());
    double z = 0, acc = 0;
    for (size_t k = 0; k < hs.size(); ++k) {
        const double w = std::exp(hs[k] - m);
        z += w;
        acc += w * diffs[k];
    }
    return acc / z;
}

int min_closed_sites_brute(const std::function<bool(Coord)>& closed, int n) {
    if (n > 12) throw std::invalid_argument("min_closed_sites oracle: n capped at 12");
    int best = n + 1;
    for (int sx = 0; sx <= n; ++sx) {
        for (int sy = 0; sx + sy <= n; ++sy) {
            for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
                Coord cur{sx, sy};
                int cnt = 0;
                for (int i = 0; i < n; ++i) {
                    cur = (mask >> i) & 1 ? Coord{cur.x, cur.y + 1} : Coord{cur.x + 1, cur.y};
                    if (closed(cur)) ++cnt;
                }
                best = std::min(best, cnt);
            }
        }
    }
    return best;
}

double min_w_sum_brute(const VertexWeightFn& w, int n) {
    if (n > 12) throw std::invalid_argument("min_w_sum oracle: n capped at 12");
    double best = kInf;
    for (int sx = 0; sx <= n; ++sx) {
        const int sy = n - sx;
        for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
            Coord cur{sx, sy};
            double acc = 0;
            for (int i = 0; i < n; ++i) {
                cur = (mask >> i) & 1 ? Coord{cur.x, cur.y + 1} : Coord{cur.x + 1, cur.y};
                acc += w(cur);
            }
            best = std::min(best, acc);
        }
    }
    return best;
}

}  // namespace growthlab::oracles
