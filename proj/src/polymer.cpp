#include "growthlab/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace growthlab::polymer {

namespace {

double logaddexp(double a, double b) {
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

void require_params(double beta, int n) {
    if (!(beta > 0)) throw std::invalid_argument("polymer: beta must be > 0");
    if (n < 1) throw std::invalid_argument("polymer: n must be >= 1");
}

template <class WeightF>
PolymerForward forward_impl(WeightF&& weight, double beta, int n) {
    PolymerForward fwd;
    fwd.beta = beta;
    fwd.n = n;
    fwd.levels.resize(size_t(n) + 1);
    fwd.levels[0] = {0.0};
    for (int l = 1; l <= n; ++l) {
        auto& cur = fwd.levels[size_t(l)];
        const auto& prev = fwd.levels[size_t(l) - 1];
        cur.resize(size_t(l) + 1);
        for (int i = 0; i <= l; ++i) {
            double acc;
            if (i == 0) acc = prev[0];
            else if (i == l) acc = prev[size_t(l) - 1];
            else acc = logaddexp(prev[size_t(i) - 1], prev[size_t(i)]);
            cur[size_t(i)] = beta * weight(Coord{i, l - i}) + acc;
        }
    }
    return fwd;
}

double lse_over(const std::vector<double>& v) {
    double m = v[0];
    for (double x : v) m = std::max(m, x);
    double acc = 0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

}  // namespace

double PolymerForward::log_partition() const { return lse_over(levels.back()); }

PolymerForward forward_recursion(const lpp::VertexEnvironment& env, double beta, int n) {
    require_params(beta, n);
    return forward_impl([&](Coord v) { return env.weight(v); }, beta, n);
}

double free_energy(const lpp::VertexEnvironment& env, double beta, int n) {
    return forward_recursion(env, beta, n).log_partition();
}

double free_energy_point_to_point(const lpp::VertexEnvironment& env, double beta, Coord v) {
    require_params(beta, std::max(1, int(v.x + v.y)));
    if (v.x < 0 || v.y < 0)
        throw std::invalid_argument("not-ordered: endpoint must lie in the first quadrant");
    const int a = v.x, b = v.y;
    std::vector<double> row(size_t(a) + 1);
    row[0] = 0.0;
    for (int i = 1; i <= a; ++i) row[size_t(i)] = row[size_t(i) - 1] + beta * env.weight(Coord{i, 0});
    for (int j = 1; j <= b; ++j) {
        row[0] += beta * env.weight(Coord{0, j});
        for (int i = 1; i <= a; ++i)
            row[size_t(i)] =
                beta * env.weight(Coord{i, j}) + logaddexp(row[size_t(i) - 1], row[size_t(i)]);
    }
    return row[size_t(a)];
}

double EndpointDistribution::max_atom() const {
    double m = 0;
    for (double p : probs) m = std::max(m, p);
    return m;
}

EndpointDistribution endpoint_distribution(const lpp::VertexEnvironment& env, double beta, int n) {
    const PolymerForward fwd = forward_recursion(env, beta, n);
    const double logz = fwd.log_partition();
    EndpointDistribution dist;
    dist.n = n;
    dist.probs.resize(size_t(n) + 1);
    for (int i = 0; i <= n; ++i) dist.probs[size_t(i)] = std::exp(fwd.levels.back()[size_t(i)] - logz);
    return dist;
}

double OccupationGrid::at(Coord v) const {
    const int l = int(v.x + v.y);
    if (v.x < 0 || v.y < 0 || l > n) return 0.0;
    return level_probs[size_t(l)][size_t(v.x)];
}

namespace {

template <class WeightF>
OccupationGrid occupation_impl(WeightF&& weight, double beta, int n) {
    const PolymerForward fwd = forward_impl(weight, beta, n);
    const double logz = fwd.log_partition();
    // Backward pass: logb[l][i] = log partition of continuations from (i, l-i).
    std::vector<std::vector<double>> logb(size_t(n) + 1);
    logb[size_t(n)].assign(size_t(n) + 1, 0.0);
    for (int l = n - 1; l >= 0; --l) {
        auto& cur = logb[size_t(l)];
        const auto& next = logb[size_t(l) + 1];
        cur.resize(size_t(l) + 1);
        for (int i = 0; i <= l; ++i) {
            const double via_e1 = beta * weight(Coord{i + 1, l - i}) + next[size_t(i) + 1];
            const double via_e2 = beta * weight(Coord{i, l - i + 1}) + next[size_t(i)];
            cur[size_t(i)] = logaddexp(via_e1, via_e2);
        }
    }
    OccupationGrid grid;
    grid.n = n;
    grid.level_probs.resize(size_t(n) + 1);
    for (int l = 0; l <= n; ++l) {
        grid.level_probs[size_t(l)].resize(size_t(l) + 1);
        for (int i = 0; i <= l; ++i)
            grid.level_probs[size_t(l)][size_t(i)] =
                std::exp(fwd.levels[size_t(l)][size_t(i)] + logb[size_t(l)][size_t(i)] - logz);
    }
    return grid;
}

}  // namespace

OccupationGrid occupation_probabilities(const lpp::VertexEnvironment& env, double beta, int n) {
    require_params(beta, n);
    return occupation_impl([&](Coord v) { return env.weight(v); }, beta, n);
}

PerturbedFreeEnergy perturbed_free_energy(const coupling::CoupledField& field, double beta, int n) {
    require_params(beta, n);
    if (field.spec().kind != CouplingKind::Max)
        throw std::invalid_argument("perturbed_free_energy requires max-coupling");
    PerturbedFreeEnergy out;
    const auto x = [&](Coord v) { return field.x(vertex_cell(v)); };
    out.log_z = forward_impl(x, beta, n).log_partition();
    out.log_z_tilde =
        forward_impl([&](Coord v) { return field.x_tilde(coupling::Location::at_site(v)); }, beta, n)
            .log_partition();
    const OccupationGrid occ = occupation_impl(x, beta, n);
    for (int l = 1; l <= n; ++l) {
        for (int i = 0; i <= l; ++i) {
            const Coord v{i, l - i};
            const auto loc = coupling::Location::at_site(v);
            if (field.y(loc)) out.jensen_lb += beta * field.z(vertex_cell(v)) * occ.at(v);
        }
    }
    return out;
}

}  // namespace growthlab::polymer
