#pragma once

#include <cstdint>
#include <vector>

#include "growthlab/coupling.hpp"
#include "growthlab/grid.hpp"
#include "growthlab/law.hpp"

// Corner growth model: last-passage times over up/right paths with vertex
// weights (sign-unrestricted), the directed-site-percolation min-plus probe,
// and the max-coupled perturbation experiment. Path sums exclude the start
// vertex: T(u, u) = 0 and T(u, v) includes X_v but never X_u.

namespace growthlab::lpp {

struct VertexEnvironment {
    WeightLaw law;
    uint64_t seed = 0;
    int extent = 0;  // queries are confined to [0, extent]^2

    VertexEnvironment(WeightLaw law, uint64_t seed, int extent);

    double weight(Coord v) const {
        return law.sample_at(seed, vertex_cell(v), rng_domain::kWeight);
    }
};

struct LppResult {
    double value = 0;
    std::vector<Coord> path;                 // gamma_0 = u .. gamma_N = v
    std::vector<double> per_vertex_weights;  // over path[1..]; sums to value
};

// Maximum passage time of a directed path from u to v. Throws
// std::invalid_argument ("not-ordered") when v - u has a negative coordinate.
// Maximizer ties prefer the e1 predecessor.
LppResult last_passage(const VertexEnvironment& env, Coord u, Coord v);

// Value-only row sweep with O(n) memory.
double last_passage_value(const VertexEnvironment& env, Coord u, Coord v);

// Max over endpoints on the anti-diagonal level n of T(0, v).
double last_passage_to_line(const VertexEnvironment& env, int n);

// Directed site percolation with open probability p: the exact minimum,
// over all directed paths (v_0, ..., v_n) with ||v_0||_1 <= n, of the number
// of closed sites among v_1..v_n. E_n holds iff this minimum is < rho n.
int min_closed_sites(double p, int n, uint64_t seed);

// Exact minimum of sum W_{v_i} over directed paths of length n started on
// the shell ||v_0||_1 = n (max-coupled field).
double min_w_sum_directed(const coupling::CoupledField& field, int n);

struct PerturbedLpp {
    double t = 0;
    double t_tilde = 0;
    double d_lb = 0;  // sum of 1{Y=1} Z over the unperturbed maximizer
};

// Pathwise: t_tilde >= t and t_tilde - t >= d_lb >= 0. Requires max coupling.
PerturbedLpp perturbed_lpp(const coupling::CoupledField& field, Coord v);

// Picks S' with P(X >= S' - 2 delta) < tail_prob, the truncation step used
// when ess sup X = infinity.
double choose_s_prime(const WeightLaw& law, double delta, double tail_prob);

}  // namespace growthlab::lpp
