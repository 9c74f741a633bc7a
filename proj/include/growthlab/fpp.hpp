#pragma once

#include <cstdint>
#include <vector>

#include "growthlab/coupling.hpp"
#include "growthlab/grid.hpp"
#include "growthlab/law.hpp"

// Planar first-passage percolation: passage times and distinguished geodesics
// on a finite box, growth balls, time-constant estimation, and the coupled
// perturbation probes.

namespace growthlab::fpp {

// Lazily evaluated i.i.d. edge-weight field on a box. FPP requires
// nonnegative weights; construction rejects laws with ess inf < 0.
struct EdgeEnvironment {
    Box box;
    WeightLaw law;
    uint64_t seed = 0;

    EdgeEnvironment(Box box, WeightLaw law, uint64_t seed);

    double weight(Edge e) const {
        return law.sample_at(seed, edge_cell(e), rng_domain::kWeight);
    }
};

// A min-coupled edge field plus the box it lives on.
struct CoupledEdgeEnvironment {
    Box box;
    coupling::CoupledField field;

    CoupledEdgeEnvironment(Box box, coupling::CoupledField field);
};

struct PassageResult {
    double value = 0;
    std::vector<Edge> path;                // the distinguished geodesic
    std::vector<double> per_edge_weights;  // in path order; sums to value
    bool touched_boundary = false;         // a geodesic vertex hit the box edge
};

// Minimum passage time between x and y over paths confined to the box.
PassageResult passage_time(const EdgeEnvironment& env, Coord x, Coord y);

// Same, on a coupled environment: the unperturbed X field or the X~ field.
PassageResult passage_time(const CoupledEdgeEnvironment& env, Coord x, Coord y,
                           bool perturbed = false);

struct GrowthBall {
    double t = 0;
    std::vector<Coord> reached;  // T(0, v) <= t
};

// Exact reachable set {v : T(0,v) <= t}. Throws std::runtime_error
// ("ball-hits-boundary") if the ball reaches the box boundary.
GrowthBall growth_ball(const EdgeEnvironment& env, double t);

struct TimeConstantRow {
    int n = 0;
    double mean_t_over_n = 0;
    double se = 0;
};

// Monte Carlo estimate of T(0, [n x]) / n along a direction.
std::vector<TimeConstantRow> time_constant_estimate(const WeightLaw& law, double ux, double uy,
                                                    const std::vector<int>& n_list, int replicas,
                                                    uint64_t seed, int workers = 0);

// Event E_n^x: some boundary point of B_n(x) is reached by a distinguished
// geodesic with fewer than rho * n edges of weight >= essinf + 2 delta.
bool event_En(const EdgeEnvironment& env, Coord x, int n, double delta, double rho);

// Sum of W_e = 1 - exp(-Z_e) along the distinguished geodesic of the
// unperturbed field.
double geodesic_w_sum(const CoupledEdgeEnvironment& env, Coord x, Coord y);

struct PerturbedPassage {
    double t = 0;        // unperturbed passage time
    double t_tilde = 0;  // passage time in the X~ field
    double d_lb = 0;     // sum of 1{Y=1} Z over the unperturbed geodesic
    bool touched_boundary = false;
};

// Pathwise: t_tilde <= t and t - t_tilde >= d_lb >= 0.
PerturbedPassage perturbed_passage(const CoupledEdgeEnvironment& env, Coord x, Coord y);

struct ConfinementResult {
    double max_deviation = 0;  // Euclidean distance from the segment 0 -> n(ux,uy)
    bool inside = false;       // max_deviation <= n^exponent
};

ConfinementResult geodesic_confinement(const EdgeEnvironment& env, double ux, double uy, int n,
                                       double exponent);

// Default search box for a passage-time query: centered on the midpoint with
// radius 3 ||y - x||_1 (generous; boundary contact is flagged).
Box default_box(Coord x, Coord y);

}  // namespace growthlab::fpp
