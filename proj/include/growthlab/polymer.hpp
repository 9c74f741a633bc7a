#pragma once

#include <cstdint>
#include <vector>

#include "growthlab/coupling.hpp"
#include "growthlab/lpp.hpp"

// Directed polymers in 1+1 dimensions: stable free-energy recursions (pairwise
// log-sum-exp throughout, so |beta X| up to ~700 per site never overflows),
// exact Gibbs endpoint/occupation marginals via forward-backward passes, and
// the max-coupled perturbation experiment with its Jensen lower bound.
// Hamiltonians exclude the origin weight: H(gamma) = sum_{i>=1} X_{gamma_i}.

namespace growthlab::polymer {

// Forward log-weights per anti-diagonal level: levels[l][i] is the log of the
// partition restricted to paths ending at (i, l - i).
struct PolymerForward {
    double beta = 1.0;
    int n = 0;
    std::vector<std::vector<double>> levels;

    double log_partition() const;  // over the final level
};

PolymerForward forward_recursion(const lpp::VertexEnvironment& env, double beta, int n);

// log Z_n^beta over all directed paths of length n from the origin.
double free_energy(const lpp::VertexEnvironment& env, double beta, int n);

// Point-to-point variant: log of the partition restricted to paths 0 -> v.
double free_energy_point_to_point(const lpp::VertexEnvironment& env, double beta, Coord v);

struct EndpointDistribution {
    int n = 0;
    std::vector<double> probs;  // over endpoints (i, n - i), i = 0..n

    double max_atom() const;  // the localization statistic
};

EndpointDistribution endpoint_distribution(const lpp::VertexEnvironment& env, double beta, int n);

// P(v in gamma) for every v within n steps, by level; each level sums to 1.
struct OccupationGrid {
    int n = 0;
    std::vector<std::vector<double>> level_probs;  // level_probs[l][i], l = 0..n

    double at(Coord v) const;
};

OccupationGrid occupation_probabilities(const lpp::VertexEnvironment& env, double beta, int n);

struct PerturbedFreeEnergy {
    double log_z = 0;
    double log_z_tilde = 0;
    double jensen_lb = 0;  // beta * sum_v 1{Y_v} Z_v P(v in gamma) >= 0
};

// Pathwise: log_z_tilde - log_z >= jensen_lb >= 0. Requires max coupling.
PerturbedFreeEnergy perturbed_free_energy(const coupling::CoupledField& field, double beta, int n);

}  // namespace growthlab::polymer
