#pragma once

#include <functional>
#include <vector>

#include "growthlab/grid.hpp"

// Exhaustive-enumeration reference implementations. These are the serial
// oracles the optimized kernels are tested against: self-avoiding-path
// enumeration for FPP on small boxes, directed-path enumeration for LPP, and
// full path enumeration for polymer partition functions. Deliberately simple
// and slow; sizes are capped accordingly.

namespace growthlab::oracles {

using EdgeWeightFn = std::function<double(Edge)>;
using VertexWeightFn = std::function<double(Coord)>;

// Minimum passage time over all self-avoiding paths from x to y inside the
// box. Intended for boxes of radius <= 3.
double fpp_min_over_paths(const Box& box, Coord x, Coord y, const EdgeWeightFn& weight);

// Maximum passage time over all directed paths u -> v (start excluded from
// the sum). Intended for targets with (v - u) total steps <= 12.
double lpp_max_over_paths(Coord u, Coord v, const VertexWeightFn& weight);

// Directed polymer quantities over all 2^n paths of length n from the origin.
double polymer_logz(const VertexWeightFn& weight, double beta, int n);
std::vector<double> polymer_endpoint(const VertexWeightFn& weight, double beta, int n);
// P(v in gamma) per level, level_probs[l][i] for v = (i, l - i).
std::vector<std::vector<double>> polymer_occupation(const VertexWeightFn& weight, double beta,
                                                    int n);
// Gibbs average sum_gamma rho(gamma) (H~(gamma) - H(gamma)) under the base
// weights, for the Jensen bound oracle.
double polymer_gibbs_average_diff(const VertexWeightFn& weight, const VertexWeightFn& weight_tilde,
                                  double beta, int n);

// Brute-force minimum closed-site count over directed paths (v_0..v_n) with
// ||v_0||_1 <= n; `closed` decides each site. Intended for n <= 10.
int min_closed_sites_brute(const std::function<bool(Coord)>& closed, int n);

// Brute-force minimum of sum W over directed paths of length n starting on
// the shell ||v_0||_1 = n.
double min_w_sum_brute(const VertexWeightFn& w, int n);

}  // namespace growthlab::oracles
