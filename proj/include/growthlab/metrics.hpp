#pragma once

#include <span>
#include <vector>

#include "growthlab/law.hpp"

// Probability-distance computations: exact Hellinger affinity and total
// variation on discrete laws, the shortest-interval fluctuation statistic,
// and the coupled-bound evaluator P(a<=X<=b) <= (1 + P(|X-Y|<=b-a) + d_tv)/2.

namespace growthlab {

// Which extreme of m extra copies defines the perturbed variable X':
// min for first-passage (lowers weights), max for LPP/polymers (raises them).
enum class CouplingKind { Min, Max };

namespace metrics {

struct DiscreteLaw {
    std::vector<double> atoms;  // strictly increasing
    std::vector<double> probs;  // >= 0, sum 1 within 1e-12

    void validate() const;
    static DiscreteLaw make(std::vector<double> atoms, std::vector<double> probs);
};

// sum_t sqrt(p(t) q(t)) over the union support; 1 iff p == q.
double hellinger_affinity(const DiscreteLaw& p, const DiscreteLaw& q);

// (1/2) sum_t |p(t) - q(t)|.
double tv_distance(const DiscreteLaw& p, const DiscreteLaw& q);

// Law of X~ = eps q + (1-eps) p.
DiscreteLaw mixture_with(const DiscreteLaw& p, const DiscreteLaw& q, double eps);

struct QuadraticCheckRow {
    double eps;
    double one_minus_rho;
    double ratio;  // (1 - rho) / eps^2
};

struct QuadraticCheck {
    std::vector<QuadraticCheckRow> rows;
    // (1/8) sum_t (1 - g(t))^2 p(t) with g = dq/dp; the eps -> 0 limit of ratio.
    double analytic_limit = 0.0;
};

// Requires q absolutely continuous w.r.t. p (throws std::invalid_argument
// with "support-violation" otherwise).
QuadraticCheck affinity_quadratic_check(const DiscreteLaw& p, const DiscreteLaw& q,
                                        std::span<const double> eps_grid);

struct IntervalEstimate {
    double a = 0;
    double b = 0;
    double mass = 0;   // empirical fraction of samples in [a,b]
    double width = 0;  // b - a
};

// Shortest interval over the order statistics containing ceil(mass * N)
// samples; ties broken by the smallest left endpoint. Requires N >= 2 and
// mass in (0,1).
IntervalEstimate fluctuation_interval(std::span<const double> samples, double mass);

struct CoupledBound {
    double lhs = 0;        // empirical P(a <= X <= b)
    double rhs = 0;        // (1 + empirical P(|X-Y| <= b-a) + tv) / 2
    double slack = 0;      // 3 * combined Monte Carlo standard error
    bool satisfied = false;
};

CoupledBound coupled_interval_bound(std::span<const double> x_samples,
                              std::span<const double> absdiff_samples, double a, double b,
                              double tv);

// Hellinger affinity between the law of X and the law of the Bernoulli(eps)
// mixture X~ built from the min/max-of-m coupling. Exact atom summation for
// discrete laws; for atomless laws the affinity reduces, via the quantile
// substitution u = F(t), to the law-free integral
//   int_0^1 sqrt(eps (m+1) u^m + 1 - eps) du,
// evaluated by adaptive quadrature to 1e-9 absolute. With lower_bound = true
// the result is a certified lower bound on the true affinity (quadrature
// estimate minus tolerance; truncated tails dropped), so TV bounds built on
// it stay rigorous upper bounds.
double coupling_affinity(const WeightLaw& law, CouplingKind kind, int m, double eps,
                         bool lower_bound = false);

}  // namespace metrics
}  // namespace growthlab
