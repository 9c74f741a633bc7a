#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "growthlab/rng.hpp"

// Weight distributions with exact analytic access: closed-form CDFs, atom
// probabilities, essential bounds, and single-uniform quantile sampling.
// Sampling is inverse-CDF throughout, so one (seed, cell, channel) uniform
// fully determines a draw and coupled fields can be replayed lazily.

namespace growthlab {

enum class LawKind {
    Exponential,       // rate > 0
    Geometric,         // p in (0,1); support {0,1,2,...}, P(X=k) = p(1-p)^k
    BernoulliTwoPoint, // a < b, p = P(value = a)
    Uniform,           // lo < hi
    FiniteDiscrete,    // sorted atoms, simplex probs
    Gamma,             // shape > 0, scale > 0
};

const char* law_kind_name(LawKind kind);

struct WeightLaw {
    LawKind kind = LawKind::Exponential;
    double offset = 0.0;

    // Parameters (used according to kind).
    double rate = 1.0;             // Exponential
    double p = 0.5;                // Geometric, BernoulliTwoPoint
    double a = 0.0, b = 1.0;       // BernoulliTwoPoint values; Uniform lo/hi
    double shape = 1.0, scale = 1.0;  // Gamma
    std::vector<double> atoms;     // FiniteDiscrete
    std::vector<double> probs;

    static WeightLaw exponential(double rate, double offset = 0.0);
    static WeightLaw geometric(double p, double offset = 0.0);
    static WeightLaw bernoulli_two_point(double a, double b, double p, double offset = 0.0);
    static WeightLaw uniform(double lo, double hi, double offset = 0.0);
    static WeightLaw finite_discrete(std::vector<double> atoms, std::vector<double> probs,
                                     double offset = 0.0);
    static WeightLaw gamma(double shape, double scale, double offset = 0.0);
    static WeightLaw point_mass(double c);

    // Throws std::invalid_argument on malformed parameters.
    void validate() const;

    double cdf(double t) const;                 // P(X <= t), exact
    double quantile(double u) const;            // u in [0,1)
    double ess_inf() const;
    double ess_sup() const;                     // +inf for unbounded kinds
    double mean() const;
    double atom_at(double t) const;             // P(X = t); 0 for continuous kinds
    bool is_discrete() const;
    bool nonnegative() const { return ess_inf() >= 0.0; }

    double sample(RngStream& stream) const { return quantile(stream.next_u01()); }
    double sample_at(uint64_t seed, uint64_t cell, uint32_t channel) const {
        return quantile(rng_u01(seed, cell, channel));
    }

    std::string describe() const;
};

// CDF of min(X, X^(1), ..., X^(m)): 1 - (1 - F(t))^{m+1}.
double min_of_m_cdf(const WeightLaw& law, int m, double t);

// Percolation thresholds used by the distributional condition checks.
// p_c(Z^2) = 1/2 exactly; the directed values are rigorous upper bounds,
// with the non-rigorous directed-bond estimate reported informationally.
namespace thresholds {
inline constexpr double kUndirectedBond = 0.5;
inline constexpr double kDirectedBondUpper = 0.6735;
inline constexpr double kDirectedBondEstimate = 0.6445;
inline constexpr double kDirectedSiteUpper = 0.75;
}  // namespace thresholds

enum class MomentFlag { KnownFinite, KnownInfinite, Unknown };

struct ConditionReport {
    double atom_at_essinf = 0.0;
    double atom_at_esssup = 0.0;
    bool passes_undirected = false;     // atom at essinf vs 1/2
    bool passes_directed_bond = false;  // atom at essinf vs 0.6735
    bool passes_directed_site = false;  // atom at esssup vs 3/4
    MomentFlag moment_flag_min4_sq = MomentFlag::Unknown;  // E min(X^(1..4))^2 < inf
};

ConditionReport check_conditions(const WeightLaw& law);

// Smallest m >= 1 with P(min of m copies <= essinf + delta) > 1 - (1/3)^{1/rho}.
// Throws std::domain_error when F(essinf + delta) = 0 (non-calibratable).
int calibrate_m(const WeightLaw& law, double delta, double rho);

// Regularized lower incomplete gamma P(a, x); exposed for tests.
double reg_lower_gamma(double a, double x);

}  // namespace growthlab
