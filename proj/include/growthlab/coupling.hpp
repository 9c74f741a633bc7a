#pragma once

#include <cstdint>
#include <vector>

#include "growthlab/grid.hpp"
#include "growthlab/law.hpp"
#include "growthlab/metrics.hpp"

// Coupling constructions: X' as the min/max over m extra i.i.d. copies, the
// Bernoulli(eps) mixture X~, per-site epsilon schedules, and the exact
// product-affinity total-variation budget between the unperturbed and
// perturbed weight fields.

namespace growthlab::coupling {

struct CouplingSpec {
    CouplingKind kind = CouplingKind::Min;
    int m = 1;

    void validate() const;
};

enum class ScheduleKind {
    FppRadial,  // alpha / ((||e|| + 1) sqrt(log n))
    LppRadial,  // alpha / (||v||_1 sqrt(log n)); the origin is never perturbed
    Uniform,    // constant alpha
    FppBox,     // constant alpha * n^{-7/8 - delta}
};

const char* schedule_kind_name(ScheduleKind kind);

// Emitted probabilities are clamped to [0, 1 - 2^-32]: the radial formulas can
// exceed 1 at small n, and the mixture needs eps < 1.
inline constexpr double kEpsilonClamp = 1.0 - 0x1.0p-32;

struct EpsilonSchedule {
    ScheduleKind kind = ScheduleKind::Uniform;
    double alpha = 0.0;
    double n = 2.0;      // scale; requires log n > 0
    double delta = 0.0;  // FppBox exponent tweak

    void validate() const;
};

// A perturbation location: either a lattice edge (FPP) or a site (LPP/polymer).
struct Location {
    bool is_edge = false;
    Edge edge{};
    Coord site{};

    static Location at_edge(Edge e) { return Location{true, e, {}}; }
    static Location at_site(Coord v) { return Location{false, {}, v}; }
};

double epsilon_at(const EpsilonSchedule& schedule, const Location& loc);

// The set of perturbed locations of an experiment; everything outside keeps
// its unperturbed weight.
struct Region {
    enum class Kind { EdgeBall, SiteRect, SiteTriangle, SiteCount, EdgeTube };
    Kind kind = Kind::EdgeBall;
    int64_t radius = 0;         // EdgeBall: edges with dist_origin <= radius
    Coord corner{};             // SiteRect: [0, corner] minus the origin
    int levels = 0;             // SiteTriangle: levels 1..levels
    int64_t count = 0;          // SiteCount: that many interchangeable sites
    int segment_n = 0;          // EdgeTube: segment from 0 to n * (ux, uy)
    double tube_halfwidth = 0;  // EdgeTube: Euclidean distance to the segment
    double ux = 1.0, uy = 0.0;

    static Region edge_ball(int64_t radius);
    static Region site_rect(Coord corner);
    static Region site_triangle(int levels);
    static Region site_count(int64_t count);
    static Region edge_tube(int segment_n, double halfwidth, double ux, double uy);

    bool contains(const Location& loc) const;
};

// Joint per-site realization (x, copies, x', y, x~, z, w).
struct CoupledDraw {
    double x = 0;
    std::vector<double> copies;
    double x_prime = 0;
    bool y = false;
    double x_tilde = 0;
    double z = 0;  // |x - x'|
    double w = 0;  // 1 - exp(-z)
};

// Copies come from channels 1..m of the cell, the Bernoulli marker from
// channel m+1, so y is independent of (x, copies) by construction.
CoupledDraw draw_coupled(const WeightLaw& law, const CouplingSpec& spec, double eps,
                         uint64_t seed, uint64_t cell);

// Distinct epsilon values over a region, with multiplicities, at alpha = 1.
// The clamp is applied after scaling, so one profile serves a whole alpha
// calibration sweep.
struct EpsilonProfile {
    std::vector<double> base;   // schedule value at alpha = 1, before clamping
    std::vector<int64_t> mult;  // locations sharing that value
};

EpsilonProfile epsilon_profile(const EpsilonSchedule& schedule, const Region& region);

double sum_eps_sq(const EpsilonSchedule& schedule, const Region& region);

// Rigorous upper bound sqrt(1 - prod_i rho_i^2) on the total variation
// distance between the unperturbed and perturbed fields over the region,
// with per-site affinities computed in certified lower-bound mode.
double tv_upper_bound(const WeightLaw& law, const CouplingSpec& spec,
                      const EpsilonSchedule& schedule, const Region& region);
double tv_upper_bound(const WeightLaw& law, const CouplingSpec& spec,
                      const EpsilonProfile& profile, double alpha);

// Largest alpha (by bisection, within rel_tol) whose exact product-affinity
// TV bound stays <= target over the region.
double calibrate_alpha(const WeightLaw& law, const CouplingSpec& spec, ScheduleKind kind,
                       double n, double schedule_delta, const Region& region, double target,
                       double rel_tol = 1e-3);

// Lazily evaluated joint field (X, X^(1..m), Y, X', X~) on the lattice.
// All accessors are pure functions of (seed, location); safe for concurrent
// use from any number of threads.
class CoupledField {
  public:
    CoupledField(uint64_t seed, WeightLaw law, CouplingSpec spec, EpsilonSchedule schedule,
                 Region region);

    double x(uint64_t cell) const { return law_.sample_at(seed_, cell, rng_domain::kWeight); }
    double x(const Location& loc) const { return x(cell_of(loc)); }
    double x_prime(uint64_t cell) const;
    double z(uint64_t cell) const;
    double w(uint64_t cell) const;
    double epsilon(const Location& loc) const;
    bool y(const Location& loc) const;
    // Fast path: only draws the copies when the Bernoulli marker fires.
    double x_tilde(const Location& loc) const;
    CoupledDraw draw(const Location& loc) const;

    uint64_t seed() const { return seed_; }
    const WeightLaw& law() const { return law_; }
    const CouplingSpec& spec() const { return spec_; }
    const EpsilonSchedule& schedule() const { return schedule_; }
    const Region& region() const { return region_; }

    static uint64_t cell_of(const Location& loc) {
        return loc.is_edge ? edge_cell(loc.edge) : vertex_cell(loc.site);
    }

  private:
    uint64_t seed_;
    WeightLaw law_;
    CouplingSpec spec_;
    EpsilonSchedule schedule_;
    Region region_;
    double sqrt_log_n_ = 1.0;  // hoisted out of the per-edge schedule evaluation
};

}  // namespace growthlab::coupling
