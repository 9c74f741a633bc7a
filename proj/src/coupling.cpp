#include "growthlab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace growthlab::coupling {

namespace {

double clamp_eps(double e) { return std::clamp(e, 0.0, kEpsilonClamp); }

// Euclidean distance from a point to the segment 0 -> (sx, sy).
double dist_to_segment(double px, double py, double sx, double sy) {
    const double len2 = sx * sx + sy * sy;
    double t = len2 > 0 ? (px * sx + py * sy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - t * sx, dy = py - t * sy;
    return std::hypot(dx, dy);
}

}  // namespace

void CouplingSpec::validate() const {
    if (m < 1) throw std::invalid_argument("coupling: m must be >= 1");
}

const char* schedule_kind_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::FppRadial: return "fpp-radial";
        case ScheduleKind::LppRadial: return "lpp-radial";
        case ScheduleKind::Uniform: return "uniform";
        case ScheduleKind::FppBox: return "fpp-box";
    }
    return "?";
}

void EpsilonSchedule::validate() const {
    if (!(alpha >= 0) || !std::isfinite(alpha))
        throw std::invalid_argument("schedule: alpha must be >= 0");
    if (kind != ScheduleKind::Uniform && !(n >= 2.0))
        throw std::invalid_argument("schedule: n must be >= 2 so that log n > 0");
    if (kind == ScheduleKind::FppBox && !(delta >= 0))
        throw std::invalid_argument("schedule: delta must be >= 0");
}

double epsilon_at(const EpsilonSchedule& schedule, const Location& loc) {
    switch (schedule.kind) {
        case ScheduleKind::FppRadial: {
            if (!loc.is_edge) throw std::invalid_argument("fpp-radial schedule expects edges");
            const double d = double(loc.edge.dist_origin());
            return clamp_eps(schedule.alpha / ((d + 1.0) * std::sqrt(std::log(schedule.n))));
        }
        case ScheduleKind::LppRadial: {
            if (loc.is_edge) throw std::invalid_argument("lpp-radial schedule expects sites");
            const double d = double(l1_norm(loc.site));
            if (d == 0.0) return 0.0;  // the origin site is never perturbed
            return clamp_eps(schedule.alpha / (d * std::sqrt(std::log(schedule.n))));
        }
        case ScheduleKind::Uniform:
            return clamp_eps(schedule.alpha);
        case ScheduleKind::FppBox:
            return clamp_eps(schedule.alpha * std::pow(schedule.n, -7.0 / 8.0 - schedule.delta));
    }
    return 0.0;
}

Region Region::edge_ball(int64_t radius) {
    Region r;
    r.kind = Kind::EdgeBall;
    r.radius = radius;
    return r;
}

Region Region::site_rect(Coord corner) {
    if (corner.x < 0 || corner.y < 0)
        throw std::invalid_argument("region: rect corner must be in the first quadrant");
    Region r;
    r.kind = Kind::SiteRect;
    r.corner = corner;
    return r;
}

Region Region::site_triangle(int levels) {
    Region r;
    r.kind = Kind::SiteTriangle;
    r.levels = levels;
    return r;
}

Region Region::site_count(int64_t count) {
    Region r;
    r.kind = Kind::SiteCount;
    r.count = count;
    return r;
}

Region Region::edge_tube(int segment_n, double halfwidth, double ux, double uy) {
    Region r;
    r.kind = Kind::EdgeTube;
    r.segment_n = segment_n;
    r.tube_halfwidth = halfwidth;
    r.ux = ux;
    r.uy = uy;
    return r;
}

bool Region::contains(const Location& loc) const {
    switch (kind) {
        case Kind::EdgeBall:
            return loc.is_edge && loc.edge.dist_origin() <= radius;
        case Kind::SiteRect:
            return !loc.is_edge && loc.site.x >= 0 && loc.site.y >= 0 && loc.site.x <= corner.x &&
                   loc.site.y <= corner.y && !(loc.site.x == 0 && loc.site.y == 0);
        case Kind::SiteTriangle: {
            if (loc.is_edge || loc.site.x < 0 || loc.site.y < 0) return false;
            const int64_t l = l1_norm(loc.site);
            return l >= 1 && l <= levels;
        }
        case Kind::SiteCount:
            return !loc.is_edge;  // interchangeable sites, membership by count only
        case Kind::EdgeTube: {
            if (!loc.is_edge) return false;
            const double sx = double(segment_n) * ux, sy = double(segment_n) * uy;
            const Coord a = loc.edge.v, b = loc.edge.other();
            return dist_to_segment(a.x, a.y, sx, sy) <= tube_halfwidth &&
                   dist_to_segment(b.x, b.y, sx, sy) <= tube_halfwidth;
        }
    }
    return false;
}

CoupledDraw draw_coupled(const WeightLaw& law, const CouplingSpec& spec, double eps,
                         uint64_t seed, uint64_t cell) {
    spec.validate();
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("draw_coupled: eps must be in [0,1)");
    CoupledDraw d;
    d.x = law.sample_at(seed, cell, rng_domain::kWeight | 0u);
    d.copies.resize(spec.m);
    double extreme = d.x;
    for (int j = 1; j <= spec.m; ++j) {
        const double c = law.sample_at(seed, cell, rng_domain::kWeight | uint32_t(j));
        d.copies[j - 1] = c;
        extreme = spec.kind == CouplingKind::Min ? std::min(extreme, c) : std::max(extreme, c);
    }
    d.x_prime = extreme;
    d.z = std::abs(d.x - d.x_prime);
    d.w = -std::expm1(-d.z);
    d.y = rng_u01(seed, cell, rng_domain::kWeight | uint32_t(spec.m + 1)) < eps;
    d.x_tilde = d.y ? d.x_prime : d.x;
    return d;
}

EpsilonProfile epsilon_profile(const EpsilonSchedule& schedule, const Region& region) {
    schedule.validate();
    EpsilonSchedule unit = schedule;
    unit.alpha = 1.0;
    std::map<double, int64_t> groups;
    const auto add = [&](const Location& loc, int64_t count) {
        // Raw (unclamped) value at alpha = 1; uniform/box schedules are flat.
        double base;
        switch (unit.kind) {
            case ScheduleKind::FppRadial:
                base = 1.0 / ((double(loc.edge.dist_origin()) + 1.0) * std::sqrt(std::log(unit.n)));
                break;
            case ScheduleKind::LppRadial: {
                const double d = double(l1_norm(loc.site));
                if (d == 0.0) return;
                base = 1.0 / (d * std::sqrt(std::log(unit.n)));
                break;
            }
            case ScheduleKind::Uniform:
                base = 1.0;
                break;
            case ScheduleKind::FppBox:
                base = std::pow(unit.n, -7.0 / 8.0 - unit.delta);
                break;
            default:
                return;
        }
        groups[base] += count;
    };

    switch (region.kind) {
        case Region::Kind::EdgeBall:
            // Edges at distance i from the origin number 8i + 4.
            for (int64_t i = 0; i <= region.radius; ++i)
                add(Location::at_edge(Edge{{int32_t(i), 0}, 0}), 8 * i + 4);
            break;
        case Region::Kind::SiteRect: {
            const int64_t a = region.corner.x, b = region.corner.y;
            for (int64_t l = 1; l <= a + b; ++l) {
                const int64_t lo = std::max<int64_t>(0, l - b);
                const int64_t hi = std::min(a, l);
                if (hi >= lo)
                    add(Location::at_site(Coord{int32_t(l), 0}), hi - lo + 1);
            }
            break;
        }
        case Region::Kind::SiteTriangle:
            for (int64_t l = 1; l <= region.levels; ++l)
                add(Location::at_site(Coord{int32_t(l), 0}), l + 1);
            break;
        case Region::Kind::SiteCount:
            add(Location::at_site(Coord{1, 0}), region.count);
            break;
        case Region::Kind::EdgeTube: {
            const double sx = double(region.segment_n) * region.ux;
            const double sy = double(region.segment_n) * region.uy;
            const double hw = region.tube_halfwidth;
            const int32_t x0 = int32_t(std::floor(std::min(0.0, sx) - hw - 1));
            const int32_t x1 = int32_t(std::ceil(std::max(0.0, sx) + hw + 1));
            const int32_t y0 = int32_t(std::floor(std::min(0.0, sy) - hw - 1));
            const int32_t y1 = int32_t(std::ceil(std::max(0.0, sy) + hw + 1));
            for (int32_t x = x0; x <= x1; ++x)
                for (int32_t y = y0; y <= y1; ++y)
                    for (uint8_t dir : {uint8_t{0}, uint8_t{1}}) {
                        const Location loc = Location::at_edge(Edge{{x, y}, dir});
                        if (region.contains(loc)) add(loc, 1);
                    }
            break;
        }
    }

    EpsilonProfile prof;
    prof.base.reserve(groups.size());
    prof.mult.reserve(groups.size());
    for (const auto& [base, count] : groups) {
        prof.base.push_back(base);
        prof.mult.push_back(count);
    }
    return prof;
}

double sum_eps_sq(const EpsilonSchedule& schedule, const Region& region) {
    const EpsilonProfile prof = epsilon_profile(schedule, region);
    double acc = 0;
    for (size_t i = 0; i < prof.base.size(); ++i) {
        const double e = clamp_eps(schedule.alpha * prof.base[i]);
        acc += double(prof.mult[i]) * e * e;
    }
    return acc;
}

double tv_upper_bound(const WeightLaw& law, const CouplingSpec& spec,
                      const EpsilonProfile& profile, double alpha) {
    spec.validate();
    double log_prod = 0;  // sum of mult * 2 log rho
    for (size_t i = 0; i < profile.base.size(); ++i) {
        const double e = clamp_eps(alpha * profile.base[i]);
        if (e == 0.0) continue;
        const double rho = metrics::coupling_affinity(law, spec.kind, spec.m, e, true);
        if (rho <= 0.0) return 1.0;
        log_prod += double(profile.mult[i]) * 2.0 * std::log(rho);
    }
    return std::sqrt(std::clamp(-std::expm1(log_prod), 0.0, 1.0));
}

double tv_upper_bound(const WeightLaw& law, const CouplingSpec& spec,
                      const EpsilonSchedule& schedule, const Region& region) {
    return tv_upper_bound(law, spec, epsilon_profile(schedule, region), schedule.alpha);
}

double calibrate_alpha(const WeightLaw& law, const CouplingSpec& spec, ScheduleKind kind,
                       double n, double schedule_delta, const Region& region, double target,
                       double rel_tol) {
    if (!(target > 0 && target < 1)) throw std::invalid_argument("calibrate_alpha: target in (0,1)");
    EpsilonSchedule sched;
    sched.kind = kind;
    sched.alpha = 1.0;
    sched.n = n;
    sched.delta = schedule_delta;
    const EpsilonProfile prof = epsilon_profile(sched, region);
    double lo = 0.0, hi = 1.0;
    while (tv_upper_bound(law, spec, prof, hi) < target && hi < 1e6) hi *= 2.0;
    for (int it = 0; it < 200 && (hi - lo) > rel_tol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tv_upper_bound(law, spec, prof, mid) <= target)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

CoupledField::CoupledField(uint64_t seed, WeightLaw law, CouplingSpec spec,
                           EpsilonSchedule schedule, Region region)
    : seed_(seed),
      law_(std::move(law)),
      spec_(spec),
      schedule_(schedule),
      region_(region) {
    law_.validate();
    spec_.validate();
    schedule_.validate();
    if (schedule_.kind != ScheduleKind::Uniform) sqrt_log_n_ = std::sqrt(std::log(schedule_.n));
}

double CoupledField::x_prime(uint64_t cell) const {
    double extreme = law_.sample_at(seed_, cell, rng_domain::kWeight | 0u);
    for (int j = 1; j <= spec_.m; ++j) {
        const double c = law_.sample_at(seed_, cell, rng_domain::kWeight | uint32_t(j));
        extreme = spec_.kind == CouplingKind::Min ? std::min(extreme, c) : std::max(extreme, c);
    }
    return extreme;
}

double CoupledField::z(uint64_t cell) const { return std::abs(x(cell) - x_prime(cell)); }

double CoupledField::w(uint64_t cell) const { return -std::expm1(-z(cell)); }

double CoupledField::epsilon(const Location& loc) const {
    if (!region_.contains(loc)) return 0.0;
    // Same arithmetic as epsilon_at with sqrt(log n) hoisted to construction.
    switch (schedule_.kind) {
        case ScheduleKind::FppRadial: {
            const double d = double(loc.edge.dist_origin());
            return clamp_eps(schedule_.alpha / ((d + 1.0) * sqrt_log_n_));
        }
        case ScheduleKind::LppRadial: {
            const double d = double(l1_norm(loc.site));
            if (d == 0.0) return 0.0;
            return clamp_eps(schedule_.alpha / (d * sqrt_log_n_));
        }
        default:
            return epsilon_at(schedule_, loc);
    }
}

bool CoupledField::y(const Location& loc) const {
    const double eps = epsilon(loc);
    if (eps == 0.0) return false;
    return rng_u01(seed_, cell_of(loc), rng_domain::kWeight | uint32_t(spec_.m + 1)) < eps;
}

double CoupledField::x_tilde(const Location& loc) const {
    const uint64_t cell = cell_of(loc);
    const double eps = epsilon(loc);
    if (eps > 0.0 &&
        rng_u01(seed_, cell, rng_domain::kWeight | uint32_t(spec_.m + 1)) < eps)
        return x_prime(cell);
    return x(cell);
}

CoupledDraw CoupledField::draw(const Location& loc) const {
    return draw_coupled(law_, spec_, epsilon(loc), seed_, cell_of(loc));
}

}  // namespace growthlab::coupling
