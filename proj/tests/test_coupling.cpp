#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "growthlab/coupling.hpp"

using namespace growthlab;
using namespace growthlab::coupling;

namespace {

EpsilonSchedule make_schedule(ScheduleKind kind, double alpha, double n, double delta = 0.0) {
    EpsilonSchedule s;
    s.kind = kind;
    s.alpha = alpha;
    s.n = n;
    s.delta = delta;
    s.validate();
    return s;
}

}  // namespace

TEST_CASE("epsilon schedule worked values") {
    auto fpp = make_schedule(ScheduleKind::FppRadial, 1.0, std::exp(4.0));
    CHECK(epsilon_at(fpp, Location::at_edge(Edge{{0, 0}, 0})) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(epsilon_at(fpp, Location::at_edge(Edge{{3, 0}, 0})) ==
          doctest::Approx(1.0 / 8.0).epsilon(1e-12));

    auto lpp = make_schedule(ScheduleKind::LppRadial, 2.0, std::exp(1.0));
    CHECK(epsilon_at(lpp, Location::at_site(Coord{0, 0})) == 0.0);  // origin excluded
    CHECK(epsilon_at(lpp, Location::at_site(Coord{1, 1})) == doctest::Approx(1.0).epsilon(1e-9));

    // Values beyond 1 clamp to 1 - 2^-32.
    auto big = make_schedule(ScheduleKind::FppRadial, 10.0, std::exp(1.0));
    CHECK(epsilon_at(big, Location::at_edge(Edge{{0, 0}, 0})) == kEpsilonClamp);

    auto box = make_schedule(ScheduleKind::FppBox, 3.0, 16.0, 0.125);
    CHECK(epsilon_at(box, Location::at_edge(Edge{{5, 0}, 0})) ==
          doctest::Approx(3.0 * std::pow(16.0, -1.0)).epsilon(1e-12));
}

TEST_CASE("schedule validation") {
    CHECK_THROWS_AS(make_schedule(ScheduleKind::FppRadial, 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(ScheduleKind::Uniform, -0.2, 4), std::invalid_argument);
    CHECK_NOTHROW(make_schedule(ScheduleKind::Uniform, 0.0, 2));
}

TEST_CASE("coupled draw invariants") {
    auto law = WeightLaw::exponential(1.0);
    CouplingSpec min_spec{CouplingKind::Min, 3};
    CouplingSpec max_spec{CouplingKind::Max, 3};
    for (uint64_t cell = 0; cell < 20000; ++cell) {
        auto d = draw_coupled(law, min_spec, 0.3, 99, cell);
        double mn = d.x;
        for (double c : d.copies) mn = std::min(mn, c);
        CHECK(d.x_prime == mn);
        CHECK(d.z == std::abs(d.x - d.x_prime));
        CHECK(d.w == doctest::Approx(-std::expm1(-d.z)).epsilon(1e-15));
        CHECK(d.x_tilde == (d.y ? d.x_prime : d.x));
        CHECK(d.x_tilde <= d.x);  // min coupling lowers weights

        auto u = draw_coupled(law, max_spec, 0.3, 99, cell);
        CHECK(u.x_tilde >= u.x);
    }
}

TEST_CASE("eps = 0 never perturbs") {
    auto law = WeightLaw::uniform(0, 1);
    CouplingSpec spec{CouplingKind::Min, 2};
    for (uint64_t cell = 0; cell < 5000; ++cell) {
        auto d = draw_coupled(law, spec, 0.0, 7, cell);
        CHECK_FALSE(d.y);
        CHECK(d.x_tilde == d.x);
    }
}

TEST_CASE("pathwise domination over a large randomized sweep") {
    auto law = WeightLaw::gamma(1.6, 0.8);
    CouplingSpec min_spec{CouplingKind::Min, 2};
    CouplingSpec max_spec{CouplingKind::Max, 2};
    int violations = 0;
    for (uint64_t cell = 0; cell < 1000000; ++cell) {
        auto dmin = draw_coupled(law, min_spec, 0.4, 555, cell);
        auto dmax = draw_coupled(law, max_spec, 0.4, 556, cell);
        if (dmin.x_tilde > dmin.x || dmax.x_tilde < dmax.x) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("pmf of the m-fold extreme is bounded by (m+1) times the base pmf") {
    auto law = WeightLaw::finite_discrete({0, 0.5, 2, 7}, {0.4, 0.1, 0.3, 0.2});
    for (CouplingKind kind : {CouplingKind::Min, CouplingKind::Max}) {
        for (int m : {1, 2, 8}) {
            double cum = 0;
            for (size_t i = 0; i < law.atoms.size(); ++i) {
                const double f_prev = cum;
                cum += law.probs[i];
                const double q = kind == CouplingKind::Min
                                     ? std::pow(1 - f_prev, m + 1) - std::pow(1 - cum, m + 1)
                                     : std::pow(cum, m + 1) - std::pow(f_prev, m + 1);
                CHECK(q <= (m + 1) * law.probs[i] + 1e-12);
            }
        }
    }
}

TEST_CASE("Bernoulli marker is independent of the weight draw") {
    auto law = WeightLaw::exponential(2.0);
    CouplingSpec spec{CouplingKind::Min, 1};
    const double eps = 0.3;
    const int n = 1000000;
    double sx = 0, sy = 0, sxy = 0, sxx = 0;
    for (uint64_t cell = 0; cell < uint64_t(n); ++cell) {
        auto d = draw_coupled(law, spec, eps, 808, cell);
        const double yv = d.y ? 1.0 : 0.0;
        sx += d.x;
        sy += yv;
        sxy += d.x * yv;
        sxx += d.x * d.x;
    }
    const double mx = sx / n, my = sy / n;
    const double cov = sxy / n - mx * my;
    const double varx = sxx / n - mx * mx;
    const double vary = my * (1 - my);
    const double corr = cov / std::sqrt(varx * vary);
    CHECK(std::abs(corr) <= 3.0 / std::sqrt(double(n)));
    CHECK(my == doctest::Approx(eps).epsilon(0.01));
}

TEST_CASE("mixture identity: the constructed law of x~ is eps q + (1-eps) p") {
    // Exhaustive enumeration over quantile bins of (x, copies, y): summing the
    // probability of every bin combination recovers the mixture pmf exactly.
    auto law = WeightLaw::finite_discrete({0, 1, 4}, {0.25, 0.45, 0.3});
    const int m = 2;
    const double eps = 0.37;
    for (CouplingKind kind : {CouplingKind::Min, CouplingKind::Max}) {
        std::map<double, double> pmf;
        const size_t k = law.atoms.size();
        std::vector<size_t> bin(m + 1, 0);
        while (true) {
            double prob = 1.0;
            for (int j = 0; j <= m; ++j) prob *= law.probs[bin[j]];
            double extreme = law.atoms[bin[0]];
            for (int j = 1; j <= m; ++j)
                extreme = kind == CouplingKind::Min ? std::min(extreme, law.atoms[bin[j]])
                                                    : std::max(extreme, law.atoms[bin[j]]);
            pmf[law.atoms[bin[0]]] += prob * (1.0 - eps);  // y = 0 keeps x
            pmf[extreme] += prob * eps;                    // y = 1 takes x'
            size_t j = 0;
            for (; j <= size_t(m); ++j) {
                if (++bin[j] < k) break;
                bin[j] = 0;
            }
            if (j > size_t(m)) break;
        }
        // Expected mixture: eps * pmf(X') + (1-eps) * pmf(X).
        double cum = 0;
        for (size_t i = 0; i < k; ++i) {
            const double f_prev = cum;
            cum += law.probs[i];
            const double q = kind == CouplingKind::Min
                                 ? std::pow(1 - f_prev, m + 1) - std::pow(1 - cum, m + 1)
                                 : std::pow(cum, m + 1) - std::pow(f_prev, m + 1);
            const double expected = eps * q + (1 - eps) * law.probs[i];
            CHECK(pmf[law.atoms[i]] == doctest::Approx(expected).epsilon(1e-13));
        }
    }
}

TEST_CASE("sum of squared epsilons") {
    auto zero = make_schedule(ScheduleKind::Uniform, 0.0, 2);
    CHECK(sum_eps_sq(zero, Region::site_count(100)) == 0.0);

    auto unif = make_schedule(ScheduleKind::Uniform, 0.02, 2);
    CHECK(sum_eps_sq(unif, Region::site_count(50)) == doctest::Approx(50 * 0.02 * 0.02));

    // Radial sum over edge balls stays bounded as n grows.
    double prev_bound = 0;
    for (int n : {16, 32, 64, 128, 256, 512, 1024}) {
        auto sched = make_schedule(ScheduleKind::FppRadial, 0.5, double(n));
        const double s = sum_eps_sq(sched, Region::edge_ball(n));
        CHECK(s <= 12.0 * 0.5 * 0.5);
        prev_bound = std::max(prev_bound, s);
    }
    CHECK(prev_bound > 0);
}

TEST_CASE("edge-ball profile matches brute-force edge enumeration") {
    const int R = 9;
    auto sched = make_schedule(ScheduleKind::FppRadial, 0.8, 64.0);
    double brute = 0;
    for (int x = -R - 2; x <= R + 2; ++x)
        for (int y = -R - 2; y <= R + 2; ++y)
            for (uint8_t dir : {uint8_t{0}, uint8_t{1}}) {
                Edge e{{x, y}, dir};
                if (e.dist_origin() <= R) {
                    const double eps = epsilon_at(sched, Location::at_edge(e));
                    brute += eps * eps;
                }
            }
    CHECK(sum_eps_sq(sched, Region::edge_ball(R)) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("rect profile matches brute-force site enumeration") {
    auto sched = make_schedule(ScheduleKind::LppRadial, 0.8, 64.0);
    const Coord corner{7, 4};
    double brute = 0;
    for (int x = 0; x <= corner.x; ++x)
        for (int y = 0; y <= corner.y; ++y) {
            if (x == 0 && y == 0) continue;
            const double eps = epsilon_at(sched, Location::at_site(Coord{x, y}));
            brute += eps * eps;
        }
    CHECK(sum_eps_sq(sched, Region::site_rect(corner)) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("tv upper bound: formula cases") {
    auto law = WeightLaw::exponential(1.0);
    CouplingSpec spec{CouplingKind::Min, 2};

    auto zero = make_schedule(ScheduleKind::Uniform, 0.0, 2);
    CHECK(tv_upper_bound(law, spec, zero, Region::site_count(1000)) == 0.0);

    // One and two identical sites reduce to sqrt(1 - rho^2) and sqrt(1 - rho^4).
    const double eps = 0.35;
    auto unif = make_schedule(ScheduleKind::Uniform, eps, 2);
    const double rho = metrics::coupling_affinity(law, spec.kind, spec.m, eps, true);
    CHECK(tv_upper_bound(law, spec, unif, Region::site_count(1)) ==
          doctest::Approx(std::sqrt(1 - rho * rho)).epsilon(1e-12));
    CHECK(tv_upper_bound(law, spec, unif, Region::site_count(2)) ==
          doctest::Approx(std::sqrt(1 - std::pow(rho, 4))).epsilon(1e-12));
}

TEST_CASE("alpha calibration hits the tv target from below") {
    auto law = WeightLaw::exponential(1.0);
    CouplingSpec spec{CouplingKind::Min, 5};
    const Region region = Region::edge_ball(128);
    const double alpha = calibrate_alpha(law, spec, ScheduleKind::FppRadial, 128.0, 0.0, region,
                                         0.25);
    CHECK(alpha > 0);
    auto sched = make_schedule(ScheduleKind::FppRadial, alpha, 128.0);
    const double tv = tv_upper_bound(law, spec, sched, region);
    CHECK(tv <= 0.25);
    CHECK(tv >= 0.2);  // bisection lands near the target
    auto sched_hi = make_schedule(ScheduleKind::FppRadial, alpha * 1.05, 128.0);
    CHECK(tv_upper_bound(law, spec, sched_hi, region) > 0.25);
}

TEST_CASE("coupled field gates perturbations by region and matches full draws") {
    auto law = WeightLaw::exponential(1.0);
    CouplingSpec spec{CouplingKind::Min, 3};
    auto sched = make_schedule(ScheduleKind::FppRadial, 2.0, 32.0);
    CoupledField field(4242, law, spec, sched, Region::edge_ball(8));

    int fired = 0;
    for (int x = -12; x <= 12; ++x)
        for (int y = -12; y <= 12; ++y)
            for (uint8_t dir : {uint8_t{0}, uint8_t{1}}) {
                const auto loc = Location::at_edge(Edge{{x, y}, dir});
                const auto d = field.draw(loc);
                CHECK(field.x_tilde(loc) == d.x_tilde);
                CHECK(field.x(loc) == d.x);
                if (Edge{{x, y}, dir}.dist_origin() > 8) {
                    CHECK(field.epsilon(loc) == 0.0);
                    CHECK(field.x_tilde(loc) == field.x(loc));
                } else if (d.y) {
                    ++fired;
                }
            }
    CHECK(fired > 0);
}
