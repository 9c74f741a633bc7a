#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "growthlab/metrics.hpp"

using namespace growthlab;
using namespace growthlab::metrics;

namespace {

DiscreteLaw random_law(std::mt19937& gen, int max_atoms = 5) {
    std::uniform_int_distribution<int> natoms(1, max_atoms);
    std::uniform_real_distribution<double> unif(0, 1);
    const int k = natoms(gen);
    std::vector<double> atoms, probs;
    double t = -2;
    double sum = 0;
    for (int i = 0; i < k; ++i) {
        t += 0.1 + unif(gen);
        atoms.push_back(t);
        probs.push_back(0.05 + unif(gen));
        sum += probs.back();
    }
    for (double& p : probs) p /= sum;
    // Renormalize exactly to absorb rounding.
    double acc = 0;
    for (size_t i = 0; i + 1 < probs.size(); ++i) acc += probs[i];
    probs.back() = 1.0 - acc;
    return DiscreteLaw::make(std::move(atoms), std::move(probs));
}

}  // namespace

TEST_CASE("hellinger affinity basic values") {
    auto p = DiscreteLaw::make({0, 1}, {0.5, 0.5});
    CHECK(hellinger_affinity(p, p) == doctest::Approx(1.0).epsilon(1e-14));
    auto q = DiscreteLaw::make({5, 6}, {0.5, 0.5});
    CHECK(hellinger_affinity(p, q) == 0.0);
    auto point = DiscreteLaw::make({0}, {1.0});
    CHECK(hellinger_affinity(p, point) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("tv distance basic values") {
    auto p = DiscreteLaw::make({0, 1}, {0.5, 0.5});
    CHECK(tv_distance(p, p) == 0.0);
    auto q = DiscreteLaw::make({5, 6}, {0.5, 0.5});
    CHECK(tv_distance(p, q) == 1.0);
    auto r = DiscreteLaw::make({0, 1}, {0.75, 0.25});
    CHECK(tv_distance(p, r) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("mixture law") {
    auto p = DiscreteLaw::make({0}, {1.0});
    auto q = DiscreteLaw::make({1}, {1.0});
    auto half = mixture_with(p, q, 0.5);
    CHECK(half.atoms == std::vector<double>{0, 1});
    CHECK(half.probs[0] == doctest::Approx(0.5));
    CHECK(half.probs[1] == doctest::Approx(0.5));
    auto same = mixture_with(p, q, 0.0);
    CHECK(tv_distance(same, p) == 0.0);
    auto other = mixture_with(p, q, 1.0);
    CHECK(tv_distance(other, q) == 0.0);
}

TEST_CASE("tv <= sqrt(1 - rho^2) on random law pairs, exact arithmetic") {
    std::mt19937 gen(11);
    for (int i = 0; i < 1000; ++i) {
        auto p = random_law(gen);
        auto q = random_law(gen);
        const double tv = tv_distance(p, q);
        const double rho = hellinger_affinity(p, q);
        CHECK(tv <= std::sqrt(1.0 - rho * rho) + 1e-12);
    }
}

TEST_CASE("product laws: affinity factorizes") {
    std::mt19937 gen(13);
    for (int rep = 0; rep < 200; ++rep) {
        DiscreteLaw p[3], q[3];
        for (int c = 0; c < 3; ++c) {
            p[c] = random_law(gen, 3);
            q[c] = random_law(gen, 3);
        }
        // Flatten the 3-fold product onto synthetic atoms indexed by tuples.
        std::vector<double> atoms, pp, qq;
        int idx = 0;
        double prod_aff = 1.0;
        for (int c = 0; c < 3; ++c) prod_aff *= hellinger_affinity(p[c], q[c]);
        // The product laws live on the grid of atom triples; missing atoms get 0.
        std::vector<double> union0, union1, union2;
        auto union_atoms = [](const DiscreteLaw& a, const DiscreteLaw& b) {
            std::vector<double> u(a.atoms);
            u.insert(u.end(), b.atoms.begin(), b.atoms.end());
            std::sort(u.begin(), u.end());
            u.erase(std::unique(u.begin(), u.end()), u.end());
            return u;
        };
        auto prob_at = [](const DiscreteLaw& l, double t) {
            for (size_t i = 0; i < l.atoms.size(); ++i)
                if (l.atoms[i] == t) return l.probs[i];
            return 0.0;
        };
        union0 = union_atoms(p[0], q[0]);
        union1 = union_atoms(p[1], q[1]);
        union2 = union_atoms(p[2], q[2]);
        for (double t0 : union0)
            for (double t1 : union1)
                for (double t2 : union2) {
                    atoms.push_back(idx++);
                    pp.push_back(prob_at(p[0], t0) * prob_at(p[1], t1) * prob_at(p[2], t2));
                    qq.push_back(prob_at(q[0], t0) * prob_at(q[1], t1) * prob_at(q[2], t2));
                }
        double joint_aff = 0;
        for (size_t i = 0; i < atoms.size(); ++i) joint_aff += std::sqrt(pp[i] * qq[i]);
        CHECK(joint_aff == doctest::Approx(prod_aff).epsilon(1e-12));
    }
}

TEST_CASE("affinity is symmetric; tv satisfies the triangle inequality") {
    std::mt19937 gen(17);
    for (int i = 0; i < 300; ++i) {
        auto p = random_law(gen);
        auto q = random_law(gen);
        auto r = random_law(gen);
        CHECK(hellinger_affinity(p, q) == doctest::Approx(hellinger_affinity(q, p)).epsilon(1e-14));
        CHECK(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12);
    }
}

TEST_CASE("quadratic affinity law for the Bernoulli(1/2) min-coupling, m = 1") {
    // X' = min of two Bernoulli(1/2) copies has pmf {0: 3/4, 1: 1/4}. The
    // eps -> 0 limit of (1 - rho)/eps^2 is (1/8) sum (1-g)^2 p = 1/32, and the
    // closed form rho(eps) = (sqrt(1 + eps/2) + sqrt(1 - eps/2))/2 agrees.
    auto p = DiscreteLaw::make({0, 1}, {0.5, 0.5});
    auto q = DiscreteLaw::make({0, 1}, {0.75, 0.25});
    const double grid[] = {1e-2, 1e-3, 1e-4};
    auto chk = affinity_quadratic_check(p, q, grid);
    CHECK(chk.analytic_limit == doctest::Approx(1.0 / 32.0).epsilon(1e-14));
    for (const auto& row : chk.rows) {
        const double exact =
            1.0 - 0.5 * (std::sqrt(1.0 + row.eps / 2.0) + std::sqrt(1.0 - row.eps / 2.0));
        CHECK(row.one_minus_rho == doctest::Approx(exact).epsilon(1e-9));
    }
    // Values at eps = 1e-3 and 1e-4 sit within 5% of the analytic limit.
    CHECK(std::abs(chk.rows[1].ratio - chk.analytic_limit) <= 0.05 * chk.analytic_limit);
    CHECK(std::abs(chk.rows[2].ratio - chk.analytic_limit) <= 0.05 * chk.analytic_limit);
    // And the two small-eps ratios agree with each other within 5%.
    CHECK(std::abs(chk.rows[1].ratio - chk.rows[2].ratio) <= 0.05 * chk.rows[1].ratio);
}

TEST_CASE("quadratic check: q = p gives zero ratio; support violations throw") {
    auto p = DiscreteLaw::make({0, 1}, {0.5, 0.5});
    const double grid[] = {1e-2, 1e-3};
    auto same = affinity_quadratic_check(p, p, grid);
    CHECK(same.analytic_limit == 0.0);
    for (const auto& row : same.rows) CHECK(std::abs(row.one_minus_rho) <= 1e-14);

    auto q = DiscreteLaw::make({0, 2}, {0.5, 0.5});
    CHECK_THROWS_AS(affinity_quadratic_check(p, q, grid), std::invalid_argument);
}

TEST_CASE("fluctuation interval: degenerate, uniform ladder, gaussian width") {
    std::vector<double> flat(50, 3.0);
    auto est0 = fluctuation_interval(flat, 0.5);
    CHECK(est0.width == 0.0);
    CHECK(est0.mass == 1.0);

    std::vector<double> ladder(100);
    for (int i = 0; i < 100; ++i) ladder[i] = i + 1;
    auto est = fluctuation_interval(ladder, 0.5);
    CHECK(est.width == 49.0);
    CHECK(est.a == 1.0);  // smallest-a tie break
    CHECK(est.b == 50.0);

    std::mt19937 gen(23);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(100000);
    for (double& v : z) v = normal(gen);
    auto estn = fluctuation_interval(z, 0.6827);
    CHECK(estn.width == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("fluctuation interval width is monotone in mass") {
    std::mt19937 gen(29);
    std::exponential_distribution<double> expo(0.7);
    std::vector<double> s(2000);
    for (double& v : s) v = expo(gen);
    double prev = 0;
    for (double mass : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        auto est = fluctuation_interval(s, mass);
        CHECK(est.width >= prev);
        prev = est.width;
    }
}

TEST_CASE("coupled bound evaluator") {
    std::vector<double> x = {0, 1, 2, 3, 4};
    std::vector<double> zero(5, 0.0);
    // Identical coupling, full range: equality case lhs = rhs = 1.
    auto eq = coupled_interval_bound(x, zero, 0, 4, 0.0);
    CHECK(eq.lhs == 1.0);
    CHECK(eq.rhs == 1.0);
    CHECK(eq.satisfied);
    // tv = 1 makes the bound vacuous.
    auto vac = coupled_interval_bound(x, zero, 1.5, 1.6, 1.0);
    CHECK(vac.rhs >= 1.0);
    CHECK(vac.satisfied);
    CHECK_THROWS_AS(coupled_interval_bound(x, zero, 2, 1, 0.0), std::invalid_argument);
}

TEST_CASE("coupling affinity: exact discrete sum matches the mixture route") {
    // For discrete laws the affinity must equal hellinger(p, eps q + (1-eps) p)
    // with q the exact pmf of the (m+1)-fold extreme.
    auto law = WeightLaw::finite_discrete({0, 1, 3}, {0.3, 0.45, 0.25});
    auto p = DiscreteLaw::make(law.atoms, law.probs);
    for (CouplingKind kind : {CouplingKind::Min, CouplingKind::Max}) {
        for (int m : {1, 2, 5}) {
            std::vector<double> q(3);
            double cum = 0;
            for (int i = 0; i < 3; ++i) {
                const double f_prev = cum;
                cum += law.probs[i];
                q[i] = kind == CouplingKind::Min
                           ? std::pow(1 - f_prev, m + 1) - std::pow(1 - cum, m + 1)
                           : std::pow(cum, m + 1) - std::pow(f_prev, m + 1);
            }
            auto qlaw = DiscreteLaw::make(law.atoms, q);
            for (double eps : {0.01, 0.2, 0.7}) {
                const double direct = metrics::coupling_affinity(law, kind, m, eps);
                const double via_mixture = hellinger_affinity(p, mixture_with(p, qlaw, eps));
                CHECK(direct == doctest::Approx(via_mixture).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("coupling affinity: continuous closed form for m = 1") {
    // int_0^1 sqrt(2 eps u + 1 - eps) du = ((1+eps)^{3/2} - (1-eps)^{3/2}) / (3 eps).
    auto law = WeightLaw::exponential(1.0);
    for (double eps : {0.005, 0.05, 0.3, 0.9}) {
        const double closed =
            (std::pow(1 + eps, 1.5) - std::pow(1 - eps, 1.5)) / (3.0 * eps);
        CHECK(metrics::coupling_affinity(law, CouplingKind::Min, 1, eps) ==
              doctest::Approx(closed).epsilon(1e-9));
        CHECK(metrics::coupling_affinity(law, CouplingKind::Max, 1, eps) ==
              doctest::Approx(closed).epsilon(1e-9));
    }
    // Lower-bound mode is a true lower bound and within tolerance of the value.
    const double plain = metrics::coupling_affinity(law, CouplingKind::Min, 3, 0.1);
    const double lower = metrics::coupling_affinity(law, CouplingKind::Min, 3, 0.1, true);
    CHECK(lower <= plain);
    CHECK(plain - lower <= 1e-8);
}

TEST_CASE("coupling affinity: geometric law's infinite support is summed safely") {
    auto law = WeightLaw::geometric(0.35);
    for (double eps : {0.05, 0.4}) {
        const double rho = metrics::coupling_affinity(law, CouplingKind::Min, 2, eps);
        CHECK(rho > 0.9);
        CHECK(rho <= 1.0);
        // Against a heavily truncated explicit version.
        std::vector<double> atoms, probs;
        double cum = 0;
        for (int k = 0; k < 200; ++k) {
            atoms.push_back(k);
            probs.push_back(0.35 * std::pow(0.65, k));
            cum += probs.back();
        }
        probs.back() += 1.0 - cum;
        auto p = DiscreteLaw::make(atoms, probs);
        std::vector<double> q(atoms.size());
        double f = 0;
        for (size_t i = 0; i < atoms.size(); ++i) {
            const double f_prev = f;
            f += probs[i];
            q[i] = std::pow(1 - f_prev, 3) - std::pow(std::max(0.0, 1 - f), 3);
        }
        double qsum = 0;
        for (double v : q) qsum += v;
        q.back() += 1.0 - qsum;
        auto qlaw = DiscreteLaw::make(atoms, q);
        const double via = hellinger_affinity(p, mixture_with(p, qlaw, eps));
        CHECK(rho == doctest::Approx(via).epsilon(1e-10));
    }
}
