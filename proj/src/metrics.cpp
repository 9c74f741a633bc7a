#include "growthlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace growthlab::metrics {

namespace {

constexpr double kQuadTol = 1e-9;

void merge_support(const DiscreteLaw& p, const DiscreteLaw& q, std::vector<double>& atoms,
                   std::vector<double>& pp, std::vector<double>& qq) {
    size_t i = 0, j = 0;
    while (i < p.atoms.size() || j < q.atoms.size()) {
        double t;
        double pv = 0, qv = 0;
        if (j >= q.atoms.size() || (i < p.atoms.size() && p.atoms[i] < q.atoms[j])) {
            t = p.atoms[i];
            pv = p.probs[i++];
        } else if (i >= p.atoms.size() || q.atoms[j] < p.atoms[i]) {
            t = q.atoms[j];
            qv = q.probs[j++];
        } else {
            t = p.atoms[i];
            pv = p.probs[i++];
            qv = q.probs[j++];
        }
        atoms.push_back(t);
        pp.push_back(pv);
        qq.push_back(qv);
    }
}

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 48);
}

}  // namespace

void DiscreteLaw::validate() const {
    if (atoms.empty() || atoms.size() != probs.size())
        throw std::invalid_argument("discrete law: atoms/probs size mismatch");
    double sum = 0;
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (!std::isfinite(atoms[i])) throw std::invalid_argument("discrete law: non-finite atom");
        if (i > 0 && !(atoms[i - 1] < atoms[i]))
            throw std::invalid_argument("discrete law: atoms must be strictly increasing");
        if (probs[i] < 0) throw std::invalid_argument("discrete law: negative probability");
        sum += probs[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("discrete law: probs must sum to 1 within 1e-12");
}

DiscreteLaw DiscreteLaw::make(std::vector<double> atoms, std::vector<double> probs) {
    DiscreteLaw d{std::move(atoms), std::move(probs)};
    d.validate();
    return d;
}

double hellinger_affinity(const DiscreteLaw& p, const DiscreteLaw& q) {
    std::vector<double> atoms, pp, qq;
    merge_support(p, q, atoms, pp, qq);
    double rho = 0;
    for (size_t i = 0; i < atoms.size(); ++i) rho += std::sqrt(pp[i] * qq[i]);
    return std::min(rho, 1.0);
}

double tv_distance(const DiscreteLaw& p, const DiscreteLaw& q) {
    std::vector<double> atoms, pp, qq;
    merge_support(p, q, atoms, pp, qq);
    double acc = 0;
    for (size_t i = 0; i < atoms.size(); ++i) acc += std::abs(pp[i] - qq[i]);
    return std::min(0.5 * acc, 1.0);
}

DiscreteLaw mixture_with(const DiscreteLaw& p, const DiscreteLaw& q, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("mixture_with: eps must be in [0,1]");
    std::vector<double> atoms, pp, qq;
    merge_support(p, q, atoms, pp, qq);
    std::vector<double> mix(atoms.size());
    for (size_t i = 0; i < atoms.size(); ++i) mix[i] = eps * qq[i] + (1.0 - eps) * pp[i];
    return DiscreteLaw{std::move(atoms), std::move(mix)};
}

QuadraticCheck affinity_quadratic_check(const DiscreteLaw& p, const DiscreteLaw& q,
                                        std::span<const double> eps_grid) {
    p.validate();
    q.validate();
    std::vector<double> atoms, pp, qq;
    merge_support(p, q, atoms, pp, qq);
    QuadraticCheck out;
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (qq[i] > 0 && pp[i] == 0)
            throw std::invalid_argument("support-violation: q has an atom outside p's support");
        if (pp[i] > 0) {
            const double g = qq[i] / pp[i];
            out.analytic_limit += (1.0 - g) * (1.0 - g) * pp[i];
        }
    }
    out.analytic_limit /= 8.0;
    for (double eps : eps_grid) {
        double rho = 0;
        for (size_t i = 0; i < atoms.size(); ++i)
            rho += std::sqrt(pp[i] * (eps * qq[i] + (1.0 - eps) * pp[i]));
        const double one_minus = 1.0 - rho;
        out.rows.push_back({eps, one_minus, one_minus / (eps * eps)});
    }
    return out;
}

IntervalEstimate fluctuation_interval(std::span<const double> samples, double mass) {
    const size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("fluctuation_interval: need at least 2 samples");
    if (!(mass > 0.0 && mass < 1.0))
        throw std::invalid_argument("fluctuation_interval: mass must be in (0,1)");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const size_t k = std::min(n, size_t(std::ceil(mass * double(n))));
    double best_width = sorted[k - 1] - sorted[0];
    size_t best_i = 0;
    for (size_t i = 1; i + k <= n; ++i) {
        const double w = sorted[i + k - 1] - sorted[i];
        if (w < best_width) {
            best_width = w;
            best_i = i;
        }
    }
    IntervalEstimate est;
    est.a = sorted[best_i];
    est.b = sorted[best_i + k - 1];
    est.width = est.b - est.a;
    // Duplicates can pull extra samples into the chosen window.
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), est.a);
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), est.b);
    est.mass = double(hi - lo) / double(n);
    return est;
}

CoupledBound coupled_interval_bound(std::span<const double> x_samples,
                              std::span<const double> absdiff_samples, double a, double b,
                              double tv) {
    if (!(a <= b)) throw std::invalid_argument("coupled_interval_bound: requires a <= b");
    if (!(tv >= 0.0 && tv <= 1.0)) throw std::invalid_argument("coupled_interval_bound: tv must be in [0,1]");
    if (x_samples.empty() || absdiff_samples.empty())
        throw std::invalid_argument("coupled_interval_bound: empty samples");
    size_t in_interval = 0;
    for (double x : x_samples)
        if (x >= a && x <= b) ++in_interval;
    size_t small_diff = 0;
    const double width = b - a;
    for (double d : absdiff_samples)
        if (std::abs(d) <= width) ++small_diff;
    CoupledBound out;
    out.lhs = double(in_interval) / double(x_samples.size());
    const double pdiff = double(small_diff) / double(absdiff_samples.size());
    out.rhs = 0.5 * (1.0 + pdiff + tv);
    const double se_lhs = std::sqrt(out.lhs * (1.0 - out.lhs) / double(x_samples.size()));
    const double se_diff = std::sqrt(pdiff * (1.0 - pdiff) / double(absdiff_samples.size()));
    out.slack = 3.0 * std::sqrt(se_lhs * se_lhs + 0.25 * se_diff * se_diff);
    out.satisfied = out.lhs <= out.rhs + out.slack;
    return out;
}

namespace {

// Affinity for atomless laws after substituting u = F(t); independent of the
// law itself. Min and max coupling give the same integral by u <-> 1-u.
double affinity_continuous(int m, double eps) {
    const double c = eps * double(m + 1);
    const double base = 1.0 - eps;
    const auto f = [&](double u) { return std::sqrt(c * std::pow(u, double(m)) + base); };
    return adaptive_simpson(f, 0.0, 1.0, kQuadTol);
}

double affinity_discrete(const WeightLaw& law, CouplingKind kind, int m, double eps) {
    // rho = sum_i sqrt(p_i * (eps q_i + (1-eps) p_i)) over the atoms of X,
    // where q is the pmf of the (m+1)-fold extreme. Terms are nonnegative, so
    // truncating an infinite support underestimates rho (the safe direction).
    double rho = 0;
    if (law.kind == LawKind::Geometric) {
        const double lq = std::log1p(-law.p);
        double sf_prev = 1.0;  // P(X > k-1)
        for (int k = 0;; ++k) {
            const double sf = std::exp((k + 1.0) * lq);
            const double pk = sf_prev - sf;
            double qk;
            if (kind == CouplingKind::Min)
                qk = std::pow(sf_prev, double(m + 1)) - std::pow(sf, double(m + 1));
            else
                qk = std::pow(1.0 - sf, double(m + 1)) - std::pow(1.0 - sf_prev, double(m + 1));
            rho += std::sqrt(pk * (eps * qk + (1.0 - eps) * pk));
            sf_prev = sf;
            if (sf < 1e-19) break;
        }
        return rho;
    }
    std::vector<double> atoms, probs;
    if (law.kind == LawKind::BernoulliTwoPoint) {
        if (law.p >= 1.0) {
            atoms = {law.a};
            probs = {1.0};
        } else {
            atoms = {law.a, law.b};
            probs = {law.p, 1.0 - law.p};
        }
    } else {
        atoms = law.atoms;
        probs = law.probs;
    }
    double cum = 0;
    for (size_t i = 0; i < atoms.size(); ++i) {
        const double f_prev = cum;
        cum += probs[i];
        const double f_cur = std::min(cum, 1.0);
        double qi;
        if (kind == CouplingKind::Min)
            qi = std::pow(1.0 - f_prev, double(m + 1)) - std::pow(1.0 - f_cur, double(m + 1));
        else
            qi = std::pow(f_cur, double(m + 1)) - std::pow(f_prev, double(m + 1));
        rho += std::sqrt(probs[i] * (eps * qi + (1.0 - eps) * probs[i]));
    }
    return rho;
}

}  // namespace

double coupling_affinity(const WeightLaw& law, CouplingKind kind, int m, double eps,
                         bool lower_bound) {
    if (m < 1) throw std::invalid_argument("coupling_affinity: m must be >= 1");
    if (!(eps >= 0.0 && eps < 1.0))
        throw std::invalid_argument("coupling_affinity: eps must be in [0,1)");
    if (eps == 0.0) return 1.0;
    double rho = law.is_discrete() ? affinity_discrete(law, kind, m, eps)
                                   : affinity_continuous(m, eps) - (lower_bound ? kQuadTol : 0.0);
    return std::clamp(rho, 0.0, 1.0);
}

}  // namespace growthlab::metrics
