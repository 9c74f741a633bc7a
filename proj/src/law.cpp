#include "growthlab/law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace growthlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

const char* law_kind_name(LawKind kind) {
    switch (kind) {
        case LawKind::Exponential: return "exponential";
        case LawKind::Geometric: return "geometric";
        case LawKind::BernoulliTwoPoint: return "bernoulli-two-point";
        case LawKind::Uniform: return "uniform";
        case LawKind::FiniteDiscrete: return "finite-discrete";
        case LawKind::Gamma: return "gamma";
    }
    return "?";
}

WeightLaw WeightLaw::exponential(double rate, double offset) {
    WeightLaw law;
    law.kind = LawKind::Exponential;
    law.rate = rate;
    law.offset = offset;
    law.validate();
    return law;
}

WeightLaw WeightLaw::geometric(double p, double offset) {
    WeightLaw law;
    law.kind = LawKind::Geometric;
    law.p = p;
    law.offset = offset;
    law.validate();
    return law;
}

WeightLaw WeightLaw::bernoulli_two_point(double a, double b, double p, double offset) {
    WeightLaw law;
    law.kind = LawKind::BernoulliTwoPoint;
    law.a = a;
    law.b = b;
    law.p = p;
    law.offset = offset;
    law.validate();
    return law;
}

WeightLaw WeightLaw::uniform(double lo, double hi, double offset) {
    WeightLaw law;
    law.kind = LawKind::Uniform;
    law.a = lo;
    law.b = hi;
    law.offset = offset;
    law.validate();
    return law;
}

WeightLaw WeightLaw::finite_discrete(std::vector<double> atoms, std::vector<double> probs,
                                     double offset) {
    WeightLaw law;
    law.kind = LawKind::FiniteDiscrete;
    law.atoms = std::move(atoms);
    law.probs = std::move(probs);
    law.offset = offset;
    law.validate();
    return law;
}

WeightLaw WeightLaw::gamma(double shape, double scale, double offset) {
    WeightLaw law;
    law.kind = LawKind::Gamma;
    law.shape = shape;
    law.scale = scale;
    law.offset = offset;
    law.validate();
    return law;
}

WeightLaw WeightLaw::point_mass(double c) { return finite_discrete({c}, {1.0}); }

void WeightLaw::validate() const {
    require(std::isfinite(offset), "law: offset must be finite");
    switch (kind) {
        case LawKind::Exponential:
            require(rate > 0 && std::isfinite(rate), "exponential: rate must be > 0");
            break;
        case LawKind::Geometric:
            require(p > 0 && p < 1, "geometric: p must be in (0,1)");
            break;
        case LawKind::BernoulliTwoPoint:
            require(a < b, "bernoulli-two-point: requires a < b");
            require(std::isfinite(a) && std::isfinite(b), "bernoulli-two-point: values must be finite");
            require(p > 0 && p <= 1, "bernoulli-two-point: p must be in (0,1]");
            break;
        case LawKind::Uniform:
            require(a < b && std::isfinite(a) && std::isfinite(b), "uniform: requires lo < hi");
            break;
        case LawKind::FiniteDiscrete: {
            require(!atoms.empty(), "finite-discrete: needs at least one atom");
            require(atoms.size() == probs.size(), "finite-discrete: atoms/probs size mismatch");
            double sum = 0;
            for (size_t i = 0; i < atoms.size(); ++i) {
                require(std::isfinite(atoms[i]), "finite-discrete: atoms must be finite");
                if (i > 0) require(atoms[i - 1] < atoms[i], "finite-discrete: atoms must be strictly increasing");
                require(probs[i] >= 0, "finite-discrete: probs must be >= 0");
                sum += probs[i];
            }
            require(std::abs(sum - 1.0) <= 1e-12, "finite-discrete: probs must sum to 1 within 1e-12");
            break;
        }
        case LawKind::Gamma:
            require(shape > 0 && std::isfinite(shape), "gamma: shape must be > 0");
            require(scale > 0 && std::isfinite(scale), "gamma: scale must be > 0");
            break;
    }
}

double WeightLaw::cdf(double t) const {
    const double s = t - offset;
    switch (kind) {
        case LawKind::Exponential:
            return s <= 0 ? 0.0 : -std::expm1(-rate * s);
        case LawKind::Geometric: {
            if (s < 0) return 0.0;
            const double k = std::floor(s);
            // 1 - (1-p)^{k+1}
            return -std::expm1((k + 1.0) * std::log1p(-p));
        }
        case LawKind::BernoulliTwoPoint:
            if (s < a) return 0.0;
            if (s < b) return p;
            return 1.0;
        case LawKind::Uniform:
            if (s <= a) return 0.0;
            if (s >= b) return 1.0;
            return (s - a) / (b - a);
        case LawKind::FiniteDiscrete: {
            double acc = 0;
            for (size_t i = 0; i < atoms.size(); ++i) {
                if (atoms[i] <= s) acc += probs[i];
                else break;
            }
            return std::min(acc, 1.0);
        }
        case LawKind::Gamma:
            return s <= 0 ? 0.0 : reg_lower_gamma(shape, s / scale);
    }
    return 0.0;
}

namespace {

// Gamma quantile: safeguarded Newton on P(shape, x) = u.
double gamma_quantile_std(double shape, double u) {
    if (u <= 0) return 0.0;
    double lo = 0.0;
    double hi = shape + 10.0 * std::sqrt(shape) + 10.0;
    while (reg_lower_gamma(shape, hi) < u) hi *= 2.0;
    // Start from the mean, then Newton with bisection fallback.
    double x = shape;
    const double lg = std::lgamma(shape);
    for (int it = 0; it < 200; ++it) {
        const double f = reg_lower_gamma(shape, x) - u;
        if (f > 0) hi = x;
        else lo = x;
        const double logpdf = (shape - 1.0) * std::log(x) - x - lg;
        double step = f / std::exp(logpdf);
        double next = x - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-14 * (1.0 + std::abs(x))) return next;
        x = next;
    }
    return x;
}

}  // namespace

double WeightLaw::quantile(double u) const {
    switch (kind) {
        case LawKind::Exponential:
            return offset - std::log1p(-u) / rate;
        case LawKind::Geometric: {
            // Smallest k >= 0 with 1-(1-p)^{k+1} >= u, computed then verified.
            const double r = std::log1p(-u) / std::log1p(-p);
            double k = std::max(0.0, std::ceil(r - 1.0));
            auto cdf_k = [&](double kk) { return -std::expm1((kk + 1.0) * std::log1p(-p)); };
            while (cdf_k(k) < u) k += 1.0;
            while (k > 0 && cdf_k(k - 1.0) >= u) k -= 1.0;
            return offset + k;
        }
        case LawKind::BernoulliTwoPoint:
            return offset + (u <= p ? a : b);
        case LawKind::Uniform:
            return offset + a + u * (b - a);
        case LawKind::FiniteDiscrete: {
            double acc = 0;
            for (size_t i = 0; i < atoms.size(); ++i) {
                acc += probs[i];
                if (acc >= u) return offset + atoms[i];
            }
            return offset + atoms.back();
        }
        case LawKind::Gamma:
            return offset + scale * gamma_quantile_std(shape, u);
    }
    return offset;
}

double WeightLaw::ess_inf() const {
    switch (kind) {
        case LawKind::Exponential:
        case LawKind::Geometric:
        case LawKind::Gamma:
            return offset;
        case LawKind::BernoulliTwoPoint:
            return offset + a;
        case LawKind::Uniform:
            return offset + a;
        case LawKind::FiniteDiscrete: {
            // Skip leading zero-probability atoms.
            for (size_t i = 0; i < atoms.size(); ++i)
                if (probs[i] > 0) return offset + atoms[i];
            return offset + atoms.back();
        }
    }
    return offset;
}

double WeightLaw::ess_sup() const {
    switch (kind) {
        case LawKind::Exponential:
        case LawKind::Geometric:
        case LawKind::Gamma:
            return kInf;
        case LawKind::BernoulliTwoPoint:
            return offset + (p >= 1.0 ? a : b);
        case LawKind::Uniform:
            return offset + b;
        case LawKind::FiniteDiscrete: {
            for (size_t i = atoms.size(); i-- > 0;)
                if (probs[i] > 0) return offset + atoms[i];
            return offset + atoms.front();
        }
    }
    return kInf;
}

double WeightLaw::mean() const {
    switch (kind) {
        case LawKind::Exponential: return offset + 1.0 / rate;
        case LawKind::Geometric: return offset + (1.0 - p) / p;
        case LawKind::BernoulliTwoPoint: return offset + p * a + (1.0 - p) * b;
        case LawKind::Uniform: return offset + 0.5 * (a + b);
        case LawKind::FiniteDiscrete: {
            double m = 0;
            for (size_t i = 0; i < atoms.size(); ++i) m += atoms[i] * probs[i];
            return offset + m;
        }
        case LawKind::Gamma: return offset + shape * scale;
    }
    return offset;
}

double WeightLaw::atom_at(double t) const {
    const double s = t - offset;
    switch (kind) {
        case LawKind::Exponential:
        case LawKind::Uniform:
        case LawKind::Gamma:
            return 0.0;
        case LawKind::Geometric: {
            if (s < 0 || s != std::floor(s)) return 0.0;
            return p * std::exp(s * std::log1p(-p));
        }
        case LawKind::BernoulliTwoPoint:
            if (s == a) return p;
            if (s == b) return 1.0 - p;
            return 0.0;
        case LawKind::FiniteDiscrete:
            for (size_t i = 0; i < atoms.size(); ++i)
                if (atoms[i] == s) return probs[i];
            return 0.0;
    }
    return 0.0;
}

bool WeightLaw::is_discrete() const {
    return kind == LawKind::Geometric || kind == LawKind::BernoulliTwoPoint ||
           kind == LawKind::FiniteDiscrete;
}

std::string WeightLaw::describe() const {
    std::ostringstream os;
    os << law_kind_name(kind) << "{";
    switch (kind) {
        case LawKind::Exponential: os << "rate=" << rate; break;
        case LawKind::Geometric: os << "p=" << p; break;
        case LawKind::BernoulliTwoPoint: os << "a=" << a << ", b=" << b << ", p=" << p; break;
        case LawKind::Uniform: os << "lo=" << a << ", hi=" << b; break;
        case LawKind::FiniteDiscrete: os << atoms.size() << " atoms"; break;
        case LawKind::Gamma: os << "shape=" << shape << ", scale=" << scale; break;
    }
    os << "}";
    if (offset != 0.0) os << "+" << offset;
    return os.str();
}

double min_of_m_cdf(const WeightLaw& law, int m, double t) {
    if (m < 1) throw std::invalid_argument("min_of_m_cdf: m must be >= 1");
    const double sf = 1.0 - law.cdf(t);
    return 1.0 - std::pow(sf, double(m + 1));
}

ConditionReport check_conditions(const WeightLaw& law) {
    ConditionReport rep;
    rep.atom_at_essinf = law.atom_at(law.ess_inf());
    const double sup = law.ess_sup();
    rep.atom_at_esssup = std::isfinite(sup) ? law.atom_at(sup) : 0.0;
    rep.passes_undirected = rep.atom_at_essinf < thresholds::kUndirectedBond;
    rep.passes_directed_bond = rep.atom_at_essinf < thresholds::kDirectedBondUpper;
    rep.passes_directed_site = rep.atom_at_esssup < thresholds::kDirectedSiteUpper;
    // All built-in kinds have exponential or bounded tails, so the square of the
    // 4-fold minimum is always integrable.
    rep.moment_flag_min4_sq = MomentFlag::KnownFinite;
    return rep;
}

int calibrate_m(const WeightLaw& law, double delta, double rho) {
    if (!(delta > 0)) throw std::invalid_argument("calibrate_m: delta must be > 0");
    if (!(rho > 0 && rho <= 1)) throw std::invalid_argument("calibrate_m: rho must be in (0,1]");
    const double f = law.cdf(law.ess_inf() + delta);
    if (f <= 0) throw std::domain_error("calibrate_m: non-calibratable, no mass within delta of essinf");
    const double target = std::pow(1.0 / 3.0, 1.0 / rho);  // need (1-f)^m < target
    if (f >= 1.0) return 1;
    const double q = 1.0 - f;
    int m = std::max(1, int(std::ceil(std::log(target) / std::log(q))));
    while (std::pow(q, double(m)) >= target) ++m;
    while (m > 1 && std::pow(q, double(m - 1)) < target) --m;
    return m;
}

double reg_lower_gamma(double a, double x) {
    if (x <= 0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // Series expansion of P(a,x).
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Continued fraction for Q(a,x) (modified Lentz).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

}  // namespace growthlab
