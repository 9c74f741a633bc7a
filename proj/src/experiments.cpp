#include "growthlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "growthlab/fpp.hpp"
#include "growthlab/lpp.hpp"
#include "growthlab/parallel.hpp"
#include "growthlab/polymer.hpp"

namespace growthlab::experiments {

namespace {

Coord lpp_shell_endpoint(int n) { return Coord{(n + 1) / 2, n / 2}; }

coupling::Region region_for(const ExperimentConfig& cfg, int n) {
    switch (cfg.model) {
        case Model::Fpp:
            if (cfg.schedule_kind == coupling::ScheduleKind::FppBox)
                return coupling::Region::edge_tube(
                    n, std::pow(double(n), 0.75 + 2.0 * cfg.schedule_delta), 1.0, 0.0);
            return coupling::Region::edge_ball(n);
        case Model::Lpp:
            return coupling::Region::site_rect(lpp_shell_endpoint(n));
        case Model::Polymer:
            return coupling::Region::site_triangle(n);
    }
    return coupling::Region::edge_ball(n);
}

coupling::EpsilonSchedule schedule_for(const ExperimentConfig& cfg, int n, double alpha) {
    coupling::EpsilonSchedule s;
    s.kind = cfg.schedule_kind;
    s.alpha = alpha;
    s.n = std::max(2.0, double(n));
    s.delta = cfg.schedule_delta;
    return s;
}

// Copy-count calibration. The min side is the essinf formula from lawcore;
// the max side mirrors it at the (possibly truncated) essential supremum:
// smallest m with P(max of m copies >= S' - delta) > 1 - (1/3)^{1/rho}.
int calibrate_m_for(const WeightLaw& law, CouplingKind kind, double delta, double rho) {
    if (kind == CouplingKind::Min) return calibrate_m(law, delta, rho);
    const double s_prime = lpp::choose_s_prime(law, delta, 0.5);
    const double f = law.cdf(s_prime - delta);  // P(one copy misses)
    if (f <= 0) return 1;
    const double target = std::pow(1.0 / 3.0, 1.0 / rho);
    int m = std::max(1, int(std::ceil(std::log(target) / std::log(f))));
    while (std::pow(f, double(m)) >= target) ++m;
    while (m > 1 && std::pow(f, double(m - 1)) < target) --m;
    return m;
}

double mean_of(std::span<const double> v) {
    double acc = 0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / double(v.size());
}

double variance_of(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    double acc = 0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / double(v.size() - 1);
}

ScalingFit least_squares(std::span<const double> xs, std::span<const double> ys,
                         ScalingFit::Kind kind) {
    const size_t n = xs.size();
    if (n < 3) throw std::invalid_argument("scaling_fit: need at least 3 points");
    const double mx = mean_of(xs), my = mean_of(ys);
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0 || syy == 0) throw std::domain_error("degenerate-fit: statistic has no variance");
    ScalingFit fit;
    fit.kind = kind;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    fit.r2 = (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace

const char* model_name(Model m) {
    switch (m) {
        case Model::Fpp: return "fpp";
        case Model::Lpp: return "lpp";
        case Model::Polymer: return "polymer";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    law.validate();
    if (n_list.empty()) throw std::invalid_argument("config: n_list must not be empty");
    for (int n : n_list)
        if (n < 2) throw std::invalid_argument("config: every n must be >= 2");
    if (replicas < 2)
        throw std::invalid_argument("config: replicas must be >= 2 (interval statistics)");
    if (m < 0) throw std::invalid_argument("config: m must be >= 0 (0 = auto)");
    if (!std::isfinite(alpha) && !(alpha < 0))
        throw std::invalid_argument("config: alpha must be finite or negative (auto)");
    if (!(tv_target > 0 && tv_target < 1))
        throw std::invalid_argument("config: tv_target must be in (0,1)");
    if (!(probe.delta > 0) || !(probe.rho > 0 && probe.rho <= 1) || !(probe.beta > 0))
        throw std::invalid_argument("config: probe parameters out of range");
    const bool min_model = model == Model::Fpp;
    if (min_model && coupling_kind != CouplingKind::Min)
        throw std::invalid_argument("config: fpp requires the min coupling");
    if (!min_model && coupling_kind != CouplingKind::Max)
        throw std::invalid_argument("config: lpp/polymer require the max coupling");
    using SK = coupling::ScheduleKind;
    const bool edge_schedule =
        schedule_kind == SK::FppRadial || schedule_kind == SK::FppBox;
    if (model == Model::Fpp && !edge_schedule && schedule_kind != SK::Uniform)
        throw std::invalid_argument("config: fpp takes fpp-radial, fpp-box, or uniform schedules");
    if (model != Model::Fpp && edge_schedule)
        throw std::invalid_argument("config: lpp/polymer take lpp-radial or uniform schedules");
}

CapCheck coupled_bound_conclusion(const PerNReport& block, double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("coupled_bound_conclusion: requires a <= b");
    CapCheck c;
    c.a = a;
    c.b = b;
    c.width = b - a;
    size_t in_interval = 0, small_diff = 0;
    for (const auto& o : block.outcomes) {
        if (o.value >= a && o.value <= b) ++in_interval;
        if (std::abs(o.delta) <= c.width) ++small_diff;
    }
    const double nrep = double(block.outcomes.size());
    c.mass_in_interval = double(in_interval) / nrep;
    c.p_delta_le_width = double(small_diff) / nrep;
    c.cap = 0.5 * (1.0 + c.p_delta_le_width + block.tv_bound);
    const double se_lhs = std::sqrt(c.mass_in_interval * (1 - c.mass_in_interval) / nrep);
    const double se_d = std::sqrt(c.p_delta_le_width * (1 - c.p_delta_le_width) / nrep);
    c.slack = 3.0 * std::sqrt(se_lhs * se_lhs + 0.25 * se_d * se_d);
    c.violated = c.mass_in_interval > c.cap + c.slack;
    return c;
}

PerNReport aggregate_per_n(int n, int m, double alpha, double tv_bound, double sum_eps_sq,
                           std::vector<ReplicaOutcome> outcomes) {
    PerNReport rep;
    rep.n = n;
    rep.replicas = int(outcomes.size());
    rep.m = m;
    rep.alpha = alpha;
    rep.tv_bound = tv_bound;
    rep.sum_eps_sq = sum_eps_sq;
    rep.outcomes = std::move(outcomes);

    std::vector<double> values, deltas;
    values.reserve(rep.outcomes.size());
    deltas.reserve(rep.outcomes.size());
    rep.min = 1e300;
    rep.max = -1e300;
    for (const auto& o : rep.outcomes) {
        values.push_back(o.value);
        deltas.push_back(o.delta);
        rep.delta_mean += o.delta;
        rep.d_lb_mean += o.d_lb;
        rep.delta_max = std::max(rep.delta_max, o.delta);
        rep.min = std::min(rep.min, o.value);
        rep.max = std::max(rep.max, o.value);
        rep.boundary_touches += o.touched_boundary ? 1 : 0;
    }
    const double nrep = double(rep.outcomes.size());
    rep.delta_mean /= nrep;
    rep.d_lb_mean /= nrep;
    rep.mean = mean_of(values);
    rep.variance = variance_of(values, rep.mean);
    rep.sd = std::sqrt(rep.variance);
    rep.se = rep.sd / std::sqrt(nrep);

    rep.masses = {0.5, 0.75, 0.9};
    for (double mass : rep.masses)
        rep.intervals.push_back(metrics::fluctuation_interval(values, mass));

    const double sqrt_log_n = std::sqrt(std::log(double(n)));
    for (int j = 1; j <= kKappaCount; ++j) {
        TailPoint tp;
        tp.kappa = kKappaStep * j;
        tp.threshold = tp.kappa * sqrt_log_n;
        size_t hits = 0;
        for (double d : deltas)
            if (d >= tp.threshold) ++hits;
        tp.phat = double(hits) / nrep;
        rep.tail.push_back(tp);
    }

    // Coupled-bound self-test: the 0.9 shortest interval plus the windows of
    // maximal empirical mass at the |delta| quartile widths.
    const auto& wide = rep.intervals.back();
    rep.cap_checks.push_back(coupled_bound_conclusion(rep, wide.a, wide.b));
    std::vector<double> absd(deltas.size());
    for (size_t i = 0; i < deltas.size(); ++i) absd[i] = std::abs(deltas[i]);
    std::sort(absd.begin(), absd.end());
    std::vector<double> sorted_values = values;
    std::sort(sorted_values.begin(), sorted_values.end());
    for (double q : {0.25, 0.5, 0.75}) {
        const double w = absd[size_t(q * double(absd.size() - 1))];
        // Densest window of width w over the sorted sample.
        size_t best_count = 0, lo = 0;
        size_t best_lo = 0;
        for (size_t hi = 0; hi < sorted_values.size(); ++hi) {
            while (sorted_values[hi] - sorted_values[lo] > w) ++lo;
            if (hi - lo + 1 > best_count) {
                best_count = hi - lo + 1;
                best_lo = lo;
            }
        }
        rep.cap_checks.push_back(
            coupled_bound_conclusion(rep, sorted_values[best_lo], sorted_values[best_lo] + w));
    }
    return rep;
}

FluctuationReport run_coupled_experiment(const ExperimentConfig& config, int workers_override) {
    config.validate();
    const int workers = workers_override < 0 ? config.workers : workers_override;
    FluctuationReport report;
    report.config = config;

    const coupling::CouplingSpec spec{
        config.coupling_kind,
        config.m > 0 ? config.m
                     : calibrate_m_for(config.law, config.coupling_kind, config.probe.delta,
                                       config.probe.rho)};
    for (size_t ni = 0; ni < config.n_list.size(); ++ni) {
        const int n = config.n_list[ni];
        const auto region = region_for(config, n);
        double alpha = config.alpha;
        if (alpha < 0)
            alpha = coupling::calibrate_alpha(config.law, spec, config.schedule_kind,
                                              std::max(2.0, double(n)), config.schedule_delta,
                                              region, config.tv_target);
        const auto sched = schedule_for(config, n, alpha);
        const double tv = coupling::tv_upper_bound(config.law, spec, sched, region);
        const double sums = coupling::sum_eps_sq(sched, region);

        auto outcomes = run_indexed<ReplicaOutcome>(config.replicas, workers, [&](int64_t r) {
            const uint64_t rseed = derive_seed(config.seed, (uint64_t(ni) << 32) | uint64_t(r));
            ReplicaOutcome o;
            switch (config.model) {
                case Model::Fpp: {
                    const Coord y{n, 0};
                    fpp::CoupledEdgeEnvironment env(
                        fpp::default_box({0, 0}, y),
                        coupling::CoupledField(rseed, config.law, spec, sched, region));
                    const auto p = fpp::perturbed_passage(env, {0, 0}, y);
                    o = {p.t, p.t_tilde, p.t - p.t_tilde, p.d_lb, p.touched_boundary};
                    break;
                }
                case Model::Lpp: {
                    coupling::CoupledField field(rseed, config.law, spec, sched, region);
                    const auto p = lpp::perturbed_lpp(field, lpp_shell_endpoint(n));
                    o = {p.t, p.t_tilde, p.t_tilde - p.t, p.d_lb, false};
                    break;
                }
                case Model::Polymer: {
                    coupling::CoupledField field(rseed, config.law, spec, sched, region);
                    const auto p = polymer::perturbed_free_energy(field, config.probe.beta, n);
                    o = {p.log_z, p.log_z_tilde, p.log_z_tilde - p.log_z, p.jensen_lb, false};
                    break;
                }
            }
            return o;
        });
        report.per_n.push_back(aggregate_per_n(n, spec.m, alpha, tv, sums, std::move(outcomes)));
    }

    if (report.per_n.size() >= 3) {
        std::vector<double> ns, vars, widths, sqrtlogs;
        bool positive = true;
        for (const auto& block : report.per_n) {
            ns.push_back(double(block.n));
            vars.push_back(block.variance);
            widths.push_back(block.intervals[1].width);  // mass 0.75
            sqrtlogs.push_back(std::sqrt(std::log(double(block.n))));
            positive = positive && block.variance > 0;
        }
        // Degenerate statistics (point-mass laws) just omit the optional fits.
        if (positive) {
            std::vector<double> log_ns(ns.size()), log_vars(ns.size());
            for (size_t i = 0; i < ns.size(); ++i) {
                log_ns[i] = std::log(ns[i]);
                log_vars[i] = std::log(vars[i]);
            }
            try {
                report.variance_power_fit =
                    least_squares(log_ns, log_vars, ScalingFit::Kind::PowerInN);
            } catch (const std::domain_error&) {
            }
        }
        try {
            report.width_sqrtlog_fit = least_squares(sqrtlogs, widths, ScalingFit::Kind::SqrtLogN);
        } catch (const std::domain_error&) {
        }
    }
    return report;
}

ScalingFit scaling_fit_power(std::span<const double> n_values, std::span<const double> stats) {
    std::vector<double> lx(n_values.size()), ly(stats.size());
    for (size_t i = 0; i < n_values.size(); ++i) {
        if (!(n_values[i] > 0) || !(stats[i] > 0))
            throw std::invalid_argument("scaling_fit_power: requires positive data");
        lx[i] = std::log(n_values[i]);
        ly[i] = std::log(stats[i]);
    }
    return least_squares(lx, ly, ScalingFit::Kind::PowerInN);
}

ScalingFit scaling_fit_sqrtlog(std::span<const double> n_values, std::span<const double> stats) {
    std::vector<double> sx(n_values.size());
    for (size_t i = 0; i < n_values.size(); ++i) {
        if (!(n_values[i] > 1)) throw std::invalid_argument("scaling_fit_sqrtlog: requires n > 1");
        sx[i] = std::sqrt(std::log(n_values[i]));
    }
    return least_squares(sx, std::vector<double>(stats.begin(), stats.end()),
                         ScalingFit::Kind::SqrtLogN);
}

std::vector<double> observable_samples(Model model, const WeightLaw& law, int n, int replicas,
                                       uint64_t seed, int workers, double beta,
                                       LppEndpoint endpoint) {
    return run_indexed<double>(replicas, workers, [&](int64_t r) {
        const uint64_t rseed = derive_seed(seed, (uint64_t(n) << 32) | uint64_t(r), 1);
        switch (model) {
            case Model::Fpp: {
                fpp::EdgeEnvironment env(fpp::default_box({0, 0}, {n, 0}), law, rseed);
                return fpp::passage_time(env, {0, 0}, {n, 0}).value;
            }
            case Model::Lpp: {
                lpp::VertexEnvironment env(law, rseed, 2 * n + 2);
                const Coord v = endpoint == LppEndpoint::Corner ? Coord{n, n}
                                                                : lpp_shell_endpoint(n);
                return lpp::last_passage_value(env, {0, 0}, v);
            }
            case Model::Polymer: {
                lpp::VertexEnvironment env(law, rseed, n + 2);
                return polymer::free_energy(env, beta, n);
            }
        }
        return 0.0;
    });
}

ScalingStudy variance_scaling_study(Model model, const WeightLaw& law,
                                    const std::vector<int>& n_list, int replicas, uint64_t seed,
                                    int workers, double beta) {
    ScalingStudy study;
    std::vector<double> ns, vars;
    for (int n : n_list) {
        const auto samples = observable_samples(model, law, n, replicas, seed, workers, beta);
        const double mean = mean_of(samples);
        const double var = variance_of(samples, mean);
        study.rows.push_back({n, mean, var});
        ns.push_back(double(n));
        vars.push_back(var);
    }
    study.variance_fit = scaling_fit_power(ns, vars);
    return study;
}

}  // namespace growthlab::experiments
