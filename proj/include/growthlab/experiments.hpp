#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "growthlab/coupling.hpp"
#include "growthlab/metrics.hpp"

// Experiment orchestration: coupled replica farms over (model, law, n),
// fluctuation statistics, rigorous TV budgets, coupled-bound caps, and
// scaling-exponent fits. Replicas run in parallel over their indices and are
// aggregated in index order, so a report is a pure function of (config, seed)
// for any worker count.

namespace growthlab::experiments {

enum class Model { Fpp, Lpp, Polymer };

const char* model_name(Model m);

struct ProbeParams {
    double delta = 0.5;  // weight-gap parameter of the coupled probes
    double rho = 0.5;    // bad-edge density parameter
    double beta = 1.0;   // polymer inverse temperature
};

struct ExperimentConfig {
    Model model = Model::Fpp;
    WeightLaw law = WeightLaw::exponential(1.0);
    std::vector<int> n_list = {16, 64};
    int replicas = 100;
    CouplingKind coupling_kind = CouplingKind::Min;
    int m = 0;        // 0: calibrate from (delta, rho)
    coupling::ScheduleKind schedule_kind = coupling::ScheduleKind::FppRadial;
    double alpha = -1.0;       // < 0: calibrate against tv_target ("auto")
    double schedule_delta = 0.0;  // fpp-box exponent tweak
    double tv_target = 0.25;
    ProbeParams probe;
    uint64_t seed = 1;
    int workers = 0;  // echoed verbatim; runtime override never enters reports

    void validate() const;  // throws std::invalid_argument on incompatibilities
};

struct ReplicaOutcome {
    double value = 0;        // T or log Z in the unperturbed field
    double value_tilde = 0;  // same in the X~ field
    double delta = 0;        // the guaranteed-sign gap (T-T~, T~-T, or logZ~-logZ)
    double d_lb = 0;         // pathwise lower bound on delta
    bool touched_boundary = false;
};

struct TailPoint {
    double kappa = 0;
    double threshold = 0;  // kappa * sqrt(log n)
    double phat = 0;       // empirical P(delta >= threshold)
};

// One evaluation of P(a <= X <= b) <= (1 + P(|X-Y| <= b-a) + tv)/2 with the
// rigorous TV upper bound substituted for the unobservable exact distance.
struct CapCheck {
    double a = 0, b = 0, width = 0;
    double mass_in_interval = 0;   // empirical P(a <= value <= b)
    double p_delta_le_width = 0;   // empirical P(|delta| <= width)
    double cap = 0;
    double slack = 0;              // 3 * combined Monte Carlo SE
    bool violated = false;
};

struct PerNReport {
    int n = 0;
    int replicas = 0;
    int m = 0;
    double alpha = 0;
    double tv_bound = 0;
    double sum_eps_sq = 0;
    double mean = 0, sd = 0, se = 0, variance = 0, min = 0, max = 0;
    std::vector<double> masses;  // {0.5, 0.75, 0.9}
    std::vector<metrics::IntervalEstimate> intervals;
    std::vector<TailPoint> tail;
    double delta_mean = 0, delta_max = 0, d_lb_mean = 0;
    std::vector<CapCheck> cap_checks;
    int boundary_touches = 0;
    std::vector<ReplicaOutcome> outcomes;  // replica order; feeds the JSONL sink
};

struct ScalingFit {
    enum class Kind { PowerInN, SqrtLogN };
    Kind kind = Kind::PowerInN;
    double exponent = 0;   // power: slope of log stat vs log n; sqrtlog: slope
    double intercept = 0;
    double r2 = 0;
};

struct FluctuationReport {
    ExperimentConfig config;
    std::vector<PerNReport> per_n;
    std::optional<ScalingFit> variance_power_fit;  // Var(value) vs n
    std::optional<ScalingFit> width_sqrtlog_fit;   // 0.75-width vs sqrt(log n)
};

inline constexpr double kKappaStep = 0.05;
inline constexpr int kKappaCount = 60;

// Runs the full coupled experiment. `workers_override` < 0 uses
// config.workers; the override affects scheduling only, never results.
FluctuationReport run_coupled_experiment(const ExperimentConfig& config,
                                         int workers_override = -1);

// Least-squares fits; require >= 3 points and positive statistics for the
// power model. Throws std::domain_error("degenerate-fit") on zero variance.
ScalingFit scaling_fit_power(std::span<const double> n_values, std::span<const double> stats);
ScalingFit scaling_fit_sqrtlog(std::span<const double> n_values, std::span<const double> stats);

// Evaluates the coupled bound for an arbitrary interval against a per-n block.
CapCheck coupled_bound_conclusion(const PerNReport& block, double a, double b);

// Uncoupled observable samples (T or log Z per replica), for width trends and
// variance-scaling studies.
enum class LppEndpoint { Shell, Corner };  // (ceil(n/2), floor(n/2)) vs (n, n)

std::vector<double> observable_samples(Model model, const WeightLaw& law, int n, int replicas,
                                       uint64_t seed, int workers, double beta = 1.0,
                                       LppEndpoint endpoint = LppEndpoint::Corner);

struct ScalingStudyRow {
    int n = 0;
    double mean = 0;
    double variance = 0;
};

struct ScalingStudy {
    std::vector<ScalingStudyRow> rows;
    ScalingFit variance_fit;
};

// Variance-vs-n diagnostic (LPP corner endpoints or FPP axis endpoints).
ScalingStudy variance_scaling_study(Model model, const WeightLaw& law,
                                    const std::vector<int>& n_list, int replicas, uint64_t seed,
                                    int workers, double beta = 1.0);

// Re-aggregates a per-n block from merged replica outcomes (report-merge).
PerNReport aggregate_per_n(int n, int m, double alpha, double tv_bound, double sum_eps_sq,
                           std::vector<ReplicaOutcome> outcomes);

}  // namespace growthlab::experiments
