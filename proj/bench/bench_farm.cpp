// Benchmarks the OpenMP replica farm against the serial reference and prints
// raw kernel throughput. Run manually: ./bench_farm [replicas]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "growthlab/experiments.hpp"
#include "growthlab/fpp.hpp"
#include "growthlab/lpp.hpp"
#include "growthlab/parallel.hpp"

using namespace growthlab;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const int replicas = argc > 1 ? std::atoi(argv[1]) : 40;
    const int n = 256;
    auto law = WeightLaw::exponential(1.0);
    const coupling::CouplingSpec spec{CouplingKind::Min, 5};
    const auto region = coupling::Region::edge_ball(n);
    coupling::EpsilonSchedule sched;
    sched.kind = coupling::ScheduleKind::FppRadial;
    sched.alpha = 0.12;
    sched.n = double(n);

    const auto replica = [&](int64_t r) {
        fpp::CoupledEdgeEnvironment env(
            fpp::default_box({0, 0}, {n, 0}),
            coupling::CoupledField(derive_seed(11, uint64_t(r)), law, spec, sched, region));
        const auto p = fpp::perturbed_passage(env, {0, 0}, {n, 0});
        return p.t - p.t_tilde;
    };

    std::printf("farm: fpp coupled replicas, n=%d, %d replicas\n", n, replicas);
    auto t0 = Clock::now();
    const auto serial = run_indexed_serial<double>(replicas, replica);
    const double ts = seconds_since(t0);
    std::printf("  serial   %7.2f s  (%.3f s/replica)\n", ts, ts / replicas);

    t0 = Clock::now();
    const auto parallel = run_indexed<double>(replicas, 0, replica);
    const double tp = seconds_since(t0);
    std::printf("  openmp   %7.2f s  (%.3f s/replica, %d workers)\n", tp, tp / replicas,
                effective_workers(0));
    std::printf("  speedup  %7.2fx\n", ts / tp);

    bool identical = serial.size() == parallel.size();
    for (size_t i = 0; identical && i < serial.size(); ++i) identical = serial[i] == parallel[i];
    std::printf("  outputs  %s\n", identical ? "bit-identical" : "MISMATCH");

    // Kernel throughput: plain passage times and LPP sweeps.
    t0 = Clock::now();
    double sink = 0;
    const int fpp_reps = 10;
    for (int r = 0; r < fpp_reps; ++r) {
        fpp::EdgeEnvironment env(fpp::default_box({0, 0}, {n, 0}), law, derive_seed(12, r));
        sink += fpp::passage_time(env, {0, 0}, {n, 0}).value;
    }
    std::printf("kernel: fpp passage n=%d  %.3f s/solve\n", n, seconds_since(t0) / fpp_reps);

    t0 = Clock::now();
    const int lpp_n = 2048, lpp_reps = 5;
    for (int r = 0; r < lpp_reps; ++r) {
        lpp::VertexEnvironment env(law, derive_seed(13, r), lpp_n + 1);
        sink += lpp::last_passage_value(env, {0, 0}, {lpp_n, lpp_n});
    }
    const double tl = seconds_since(t0) / lpp_reps;
    std::printf("kernel: lpp sweep (%d x %d)  %.3f s  (%.0f Mcells/s)\n", lpp_n, lpp_n, tl,
                double(lpp_n) * lpp_n / tl / 1e6);

    return sink == 12345.0 ? 1 : 0;  // keep the optimizer honest
}
