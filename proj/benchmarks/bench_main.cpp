#include <benchmark/benchmark.h>

#include <vector>

#include "etalon/coating.hpp"
#include "etalon/laser.hpp"
#include "etalon/optimize.hpp"
#include "etalon/overlap.hpp"

using namespace etalon;

namespace {

SeriesParams params_for(double reflectivity) {
    SeriesParams p;
    p.reflectivity = reflectivity;
    return p;
}

void BM_OverlapSeries(benchmark::State& state) {
    const SeriesParams p = params_for(state.range(0) / 100.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(overlap_series(p, 0.3, -0.1));
    }
}
BENCHMARK(BM_OverlapSeries)->Arg(27)->Arg(90)->Arg(99);

void BM_OverlapQuadrature(benchmark::State& state) {
    const SeriesParams p = params_for(0.27);
    QuadratureSpec spec;
    spec.nodes_per_axis = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(overlap_quadrature(p, 0.5, -0.2, spec));
    }
}
BENCHMARK(BM_OverlapQuadrature)->Arg(501)->Arg(2001)->Unit(benchmark::kMillisecond);

void BM_MinimizeOverEta(benchmark::State& state) {
    const SeriesParams p = params_for(0.27);
    const double delta = state.range(0) / 100.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(minimize_over_eta(p, delta));
    }
}
BENCHMARK(BM_MinimizeOverEta)->Arg(5)->Arg(100)->Arg(500);

void BM_SweepRow(benchmark::State& state) {
    const SeriesParams p = params_for(0.9);
    const std::vector<double> grid = {0.01, 0.1, 1.0, 5.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep_delta(p, grid));
    }
}
BENCHMARK(BM_SweepRow)->Unit(benchmark::kMillisecond);

void BM_DesignTable(benchmark::State& state) {
    const auto& materials = default_materials();
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_design_table(materials));
    }
}
BENCHMARK(BM_DesignTable);

void BM_FitFixedLoss(benchmark::State& state) {
    const LaserCavityParams cavity{44.0, 0.11, 0.035, 0.0213, 1e9};
    const EtalonDesign etalon{0.27, 1.447, 4e-3};
    const BeamGeometry beam{1342e-9, 370e-6};
    std::vector<TuningDataPoint> data;
    for (int i = 0; i < 21; ++i) {
        const double theta = -12e-3 + 24e-3 * i / 20.0;
        data.push_back({theta, output_power(cavity, LossModel::simple, etalon, beam, theta).power,
                        {}});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_fixed_loss(cavity, LossModel::simple, etalon, beam, data));
    }
}
BENCHMARK(BM_FitFixedLoss)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
