#include "etalon/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "etalon/analytic.hpp"
#include "etalon/minimize.hpp"

namespace etalon {

namespace {
constexpr int kPrescanPoints = 101;
constexpr double kEtaTolerance = 1e-8;  // comfortably below the 1e-7 contract
}  // namespace

OptimizationResult minimize_over_eta(const SeriesParams& params, double delta) {
    params.validate();
    if (!(delta >= 0.0)) throw std::invalid_argument("minimize_over_eta: delta must be >= 0");

    const double lo = -(1.5 + delta);
    const double hi = 0.1;

    OptimizationResult result;
    result.bracket_lo = lo;
    result.bracket_hi = hi;

    const auto loss_at = [&](double eta) { return overlap_series(params, delta, eta).loss; };

    // Coarse scan picks the global basin; the series can develop side minima
    // once the orders separate. Ties go to the eta nearest zero.
    const double step = (hi - lo) / (kPrescanPoints - 1);
    int best = 0;
    double best_loss = loss_at(lo);
    for (int i = 1; i < kPrescanPoints; ++i) {
        const double eta = lo + i * step;
        const double loss = loss_at(eta);
        if (loss < best_loss ||
            (loss == best_loss && std::abs(eta) < std::abs(lo + best * step))) {
            best = i;
            best_loss = loss;
        }
    }
    result.iterations = kPrescanPoints;

    const double refine_lo = std::max(lo, lo + (best - 1) * step);
    const double refine_hi = std::min(hi, lo + (best + 1) * step);

    BracketMinOptions options;
    options.x_tolerance = kEtaTolerance;
    const BracketMinResult refined = brent_minimize(loss_at, refine_lo, refine_hi, options);

    result.iterations += refined.evaluations;
    result.converged = refined.converged;
    result.eta_opt = refined.x;
    result.loss_opt = refined.fx;
    if (best_loss < refined.fx) {  // cap cut refinement short; keep best-so-far
        result.eta_opt = lo + best * step;
        result.loss_opt = best_loss;
    }
    return result;
}

std::vector<double> default_delta_grid() {
    constexpr int kPoints = 200;
    constexpr double kLogMin = -3.0, kLogMax = 1.0;
    std::vector<double> grid(kPoints);
    for (int i = 0; i < kPoints; ++i) {
        const double t = kLogMin + (kLogMax - kLogMin) * i / (kPoints - 1);
        grid[i] = std::pow(10.0, t);
    }
    return grid;
}

SweepTable sweep_delta(const SeriesParams& params, std::span<const double> delta_grid,
                       std::optional<double> refractive_index, int threads) {
    params.validate();
    if (delta_grid.empty()) throw std::invalid_argument("sweep_delta: empty delta grid");
    for (size_t i = 0; i < delta_grid.size(); ++i) {
        if (!(delta_grid[i] > 0.0))
            throw std::invalid_argument("sweep_delta: grid values must be > 0");
        if (i > 0 && !(delta_grid[i] > delta_grid[i - 1]))
            throw std::invalid_argument("sweep_delta: grid must be strictly increasing");
    }
    if (refractive_index && !(*refractive_index >= 1.0))
        throw std::invalid_argument("sweep_delta: refractive index must be >= 1");

    SweepTable table;
    table.reflectivity = params.reflectivity;
    table.bulk_amplitude_transmission = params.bulk_amplitude_transmission;
    table.truncation_tolerance = params.truncation_tolerance;
    table.eta_tolerance = kEtaTolerance;
    table.refractive_index = refractive_index;
    table.rows.resize(delta_grid.size());

    const auto run_row = [&](size_t i) {
        const OptimizationResult r = minimize_over_eta(params, delta_grid[i]);
        table.rows[i] = SweepRow{delta_grid[i], r.eta_opt, r.loss_opt, r.converged};
    };

    threads = std::clamp<int>(threads, 1, static_cast<int>(delta_grid.size()));
    if (threads == 1) {
        for (size_t i = 0; i < delta_grid.size(); ++i) run_row(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (size_t i = t; i < delta_grid.size(); i += threads) run_row(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    if (refractive_index) {
        table.eta_simple.reserve(delta_grid.size());
        for (const double delta : delta_grid)
            table.eta_simple.push_back(simple_insertion_offset(*refractive_index, delta));
    }
    return table;
}

}  // namespace etalon
