#pragma once

#include <optional>
#include <span>
#include <vector>

#include "etalon/overlap.hpp"

// Numeric loss minimization over the lateral mode offset eta, and delta
// sweeps across the crossover between the quadratic and separated-order
// limits.

namespace etalon {

struct OptimizationResult {
    double eta_opt = 0.0;
    double loss_opt = 0.0;
    int iterations = 0;  // total series evaluations (pre-scan + refinement)
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool converged = false;
};

// Global minimum of eta -> overlap_series(params, delta, eta).loss over the
// bracket [-(1.5 + delta), 0.1]. A 101-point pre-scan selects the basin
// (ties broken toward the eta closest to 0), then Brent refines to
// |d eta| <= 1e-7. Deterministic for identical inputs.
OptimizationResult minimize_over_eta(const SeriesParams& params, double delta);

struct SweepRow {
    double delta = 0.0;
    double eta_opt = 0.0;
    double loss_opt = 0.0;
    bool converged = false;
};

struct SweepTable {
    double reflectivity = 0.0;
    double bulk_amplitude_transmission = 1.0;
    double truncation_tolerance = 0.0;
    double eta_tolerance = 0.0;
    std::vector<SweepRow> rows;
    // Simple-insertion offsets for comparison, parallel to rows; filled when a
    // refractive index is supplied.
    std::optional<double> refractive_index;
    std::vector<double> eta_simple;
};

// 200 log-spaced points over [1e-3, 10].
std::vector<double> default_delta_grid();

// One minimize_over_eta per grid point (grid must be sorted, positive).
// Rows are independent; with threads > 1 they are evaluated concurrently and
// merged in grid order, so the output is identical for any thread count.
SweepTable sweep_delta(const SeriesParams& params, std::span<const double> delta_grid,
                       std::optional<double> refractive_index = {}, int threads = 1);

}  // namespace etalon
