#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "etalon/analytic.hpp"

// Saturated-gain output power model for a ring laser with an intracavity
// etalon, tilt-tuning curves, and the one-parameter fit of the fixed
// round-trip loss to measured (tilt, power) data.

namespace etalon {

struct LaserCavityParams {
    double saturation_power = 0.0;             // P_sat, W
    double small_signal_gain = 0.0;            // G0, per round trip
    double output_coupler_transmission = 0.0;  // T_out
    double fixed_roundtrip_loss = 0.0;         // L0 (everything except walk-off)
    double laser_fsr = 0.0;                    // Hz; mode-spacing bookkeeping only

    void validate() const;  // throws std::invalid_argument
};

struct TuningDataPoint {
    double tilt_angle = 0.0;    // rad
    double output_power = 0.0;  // W, >= 0
    std::optional<double> power_uncertainty;  // W
};

enum class LossModel { simple, optimized };

struct PowerResult {
    double power = 0.0;         // W, clamped at 0 below threshold
    double walkoff_loss = 0.0;  // L(theta)
    double total_loss = 0.0;    // L0 + L(theta)
    bool above_threshold = false;
};

// P_sat T_out [G0 / (T_out + L0 + L(theta)) - 1] with L(theta) from the
// simple-insertion or optimized quadratic loss at the small-angle walk-off.
PowerResult output_power(const LaserCavityParams& cavity, LossModel model,
                         const EtalonDesign& etalon, const BeamGeometry& beam,
                         double tilt_angle);

struct TuningCurvePoint {
    double tilt_angle = 0.0;
    double delta = 0.0;
    double loss_simple = 0.0;
    double loss_optimized = 0.0;
    double power_simple = 0.0;
    double power_optimized = 0.0;
    bool below_min_tilt = false;  // |theta| <= minimum insertion angle
};

struct TuningCurve {
    std::vector<TuningCurvePoint> points;
    double min_tilt_angle = 0.0;
    bool both_models = true;
};

TuningCurve tuning_curve(const LaserCavityParams& cavity, const EtalonDesign& etalon,
                         const BeamGeometry& beam, std::span<const double> tilt_grid,
                         bool both_models = true);

struct FitResult {
    double fixed_loss = 0.0;      // fitted L0
    double residual_sum = 0.0;    // sum of squared (weighted) residuals
    double standard_error = 0.0;  // curvature-based, scaled by reduced chi^2
    int evaluations = 0;
    bool converged = false;
};

// Least-squares fit of L0 alone, holding (P_sat, G0, T_out) fixed, by
// bracketed scalar minimization on (0, G0 - T_out). Model powers below
// threshold are clamped to 0 before forming residuals. Points are weighted
// by 1/sigma^2 when every point carries an uncertainty. Requires >= 2 points
// and rejects data where all tilts coincide but the powers disagree.
FitResult fit_fixed_loss(const LaserCavityParams& cavity, LossModel model,
                         const EtalonDesign& etalon, const BeamGeometry& beam,
                         std::span<const TuningDataPoint> data);

struct UnconstrainedFitResult {
    double fixed_loss = 0.0;
    double saturation_power = 0.0;
    double small_signal_gain = 0.0;
    double output_coupler_transmission = 0.0;
    double residual_sum = 0.0;
    int evaluations = 0;
    bool converged = false;
};

// Exploratory variant that also frees P_sat, G0 and T_out (cyclic coordinate
// descent from the supplied starting cavity). Statistically much weaker than
// the constrained fit; not part of any accuracy guarantee.
UnconstrainedFitResult fit_unconstrained(const LaserCavityParams& start, LossModel model,
                                         const EtalonDesign& etalon, const BeamGeometry& beam,
                                         std::span<const TuningDataPoint> data);

// Fine-thread screw turns to tilt angle.
double calibrate_tilt(double turns, double rad_per_turn, double offset = 0.0);

struct TiltCalibration {
    double rad_per_turn = 0.0;
    double offset = 0.0;  // rad
};

// CSV with header "angle_mrad,power_W[,sigma_W]" or "turns,power_W[,sigma_W]";
// '#' lines are comments. The turns form requires a calibration.
std::vector<TuningDataPoint> load_tuning_data(std::istream& in,
                                              const std::optional<TiltCalibration>& calibration = {});

}  // namespace etalon
