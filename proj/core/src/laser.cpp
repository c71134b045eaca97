#include "etalon/laser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "etalon/minimize.hpp"
#include "etalon/units.hpp"

namespace etalon {

namespace {

double walkoff_loss(LossModel model, const EtalonDesign& etalon, const BeamGeometry& beam,
                    double tilt_angle) {
    const WalkoffState state =
        normalized_walkoff(etalon, beam, tilt_angle, WalkoffMode::small_angle);
    return model == LossModel::simple
               ? simple_insertion_loss(etalon.reflectivity, etalon.refractive_index,
                                       state.normalized_walkoff)
               : optimized_loss(etalon.reflectivity, state.normalized_walkoff);
}

double rigrod_power(const LaserCavityParams& cavity, double total_loss) {
    const double denom = cavity.output_coupler_transmission + total_loss;
    return cavity.saturation_power * cavity.output_coupler_transmission *
           (cavity.small_signal_gain / denom - 1.0);
}

struct Objective {
    const LaserCavityParams& cavity;
    LossModel model;
    const EtalonDesign& etalon;
    const BeamGeometry& beam;
    std::span<const TuningDataPoint> data;
    bool weighted;

    double operator()(double fixed_loss) const {
        LaserCavityParams trial = cavity;
        trial.fixed_roundtrip_loss = fixed_loss;
        double sum = 0.0;
        for (const auto& point : data) {
            const double model_power =
                output_power(trial, model, etalon, beam, point.tilt_angle).power;
            double r = model_power - point.output_power;
            if (weighted) r /= *point.power_uncertainty;
            sum += r * r;
        }
        return sum;
    }
};

}  // namespace

void LaserCavityParams::validate() const {
    if (!(saturation_power > 0.0))
        throw std::invalid_argument("LaserCavityParams: saturation_power must be > 0");
    if (!(small_signal_gain > 0.0))
        throw std::invalid_argument("LaserCavityParams: small_signal_gain must be > 0");
    if (!(output_coupler_transmission > 0.0))
        throw std::invalid_argument("LaserCavityParams: output_coupler_transmission must be > 0");
    if (!(fixed_roundtrip_loss >= 0.0))
        throw std::invalid_argument("LaserCavityParams: fixed_roundtrip_loss must be >= 0");
    if (!(laser_fsr > 0.0))
        throw std::invalid_argument("LaserCavityParams: laser_fsr must be > 0");
}

PowerResult output_power(const LaserCavityParams& cavity, LossModel model,
                         const EtalonDesign& etalon, const BeamGeometry& beam,
                         double tilt_angle) {
    cavity.validate();
    PowerResult result;
    result.walkoff_loss = walkoff_loss(model, etalon, beam, tilt_angle);
    result.total_loss = cavity.fixed_roundtrip_loss + result.walkoff_loss;
    const double power = rigrod_power(cavity, result.total_loss);
    result.above_threshold = power > 0.0;
    result.power = std::max(0.0, power);
    return result;
}

TuningCurve tuning_curve(const LaserCavityParams& cavity, const EtalonDesign& etalon,
                         const BeamGeometry& beam, std::span<const double> tilt_grid,
                         bool both_models) {
    cavity.validate();
    TuningCurve curve;
    curve.min_tilt_angle = minimum_tilt_angle(beam);
    curve.both_models = both_models;
    curve.points.reserve(tilt_grid.size());
    for (const double theta : tilt_grid) {
        TuningCurvePoint point;
        point.tilt_angle = theta;
        const WalkoffState state =
            normalized_walkoff(etalon, beam, theta, WalkoffMode::small_angle);
        point.delta = state.normalized_walkoff;
        point.loss_simple = simple_insertion_loss(etalon.reflectivity, etalon.refractive_index,
                                                  point.delta);
        point.loss_optimized = optimized_loss(etalon.reflectivity, point.delta);
        point.power_simple =
            output_power(cavity, LossModel::simple, etalon, beam, theta).power;
        point.power_optimized =
            output_power(cavity, LossModel::optimized, etalon, beam, theta).power;
        point.below_min_tilt = std::abs(theta) <= curve.min_tilt_angle;
        curve.points.push_back(point);
    }
    return curve;
}

FitResult fit_fixed_loss(const LaserCavityParams& cavity, LossModel model,
                         const EtalonDesign& etalon, const BeamGeometry& beam,
                         std::span<const TuningDataPoint> data) {
    LaserCavityParams base = cavity;
    base.fixed_roundtrip_loss = 0.0;
    base.validate();
    if (data.size() < 2) throw std::invalid_argument("fit_fixed_loss: need at least 2 points");
    const double span_limit = base.small_signal_gain - base.output_coupler_transmission;
    if (!(span_limit > 0.0))
        throw std::invalid_argument("fit_fixed_loss: G0 must exceed T_out");

    bool all_same_tilt = true;
    bool powers_differ = false;
    bool weighted = true;
    for (const auto& point : data) {
        if (!(point.output_power >= 0.0))
            throw std::invalid_argument("fit_fixed_loss: powers must be >= 0");
        if (point.tilt_angle != data.front().tilt_angle) all_same_tilt = false;
        if (point.output_power != data.front().output_power) powers_differ = true;
        if (!point.power_uncertainty || !(*point.power_uncertainty > 0.0)) weighted = false;
    }
    if (all_same_tilt && powers_differ)
        throw std::invalid_argument("fit_fixed_loss: all tilts identical but powers disagree");

    const Objective objective{base, model, etalon, beam, data, weighted};
    const double lo = 1e-12;
    const double hi = span_limit - 1e-12;

    // Coarse scan keeps the refinement inside the objective's single basin.
    constexpr int kScan = 65;
    int best = 0;
    double best_value = objective(lo);
    const double step = (hi - lo) / (kScan - 1);
    for (int i = 1; i < kScan; ++i) {
        const double value = objective(lo + i * step);
        if (value < best_value) {
            best = i;
            best_value = value;
        }
    }
    BracketMinOptions options;
    options.x_tolerance = 1e-10;
    const BracketMinResult refined =
        brent_minimize(objective, std::max(lo, lo + (best - 1) * step),
                       std::min(hi, lo + (best + 1) * step), options);

    FitResult result;
    result.fixed_loss = refined.x;
    result.residual_sum = refined.fx;
    result.evaluations = kScan + refined.evaluations;
    result.converged = refined.converged;

    // Quadratic-approximation uncertainty: se = sqrt(2 s^2 / S'') with the
    // residual variance s^2 = S_min / (N - 1) absorbing any mis-stated (or
    // absent) per-point sigmas.
    const double h = std::max(1e-8, 1e-4 * refined.x);
    const double curvature =
        (objective(refined.x + h) - 2.0 * refined.fx + objective(refined.x - h)) / (h * h);
    result.evaluations += 2;
    const double dof = static_cast<double>(data.size()) - 1.0;
    if (curvature > 0.0 && dof > 0.0)
        result.standard_error = std::sqrt(2.0 * (refined.fx / dof) / curvature);
    else
        result.standard_error = std::numeric_limits<double>::infinity();
    return result;
}

UnconstrainedFitResult fit_unconstrained(const LaserCavityParams& start, LossModel model,
                                         const EtalonDesign& etalon, const BeamGeometry& beam,
                                         std::span<const TuningDataPoint> data) {
    start.validate();
    if (data.size() < 4)
        throw std::invalid_argument("fit_unconstrained: need at least 4 points");

    LaserCavityParams current = start;
    int evaluations = 0;
    const auto residual = [&](const LaserCavityParams& cavity) {
        double sum = 0.0;
        for (const auto& point : data) {
            const double r =
                output_power(cavity, model, etalon, beam, point.tilt_angle).power -
                point.output_power;
            sum += r * r;
        }
        ++evaluations;
        return sum;
    };

    double previous = residual(current);
    bool converged = false;
    for (int cycle = 0; cycle < 60 && !converged; ++cycle) {
        for (int coord = 0; coord < 4; ++coord) {
            const auto eval = [&](double value) {
                LaserCavityParams trial = current;
                switch (coord) {
                    case 0: trial.fixed_roundtrip_loss = value; break;
                    case 1: trial.saturation_power = value; break;
                    case 2: trial.small_signal_gain = value; break;
                    default: trial.output_coupler_transmission = value; break;
                }
                return residual(trial);
            };
            double lo, hi;
            switch (coord) {
                case 0:
                    lo = 1e-12;
                    hi = current.small_signal_gain - current.output_coupler_transmission - 1e-12;
                    break;
                case 1:
                    lo = 0.1 * start.saturation_power;
                    hi = 10.0 * start.saturation_power;
                    break;
                case 2:
                    lo = current.output_coupler_transmission + current.fixed_roundtrip_loss + 1e-9;
                    hi = 10.0 * start.small_signal_gain;
                    break;
                default:
                    lo = 0.1 * start.output_coupler_transmission;
                    hi = std::min(10.0 * start.output_coupler_transmission,
                                  current.small_signal_gain - current.fixed_roundtrip_loss - 1e-9);
                    break;
            }
            if (!(lo < hi)) continue;
            BracketMinOptions options;
            options.x_tolerance = 1e-9;
            const BracketMinResult r = brent_minimize(eval, lo, hi, options);
            switch (coord) {
                case 0: current.fixed_roundtrip_loss = r.x; break;
                case 1: current.saturation_power = r.x; break;
                case 2: current.small_signal_gain = r.x; break;
                default: current.output_coupler_transmission = r.x; break;
            }
        }
        const double now = residual(current);
        converged = std::abs(previous - now) <= 1e-14 * (1.0 + now);
        previous = now;
    }

    UnconstrainedFitResult result;
    result.fixed_loss = current.fixed_roundtrip_loss;
    result.saturation_power = current.saturation_power;
    result.small_signal_gain = current.small_signal_gain;
    result.output_coupler_transmission = current.output_coupler_transmission;
    result.residual_sum = previous;
    result.evaluations = evaluations;
    result.converged = converged;
    return result;
}

double calibrate_tilt(double turns, double rad_per_turn, double offset) {
    return turns * rad_per_turn + offset;
}

std::vector<TuningDataPoint> load_tuning_data(std::istream& in,
                                              const std::optional<TiltCalibration>& calibration) {
    std::vector<TuningDataPoint> data;
    std::string line;
    int line_number = 0;
    bool header_seen = false;
    bool angle_in_mrad = true;
    bool has_sigma = false;

    const auto split = [](const std::string& text) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream stream(text);
        while (std::getline(stream, field, ',')) {
            const auto begin = field.find_first_not_of(" \t\r");
            const auto end = field.find_last_not_of(" \t\r");
            fields.push_back(begin == std::string::npos ? ""
                                                        : field.substr(begin, end - begin + 1));
        }
        return fields;
    };

    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split(line);

        if (!header_seen) {
            if (fields.size() < 2 || fields[1] != "power_W" ||
                (fields[0] != "angle_mrad" && fields[0] != "turns") ||
                (fields.size() == 3 && fields[2] != "sigma_W") || fields.size() > 3)
                throw std::runtime_error(
                    "tuning data: header must be 'angle_mrad|turns,power_W[,sigma_W]'");
            angle_in_mrad = fields[0] == "angle_mrad";
            has_sigma = fields.size() == 3;
            if (!angle_in_mrad && !calibration)
                throw std::runtime_error(
                    "tuning data: 'turns' column requires a tilt calibration");
            header_seen = true;
            continue;
        }

        if (fields.size() != (has_sigma ? 3u : 2u))
            throw std::runtime_error("tuning data: wrong field count on line " +
                                     std::to_string(line_number));
        TuningDataPoint point;
        try {
            const double raw = std::stod(fields[0]);
            point.tilt_angle = angle_in_mrad
                                   ? units::mrad_to_rad(raw)
                                   : calibrate_tilt(raw, calibration->rad_per_turn,
                                                    calibration->offset);
            point.output_power = std::stod(fields[1]);
            if (has_sigma) point.power_uncertainty = std::stod(fields[2]);
        } catch (const std::logic_error&) {
            throw std::runtime_error("tuning data: bad number on line " +
                                     std::to_string(line_number));
        }
        if (!(point.output_power >= 0.0))
            throw std::runtime_error("tuning data: negative power on line " +
                                     std::to_string(line_number));
        data.push_back(point);
    }
    if (!header_seen) throw std::runtime_error("tuning data: missing header line");
    return data;
}

}  // namespace etalon
