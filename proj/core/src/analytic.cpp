#include "etalon/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "etalon/units.hpp"

namespace etalon {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double BeamGeometry::rayleigh_range() const {
    return kPi * waist_radius * waist_radius / wavelength;
}

void BeamGeometry::validate() const {
    if (!(wavelength > 0.0)) throw std::invalid_argument("BeamGeometry: wavelength must be > 0");
    if (!(waist_radius > 0.0)) throw std::invalid_argument("BeamGeometry: waist_radius must be > 0");
}

double EtalonDesign::free_spectral_range() const {
    return units::kSpeedOfLight / (2.0 * refractive_index * thickness);
}

void EtalonDesign::validate() const {
    if (!(reflectivity >= 0.0 && reflectivity < 1.0))
        throw std::invalid_argument("EtalonDesign: reflectivity must be in [0, 1)");
    if (!(refractive_index >= 1.0))
        throw std::invalid_argument("EtalonDesign: refractive_index must be >= 1");
    if (!(thickness > 0.0)) throw std::invalid_argument("EtalonDesign: thickness must be > 0");
    if (!(bulk_amplitude_transmission > 0.0 && bulk_amplitude_transmission <= 1.0))
        throw std::invalid_argument("EtalonDesign: bulk_amplitude_transmission must be in (0, 1]");
}

double minimum_tilt_angle(const BeamGeometry& beam) {
    beam.validate();
    return beam.wavelength / (kPi * beam.waist_radius);
}

WalkoffState normalized_walkoff(const EtalonDesign& etalon, const BeamGeometry& beam,
                                double tilt_angle, WalkoffMode mode) {
    etalon.validate();
    beam.validate();
    if (!(std::abs(tilt_angle) < kPi / 2.0))
        throw std::invalid_argument("normalized_walkoff: |tilt| must be < pi/2");

    WalkoffState state;
    state.tilt_angle = tilt_angle;
    if (mode == WalkoffMode::exact) {
        state.internal_angle = std::asin(std::sin(tilt_angle) / etalon.refractive_index);
        state.normalized_walkoff = (2.0 * etalon.thickness / beam.waist_radius) *
                                   std::tan(state.internal_angle) * std::cos(tilt_angle);
    } else {
        state.internal_angle = tilt_angle / etalon.refractive_index;
        state.normalized_walkoff =
            2.0 * etalon.thickness * tilt_angle / (etalon.refractive_index * beam.waist_radius);
    }
    state.order_spacing = state.normalized_walkoff * beam.waist_radius;
    return state;
}

double max_loss(double reflectivity) { return 2.0 * reflectivity - reflectivity * reflectivity; }

double generic_loss(double reflectivity, double delta, double eta) {
    const double omr = 1.0 - reflectivity;
    return eta * eta + 2.0 * reflectivity / omr * eta * delta +
           reflectivity * (1.0 + reflectivity) / (omr * omr) * delta * delta;
}

double simple_insertion_offset(double refractive_index, double delta) {
    return -(refractive_index - 1.0) / 2.0 * delta;
}

double simple_loss_coefficient(double reflectivity, double refractive_index) {
    const double half = (refractive_index - 1.0) / 2.0;
    const double omr = 1.0 - reflectivity;
    return half * half - reflectivity * (refractive_index - 1.0) / omr +
           reflectivity * (reflectivity + 1.0) / (omr * omr);
}

double simple_insertion_loss(double reflectivity, double refractive_index, double delta) {
    return simple_loss_coefficient(reflectivity, refractive_index) * delta * delta;
}

double optimal_offset(double reflectivity, double delta) {
    return -reflectivity / (1.0 - reflectivity) * delta;
}

double optimized_loss_coefficient(double reflectivity) {
    const double omr = 1.0 - reflectivity;
    return reflectivity / (omr * omr);
}

double optimized_loss(double reflectivity, double delta) {
    return optimized_loss_coefficient(reflectivity) * delta * delta;
}

double self_alignment_reflectivity(double refractive_index) {
    return (refractive_index - 1.0) / (refractive_index + 1.0);
}

double fresnel_reflectivity(double refractive_index) {
    const double r = self_alignment_reflectivity(refractive_index);
    return r * r;
}

double selection_loss(double reflectivity, double fsr_laser, double fsr_etalon) {
    if (!(fsr_laser > 0.0) || !(fsr_etalon > 0.0))
        throw std::invalid_argument("selection_loss: free spectral ranges must be > 0");
    const double phase = 2.0 * kPi * fsr_laser / fsr_etalon;
    return optimized_loss_coefficient(reflectivity) * phase * phase;
}

double suppression_ratio(double refractive_index, double fsr_laser, const BeamGeometry& beam) {
    beam.validate();
    if (!(fsr_laser > 0.0))
        throw std::invalid_argument("suppression_ratio: fsr_laser must be > 0");
    const double n2 = refractive_index * refractive_index;
    const double x =
        2.0 * kPi * kPi * n2 * fsr_laser * beam.rayleigh_range() / units::kSpeedOfLight;
    return x * x;
}

bool quadratic_limit_valid(double delta, double eta) {
    return std::abs(delta) <= kQuadraticValidityLimit && std::abs(eta) <= kQuadraticValidityLimit;
}

}  // namespace etalon
