#pragma once

// Closed-form walk-off loss expressions for a tilted etalon in a ring cavity.
//
// Normalization conventions used throughout the library:
//   delta = Delta_x / w0   walk-off between adjacent transmitted orders,
//                          in units of the beam waist radius
//   eta   = h / w0         lateral offset of the (realigned) cavity mode,
//                          same normalization; eta is signed, and positive
//                          delta drives the optimal offset non-positive
//
// The quadratic loss forms below are the small-{delta, eta} limits; they
// carry no validity guard of their own (see quadratic_limit_valid).

namespace etalon {

// Gaussian beam at its waist. The Rayleigh range is always derived from
// (wavelength, waist_radius), never stored, so the triple cannot go stale.
struct BeamGeometry {
    double wavelength = 0.0;    // m
    double waist_radius = 0.0;  // w0, m

    double rayleigh_range() const;  // z0 = pi w0^2 / lambda, m
    void validate() const;          // throws std::invalid_argument
};

// Plane-parallel etalon design parameters {R, n, d} plus the bulk amplitude
// transmission and round-trip phase of the transmitted-order sum.
struct EtalonDesign {
    double reflectivity = 0.0;       // R, per surface, in [0, 1)
    double refractive_index = 1.0;   // n >= 1
    double thickness = 0.0;          // d, m
    double bulk_amplitude_transmission = 1.0;  // tau, in (0, 1]
    double roundtrip_phase = 0.0;    // Phi, rad (0 = on resonance)

    double free_spectral_range() const;  // c / (2 n d), Hz
    void validate() const;               // throws std::invalid_argument
};

enum class WalkoffMode { exact, small_angle };

// Geometry of one tilt configuration. normalized_offset/lateral_offset are
// zero here; they describe the cavity-mode alignment, which callers choose
// per loss model (simple insertion vs realigned).
struct WalkoffState {
    double tilt_angle = 0.0;          // theta, rad
    double internal_angle = 0.0;      // theta', rad
    double normalized_walkoff = 0.0;  // delta
    double normalized_offset = 0.0;   // eta
    double lateral_offset = 0.0;      // h = eta * w0, m
    double order_spacing = 0.0;       // Delta_x = delta * w0, m
};

// Smallest usable tilt: below lambda / (pi w0), the order of the beam
// divergence angle, the etalon back-reflection couples into the cavity mode.
double minimum_tilt_angle(const BeamGeometry& beam);

// Walk-off for a given tilt. exact mode evaluates (2d/w0) tan(theta') cos(theta)
// with theta' from Snell's law; small_angle linearizes to 2 d theta / (n w0).
// Rejects |tilt| >= pi/2.
WalkoffState normalized_walkoff(const EtalonDesign& etalon, const BeamGeometry& beam,
                                double tilt_angle,
                                WalkoffMode mode = WalkoffMode::small_angle);

// Loss of the strongest transmitted order once the orders are fully
// separated (delta >> 1): 2R - R^2.
double max_loss(double reflectivity);

// Quadratic loss surface in {delta, eta}:
//   eta^2 + 2R/(1-R) eta delta + R(1+R)/(1-R)^2 delta^2
double generic_loss(double reflectivity, double delta, double eta);

// Mode offset imposed by inserting the etalon without realignment:
// -(n-1)/2 * delta.
double simple_insertion_offset(double refractive_index, double delta);

// Loss at the simple-insertion offset; pure delta^2 scaling.
double simple_insertion_loss(double reflectivity, double refractive_index, double delta);
double simple_loss_coefficient(double reflectivity, double refractive_index);

// Offset minimizing generic_loss at fixed delta: -R/(1-R) * delta.
double optimal_offset(double reflectivity, double delta);

// Loss at the optimal offset: R/(1-R)^2 * delta^2.
double optimized_loss(double reflectivity, double delta);
double optimized_loss_coefficient(double reflectivity);

// Reflectivity for which the simple-insertion offset coincides with the
// optimal one at every tilt ("self-alignment"): (n-1)/(n+1).
double self_alignment_reflectivity(double refractive_index);

// Uncoated-surface reflectivity at normal incidence; always the square of
// self_alignment_reflectivity through a shared code path.
double fresnel_reflectivity(double refractive_index);

// Round-trip loss the etalon imposes on the adjacent cavity mode:
// R/(1-R)^2 * (2 pi FSR_laser / FSR_etalon)^2. Both FSRs in Hz.
double selection_loss(double reflectivity, double fsr_laser, double fsr_etalon);

// Side-mode selection loss over optimized walk-off loss,
// (2 pi^2 n^2 FSR_laser z0 / c)^2; independent of R and d.
double suppression_ratio(double refractive_index, double fsr_laser,
                         const BeamGeometry& beam);

// Advisory bound for the quadratic expressions above; beyond it the full
// transmitted-order series (overlap.hpp) should be trusted instead.
inline constexpr double kQuadraticValidityLimit = 0.3;
bool quadratic_limit_valid(double delta, double eta);

}  // namespace etalon
