#pragma once

#include <complex>

// Transmitted-field overlap of a Gaussian mode with the sum of laterally
// walked-off transmission orders, evaluated two independent ways:
//
//  * overlap_series    - closed-form term sum
//                        C = (1-R) tau sum_j p^j exp(-(j delta + eta)^2 / 2),
//                        p = R tau^2 exp(-i Phi); order j sits a normalized
//                        distance j*delta + eta from the reference mode, so
//                        the negative offsets of analytic.hpp reduce the loss.
//  * overlap_quadrature - the same overlap integral computed from the mode
//                        and transmitted wavefunctions sampled on a 2-D grid.
//                        Never touches the series path; serves as its oracle.
//
// All lengths here are in units of the waist radius w0.

namespace etalon {

struct SeriesParams {
    double reflectivity = 0.0;                 // R, [0, 1)
    double bulk_amplitude_transmission = 1.0;  // tau, (0, 1]
    double roundtrip_phase = 0.0;              // Phi, rad; 0 on resonance
    double truncation_tolerance = 1e-12;       // stop when a term falls below
                                               // this fraction of the partial sum
    int max_terms = 10000;

    std::complex<double> roundtrip_factor() const;  // p
    void validate() const;                          // throws std::invalid_argument
};

struct OverlapResult {
    std::complex<double> amplitude;  // C
    double loss = 0.0;               // 1 - |C|^2, clamped to [0, 1]
    int terms_used = 0;
    bool converged = true;  // false when max_terms cut the sum off
};

OverlapResult overlap_series(const SeriesParams& params, double delta, double eta);

// Power-normalized fundamental mode in waist units:
// sqrt(2/pi) exp(-(x^2 + y^2)).
double gaussian_mode(double x, double y);

struct QuadratureSpec {
    enum class Rule { trapezoid, gauss_legendre };

    double half_width = 12.0;  // grid spans [-half_width, half_width]^2, in w0
    int nodes_per_axis = 2001;
    Rule rule = Rule::trapezoid;
};

// Grid-quadrature evaluation of the same overlap. Requires the window to
// cover the reference mode with >= 6 w0 of margin (throws otherwise).
OverlapResult overlap_quadrature(const SeriesParams& params, double delta, double eta,
                                 const QuadratureSpec& spec = {});

}  // namespace etalon
