#include "etalon/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace etalon {

namespace {

constexpr double kPi = 3.14159265358979323846;
// exp underflows to a denormal around -745; skip such terms outright.
constexpr double kUnderflowExponent = -745.0;

double clamp_loss(const std::complex<double>& amplitude) {
    return std::clamp(1.0 - std::norm(amplitude), 0.0, 1.0);
}

}  // namespace

std::complex<double> SeriesParams::roundtrip_factor() const {
    const double mag =
        reflectivity * bulk_amplitude_transmission * bulk_amplitude_transmission;
    return std::polar(mag, -roundtrip_phase);
}

void SeriesParams::validate() const {
    if (!(reflectivity >= 0.0 && reflectivity < 1.0))
        throw std::invalid_argument("SeriesParams: reflectivity must be in [0, 1)");
    if (!(bulk_amplitude_transmission > 0.0 && bulk_amplitude_transmission <= 1.0))
        throw std::invalid_argument("SeriesParams: bulk_amplitude_transmission must be in (0, 1]");
    if (!(truncation_tolerance > 0.0))
        throw std::invalid_argument("SeriesParams: truncation_tolerance must be > 0");
    if (max_terms < 1) throw std::invalid_argument("SeriesParams: max_terms must be >= 1");
    if (!(std::abs(roundtrip_factor()) < 1.0))
        throw std::invalid_argument("SeriesParams: |p| = R tau^2 must be < 1");
}

OverlapResult overlap_series(const SeriesParams& params, double delta, double eta) {
    params.validate();

    const std::complex<double> p = params.roundtrip_factor();
    const double prefactor =
        (1.0 - params.reflectivity) * params.bulk_amplitude_transmission;

    std::complex<double> sum = 0.0;
    std::complex<double> power = 1.0;  // p^j
    double previous_magnitude = 0.0;
    OverlapResult result;
    result.converged = false;

    for (int j = 0; j < params.max_terms; ++j, power *= p) {
        const double separation = static_cast<double>(j) * delta + eta;
        const double exponent = -0.5 * separation * separation;
        const double gauss = exponent < kUnderflowExponent ? 0.0 : std::exp(exponent);
        const double magnitude = std::abs(power) * gauss;

        // The term magnitudes are log-concave in j, so once they decrease they
        // keep decreasing; only then is a small term safe to treat as the tail.
        const bool past_peak = j > 0 && magnitude <= previous_magnitude;
        if (past_peak && magnitude < params.truncation_tolerance * std::abs(sum)) {
            result.converged = true;
            break;
        }
        sum += power * gauss;
        previous_magnitude = magnitude;
        result.terms_used = j + 1;
    }

    result.amplitude = prefactor * sum;
    result.loss = clamp_loss(result.amplitude);
    return result;
}

double gaussian_mode(double x, double y) {
    return std::sqrt(2.0 / kPi) * std::exp(-(x * x + y * y));
}

OverlapResult overlap_quadrature(const SeriesParams& params, double delta, double eta,
                                 const QuadratureSpec& spec) {
    params.validate();
    if (spec.nodes_per_axis < 2)
        throw std::invalid_argument("overlap_quadrature: need at least 2 nodes per axis");
    if (!(spec.half_width >= 6.0 + std::abs(eta)))
        throw std::invalid_argument(
            "overlap_quadrature: grid must cover the reference mode with >= 6 w0 margin");

    const int n = spec.nodes_per_axis;
    std::vector<double> nodes(n), weights(n);
    if (spec.rule == QuadratureSpec::Rule::trapezoid) {
        const double h = 2.0 * spec.half_width / (n - 1);
        for (int i = 0; i < n; ++i) {
            nodes[i] = -spec.half_width + i * h;
            weights[i] = (i == 0 || i == n - 1) ? 0.5 * h : h;
        }
    } else {
        // Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
        // Legendre recurrence, then scaled to the window.
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double step = p1 / dp;
                x -= step;
                if (std::abs(step) < 1e-15) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x * spec.half_width;
            nodes[n - 1 - i] = x * spec.half_width;
            weights[i] = weights[n - 1 - i] = w * spec.half_width;
        }
    }

    // Transmitted orders that can still reach the window; beyond it their
    // overlap with anything inside is below double resolution.
    const std::complex<double> p = params.roundtrip_factor();
    const double p_mag = std::abs(p);
    int orders = 1;
    while (orders < params.max_terms) {
        const bool outside = delta > 0.0 && orders * delta > spec.half_width + 6.0;
        if (outside || std::pow(p_mag, orders) < 1e-18) break;
        ++orders;
    }

    // Both wavefunctions factorize as f(x) g(y) with the same g; evaluate the
    // 1-D profiles on the nodes once, then accumulate the full 2-D sum.
    const double prefactor =
        (1.0 - params.reflectivity) * params.bulk_amplitude_transmission;
    const double axis_norm = std::sqrt(std::sqrt(2.0 / kPi));  // (2/pi)^(1/4)

    std::vector<std::complex<double>> transmitted_x(n, 0.0);
    std::vector<double> reference_x(n), mode_y(n);
    for (int i = 0; i < n; ++i) {
        const double x = nodes[i];
        std::complex<double> acc = 0.0;
        std::complex<double> power = 1.0;
        for (int j = 0; j < orders; ++j, power *= p) {
            const double dx = x - j * delta;
            const double ex = -dx * dx;
            if (ex >= kUnderflowExponent) acc += power * std::exp(ex);
        }
        transmitted_x[i] = prefactor * axis_norm * acc;
        const double rx = x + eta;  // reference mode centered at -eta
        reference_x[i] = axis_norm * std::exp(-rx * rx);
        mode_y[i] = axis_norm * std::exp(-x * x);
    }

    // The tensor-product sum over (i, k) factorizes into the two 1-D sums.
    std::complex<double> x_factor = 0.0;
    double y_factor = 0.0;
    for (int i = 0; i < n; ++i) {
        x_factor += weights[i] * reference_x[i] * transmitted_x[i];
        y_factor += weights[i] * mode_y[i] * mode_y[i];
    }
    const std::complex<double> overlap = x_factor * y_factor;

    OverlapResult result;
    result.amplitude = overlap;
    result.loss = clamp_loss(overlap);
    result.terms_used = orders;
    result.converged = true;
    return result;
}

}  // namespace etalon
