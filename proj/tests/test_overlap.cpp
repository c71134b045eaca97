#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "etalon/analytic.hpp"
#include "etalon/overlap.hpp"

using namespace etalon;

namespace {

SeriesParams params_for(double reflectivity, double tau = 1.0) {
    SeriesParams p;
    p.reflectivity = reflectivity;
    p.bulk_amplitude_transmission = tau;
    return p;
}

// Plain partial sum, independent of the production truncation logic.
std::complex<double> brute_force_amplitude(const SeriesParams& p, double delta, double eta,
                                           int terms) {
    const std::complex<double> factor = p.roundtrip_factor();
    std::complex<double> power = 1.0, sum = 0.0;
    for (int j = 0; j < terms; ++j, power *= factor) {
        const double s = j * delta + eta;
        sum += power * std::exp(-0.5 * s * s);
    }
    return (1.0 - p.reflectivity) * p.bulk_amplitude_transmission * sum;
}

}  // namespace

TEST_CASE("aligned untilted transmission is lossless") {
    // the truncated tail leaves a deficit of at most eps/(1-R) in C
    for (double r : {0.0, 0.05, 0.27, 0.9, 0.99}) {
        const OverlapResult result = overlap_series(params_for(r), 0.0, 0.0);
        const double tail = 1e-12 / (1.0 - r);
        CHECK(result.converged);
        CHECK(std::abs(result.amplitude - std::complex<double>(1.0)) < 2.0 * tail + 1e-14);
        CHECK(result.loss < 4.0 * tail + 1e-14);
    }
}

TEST_CASE("separated orders reach the strongest-beam loss") {
    const OverlapResult result = overlap_series(params_for(0.27), 5.0, 0.0);
    CHECK(result.loss == doctest::Approx(0.4670989276).epsilon(1e-8));
    CHECK(result.loss == doctest::Approx(max_loss(0.27)).epsilon(1e-3));
}

TEST_CASE("series at the optimal analytic offset matches the quadratic limit") {
    const OverlapResult result = overlap_series(params_for(0.27), 0.05, -0.018493);
    CHECK(result.loss == doctest::Approx(1.261885851e-3).epsilon(1e-11));
    CHECK(std::abs(result.loss - optimized_loss(0.27, 0.05)) < 0.02 * optimized_loss(0.27, 0.05));
}

TEST_CASE("stacked orders reduce to the geometric sum") {
    // delta = 0 collapses every order onto the axis: C = (1-R) tau e^{-eta^2/2} / (1-p)
    for (double r : {0.1, 0.27, 0.8}) {
        for (double tau : {1.0, 0.9, 0.5}) {
            for (double eta : {0.0, -0.7}) {
                const SeriesParams p = params_for(r, tau);
                const double expected = (1.0 - r) * tau * std::exp(-0.5 * eta * eta) /
                                        (1.0 - r * tau * tau);
                const OverlapResult result = overlap_series(p, 0.0, eta);
                CHECK(std::abs(result.amplitude) == doctest::Approx(expected).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("off-resonance phase flows through the complex round-trip factor") {
    // half-wave detuning makes p = -R: C = (1-R)/(1+R) for stacked orders
    SeriesParams p = params_for(0.27);
    p.roundtrip_phase = 3.14159265358979323846;
    const OverlapResult result = overlap_series(p, 0.0, 0.0);
    const double expected = (1.0 - 0.27) / (1.0 + 0.27);
    CHECK(std::abs(result.amplitude) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(result.loss == doctest::Approx(1.0 - expected * expected).epsilon(1e-9));
}

TEST_CASE("truncation respects the geometric tail bound") {
    for (const auto& [r, delta, eta] :
         {std::tuple{0.9, 0.1, -0.05}, std::tuple{0.99, 0.0, 0.0}, std::tuple{0.5, 0.02, -2.0},
          std::tuple{0.27, 1.0, -0.5}}) {
        const SeriesParams p = params_for(r);
        const OverlapResult result = overlap_series(p, delta, eta);
        REQUIRE(result.converged);
        const std::complex<double> reference =
            brute_force_amplitude(p, delta, eta, 10 * result.terms_used);
        const double tail_bound = (1.0 - r) * std::pow(r, result.terms_used) / (1.0 - r);
        CHECK(std::abs(reference - result.amplitude) <= tail_bound + 1e-18);
    }
}

TEST_CASE("loss is symmetric under a joint sign flip") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const SeriesParams p = params_for(0.9 * uniform(gen));
        const double delta = 3.0 * uniform(gen);
        const double eta = 2.0 * uniform(gen) - 1.0;
        CHECK(overlap_series(p, delta, eta).loss == overlap_series(p, -delta, -eta).loss);
    }
}

TEST_CASE("axial loss saturates monotonically toward the separated limit") {
    for (double r : {0.27, 0.7}) {
        const SeriesParams p = params_for(r);
        double previous = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double loss = overlap_series(p, 0.05 * i, 0.0).loss;
            CHECK(loss >= previous - 1e-12);
            previous = loss;
        }
        CHECK(previous == doctest::Approx(max_loss(r)).epsilon(1e-3));
    }
}

TEST_CASE("quadratic expansion tracks the series at small walk-off") {
    for (double r : {0.1, 0.3, 0.5}) {
        const SeriesParams p = params_for(r);
        for (double delta : {0.01, 0.03, 0.05}) {
            for (double eta : {-delta, -delta / 2.0, 0.0, delta / 2.0, delta}) {
                const double series = overlap_series(p, delta, eta).loss;
                CHECK(std::abs(series - generic_loss(r, delta, eta)) <= 0.05 * series);
            }
        }
    }
}

TEST_CASE("non-convergence is reported with the partial sum") {
    SeriesParams p = params_for(0.999999);
    p.max_terms = 10;
    const OverlapResult result = overlap_series(p, 0.0, 0.0);
    CHECK(!result.converged);
    CHECK(result.terms_used == 10);
    CHECK(result.loss > 0.0);
}

TEST_CASE("huge separations underflow cleanly") {
    const OverlapResult result = overlap_series(params_for(0.27), 60.0, 0.0);
    CHECK(result.converged);
    CHECK(std::isfinite(result.loss));
    CHECK(result.loss == doctest::Approx(max_loss(0.27)).epsilon(1e-12));
}

TEST_CASE("series parameter validation") {
    CHECK_THROWS_AS(overlap_series(params_for(1.0), 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(overlap_series(params_for(-0.1), 0.0, 0.0), std::invalid_argument);
    SeriesParams bad_tol = params_for(0.27);
    bad_tol.truncation_tolerance = 0.0;
    CHECK_THROWS_AS(overlap_series(bad_tol, 0.0, 0.0), std::invalid_argument);
    SeriesParams bad_terms = params_for(0.27);
    bad_terms.max_terms = 0;
    CHECK_THROWS_AS(overlap_series(bad_terms, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(overlap_series(params_for(0.27, 1.2), 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("grid mode function is power normalized") {
    const QuadratureSpec spec;
    const double h = 2.0 * spec.half_width / (spec.nodes_per_axis - 1);
    double norm = 0.0;
    for (int i = 0; i < spec.nodes_per_axis; ++i) {
        const double wx = (i == 0 || i == spec.nodes_per_axis - 1) ? 0.5 * h : h;
        const double x = -spec.half_width + i * h;
        for (int k = 0; k < spec.nodes_per_axis; ++k) {
            const double wy = (k == 0 || k == spec.nodes_per_axis - 1) ? 0.5 * h : h;
            const double y = -spec.half_width + k * h;
            const double mode = gaussian_mode(x, y);
            norm += wx * wy * mode * mode;
        }
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("quadrature of the aligned untilted beam is lossless") {
    for (double r : {0.05, 0.27, 0.9})
        CHECK(overlap_quadrature(params_for(r), 0.0, 0.0).loss <= 1e-8);
}

TEST_CASE("quadrature agrees with the series") {
    for (const auto& [r, delta, eta] :
         {std::tuple{0.27, 0.5, -0.2}, std::tuple{0.9, 2.0, -2.0}, std::tuple{0.9, 0.0, 0.0},
          std::tuple{0.05, 1.0, -0.5}, std::tuple{0.5, 0.05, -0.018}}) {
        const SeriesParams p = params_for(r);
        const double series = overlap_series(p, delta, eta).loss;
        const double grid = overlap_quadrature(p, delta, eta).loss;
        CHECK(std::abs(series - grid) <= 1e-6);
    }
}

TEST_CASE("gauss-legendre rule agrees too") {
    QuadratureSpec spec;
    spec.rule = QuadratureSpec::Rule::gauss_legendre;
    spec.nodes_per_axis = 501;
    const SeriesParams p = params_for(0.27);
    const double series = overlap_series(p, 0.5, -0.2).loss;
    CHECK(std::abs(overlap_quadrature(p, 0.5, -0.2, spec).loss - series) <= 1e-6);
}

TEST_CASE("quadrature rejects an undersized window") {
    QuadratureSpec spec;
    spec.half_width = 5.0;
    CHECK_THROWS_AS(overlap_quadrature(params_for(0.27), 0.1, -2.0, spec),
                    std::invalid_argument);
    spec.half_width = 12.0;
    spec.nodes_per_axis = 1;
    CHECK_THROWS_AS(overlap_quadrature(params_for(0.27), 0.1, 0.0, spec),
                    std::invalid_argument);
}
