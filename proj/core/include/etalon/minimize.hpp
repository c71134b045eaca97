#pragma once

#include <functional>

// Derivative-free scalar minimization on a closed interval
// (Brent's golden-section / successive-parabolic-interpolation scheme).

namespace etalon {

struct BracketMinOptions {
    double x_tolerance = 1e-8;  // absolute half-width of the final bracket
    int max_iterations = 200;
};

struct BracketMinResult {
    double x = 0.0;
    double fx = 0.0;
    int evaluations = 0;
    bool converged = false;  // best-so-far is still returned when false
};

BracketMinResult brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                                const BracketMinOptions& options = {});

}  // namespace etalon
