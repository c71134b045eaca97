#include "etalon/minimize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace etalon {

BracketMinResult brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                                const BracketMinOptions& options) {
    if (!(lo < hi)) throw std::invalid_argument("brent_minimize: requires lo < hi");
    if (!(options.x_tolerance > 0.0))
        throw std::invalid_argument("brent_minimize: x_tolerance must be > 0");

    constexpr double kGolden = 0.3819660112501051;  // (3 - sqrt(5)) / 2
    const double eps = std::sqrt(std::numeric_limits<double>::epsilon());

    BracketMinResult result;
    double a = lo, b = hi;
    double x = a + kGolden * (b - a);
    double w = x, v = x;
    double fx = f(x);
    result.evaluations = 1;
    double fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const double m = 0.5 * (a + b);
        const double tol = eps * std::abs(x) + options.x_tolerance;
        const double tol2 = 2.0 * tol;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) {
            result.converged = true;
            break;
        }

        double p = 0.0, q = 0.0, r = 0.0;
        if (std::abs(e) > tol) {
            // trial parabola through (x, fx), (w, fw), (v, fv)
            r = (x - w) * (fx - fv);
            q = (x - v) * (fx - fw);
            p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0)
                p = -p;
            else
                q = -q;
            r = e;
            e = d;
        }

        if (std::abs(p) < std::abs(0.5 * q * r) && p > q * (a - x) && p < q * (b - x)) {
            d = p / q;
            const double u = x + d;
            if (u - a < tol2 || b - u < tol2) d = x < m ? tol : -tol;
        } else {
            e = (x < m ? b : a) - x;
            d = kGolden * e;
        }

        const double u = x + (std::abs(d) >= tol ? d : (d > 0.0 ? tol : -tol));
        const double fu = f(u);
        ++result.evaluations;

        if (fu <= fx) {
            if (u < x)
                b = x;
            else
                a = x;
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu <= fw || w == x) {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }

    result.x = x;
    result.fx = fx;
    return result;
}

}  // namespace etalon
