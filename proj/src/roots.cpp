#include "dtqm/roots.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace dtqm {

std::optional<RootResult> safeguarded_newton(const std::function<double(double)>& f,
                                             const std::function<double(double)>& df, double lo,
                                             double hi, double f_tolerance, int max_iterations) {
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (std::abs(f_lo) <= f_tolerance) return RootResult{lo, f_lo, 0};
    if (std::abs(f_hi) <= f_tolerance) return RootResult{hi, f_hi, 0};
    if ((f_lo > 0.0) == (f_hi > 0.0)) return std::nullopt;

    // Orient so that f(neg) < 0 < f(pos).
    double neg = f_lo < 0.0 ? lo : hi;
    double pos = f_lo < 0.0 ? hi : lo;
    double x = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
    double fx = std::abs(f_lo) < std::abs(f_hi) ? f_lo : f_hi;

    for (int it = 1; it <= max_iterations; ++it) {
        const double slope = df(x);
        double next = x;
        const bool newton_ok = slope != 0.0 && std::isfinite(slope);
        if (newton_ok) next = x - fx / slope;
        const double a = std::min(neg, pos);
        const double b = std::max(neg, pos);
        if (!newton_ok || !(next > a && next < b)) next = 0.5 * (neg + pos);

        x = next;
        fx = f(x);
        if (std::abs(fx) <= f_tolerance) return RootResult{x, fx, it};
        if (fx < 0.0) {
            neg = x;
        } else {
            pos = x;
        }
        if (std::abs(pos - neg) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
            return RootResult{x, fx, it};
        }
    }
    return RootResult{x, fx, max_iterations};
}

}  // namespace dtqm
