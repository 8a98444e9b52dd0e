#pragma once

#include <functional>
#include <optional>

namespace dtqm {

struct RootResult {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Newton iteration safeguarded by bisection on a sign-changing bracket
// [lo, hi]. Stops when |f| <= f_tolerance or the bracket collapses to
// roundoff. Returns nullopt if f(lo) and f(hi) have the same strict sign.
std::optional<RootResult> safeguarded_newton(const std::function<double(double)>& f,
                                             const std::function<double(double)>& df, double lo,
                                             double hi, double f_tolerance, int max_iterations = 200);

}  // namespace dtqm
