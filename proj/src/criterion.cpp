#include "dtqm/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "dtqm/errors.hpp"

namespace dtqm {

namespace {

// Unique positive root of x^(d+1) = x + 1.
double generalized_golden_ratio(int dims) {
    double x = 2.0;
    for (int i = 0; i < 64; ++i) x = std::pow(1.0 + x, 1.0 / (dims + 1));
    return x;
}

void validate_domain(const DomainBox& domain, int dimension, std::size_t n_samples) {
    if (n_samples < 16) throw PreconditionError("criterion check needs at least 16 samples");
    for (int d = 0; d < dimension; ++d) {
        if (!(domain.hi[d] > domain.lo[d])) throw PreconditionError("degenerate sampling domain");
    }
}

// Maps one unit-cube sample onto (x, y) in domain x domain.
std::pair<Point, Point> to_pair(const std::vector<double>& u, const DomainBox& domain, int dimension) {
    Point x{0.0, 0.0};
    Point y{0.0, 0.0};
    for (int d = 0; d < dimension; ++d) {
        const double width = domain.hi[d] - domain.lo[d];
        x[d] = domain.lo[d] + width * u[static_cast<std::size_t>(d)];
        y[d] = domain.lo[d] + width * u[static_cast<std::size_t>(dimension + d)];
    }
    return {x, y};
}

std::string describe(const Point& x, const Point& y, int dimension) {
    std::ostringstream os;
    os.precision(17);
    os << "x=(" << x[0];
    if (dimension == 2) os << ", " << x[1];
    os << ") y=(" << y[0];
    if (dimension == 2) os << ", " << y[1];
    os << ")";
    return os.str();
}

}  // namespace

std::vector<std::vector<double>> low_discrepancy_points(std::size_t count, int dims) {
    const double g = generalized_golden_ratio(dims);
    std::vector<double> alpha(static_cast<std::size_t>(dims));
    for (int i = 0; i < dims; ++i) alpha[static_cast<std::size_t>(i)] = std::fmod(std::pow(1.0 / g, i + 1), 1.0);
    std::vector<std::vector<double>> out(count, std::vector<double>(static_cast<std::size_t>(dims)));
    for (std::size_t n = 0; n < count; ++n) {
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            const double v = 0.5 + static_cast<double>(n + 1) * alpha[i];
            out[n][i] = v - std::floor(v);
        }
    }
    return out;
}

CriterionReport check_criterion(const ActionModel& model, const DomainBox& domain,
                                std::size_t n_samples, double tolerance) {
    const int dim = model.dimension();
    validate_domain(domain, dim, n_samples);
    if (!(tolerance >= 0.0)) throw PreconditionError("tolerance must be non-negative");

    const auto unit = low_discrepancy_points(n_samples, 2 * dim);
    DetSummary summary{std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity(), 0.0, 0.0};
    double sum = 0.0;
    double trace_max = 0.0;
    const bool perturbed = model.kind() == ActionKind::vector_potential_2d;

    for (const auto& u : unit) {
        const auto [x, y] = to_pair(u, domain, dim);
        double det = 0.0;
        try {
            const Mat2 h = model.mixed(x, y);
            det = dim == 1 ? h[0][0] : h[0][0] * h[1][1] - h[0][1] * h[1][0];
            if (perturbed) {
                const Mat2 p = model.perturbation_mixed(x, y);
                trace_max = std::max(trace_max, std::abs(p[0][0] + p[1][1]));
            }
        } catch (const std::exception& e) {
            throw NumericalError(std::string("action evaluation failed at ") + describe(x, y, dim) +
                                 ": " + e.what());
        }
        if (!std::isfinite(det)) {
            throw NumericalError("non-finite mixed-derivative determinant at " + describe(x, y, dim));
        }
        summary.min = std::min(summary.min, det);
        summary.max = std::max(summary.max, det);
        sum += det;
    }

    summary.mean = sum / static_cast<double>(n_samples);
    const double range = summary.max - summary.min;
    summary.relative_spread = std::abs(summary.mean) < 1e-14 ? range : range / std::abs(summary.mean);

    CriterionReport report;
    report.samples = n_samples;
    report.det = summary;
    report.tolerance = tolerance;
    report.is_constant = summary.relative_spread < tolerance;
    if (perturbed) report.trace_linearized = trace_max;
    return report;
}

double max_linearized_trace(const MixedBlockFn& mixed_block, const DomainBox& domain,
                            std::size_t n_samples) {
    validate_domain(domain, 2, n_samples);
    double worst = 0.0;
    for (const auto& u : low_discrepancy_points(n_samples, 4)) {
        const auto [x, y] = to_pair(u, domain, 2);
        const Mat2 h = mixed_block(x, y);
        worst = std::max(worst, std::abs(h[0][0] + h[1][1]));
    }
    return worst;
}

double check_linearized(const ActionModel& model, const DomainBox& domain, std::size_t n_samples) {
    if (model.kind() != ActionKind::vector_potential_2d) {
        throw PreconditionError("check_linearized needs a vector_potential_2d action, got " +
                                to_string(model.kind()));
    }
    return max_linearized_trace(
        [&model](const Point& x, const Point& y) { return model.perturbation_mixed(x, y); }, domain,
        n_samples);
}

}  // namespace dtqm
