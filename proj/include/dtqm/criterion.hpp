#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "dtqm/action.hpp"

namespace dtqm {

// Axis-aligned box for x (and, identically, for y). Only the first
// `dimension` components are used.
struct DomainBox {
    Point lo{0.0, 0.0};
    Point hi{0.0, 0.0};
};

struct DetSummary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    // (max - min) / |mean|, or (max - min) when |mean| < 1e-14.
    double relative_spread = 0.0;
};

struct CriterionReport {
    std::size_t samples = 0;
    DetSummary det;
    double tolerance = 0.0;
    bool is_constant = false;
    // Max |sum_a d^2 s / dx_a dy_a| for vector-potential models.
    std::optional<double> trace_linearized;
};

inline constexpr std::size_t kDefaultCriterionSamples = 1024;
inline constexpr double kDefaultCriterionTolerance = 1e-8;

// Deterministic low-discrepancy points in the unit cube [0,1)^dims
// (additive recurrence with the generalized golden ratio).
std::vector<std::vector<double>> low_discrepancy_points(std::size_t count, int dims);

// Evaluates det(d^2 S / dx dy) at `n_samples` (x, y) pairs drawn from
// domain x domain and summarizes its spread. A constant determinant is the
// discrete unitarity condition on the action.
CriterionReport check_criterion(const ActionModel& model, const DomainBox& domain,
                                std::size_t n_samples = kDefaultCriterionSamples,
                                double tolerance = kDefaultCriterionTolerance);

using MixedBlockFn = std::function<Mat2(const Point&, const Point&)>;

// Max over samples of |trace(mixed_block(x, y))| in two dimensions.
double max_linearized_trace(const MixedBlockFn& mixed_block, const DomainBox& domain,
                            std::size_t n_samples);

// max_linearized_trace of the model's vector-potential perturbation.
double check_linearized(const ActionModel& model, const DomainBox& domain,
                        std::size_t n_samples = kDefaultCriterionSamples);

}  // namespace dtqm
