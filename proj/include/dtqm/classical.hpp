#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dtqm/action.hpp"

namespace dtqm {

// Root search for the discrete equation of motion. The scan covers
// [x_now - R, x_now + R] with R = radius_scale * |x_now - x_prev|
// + radius_scale * sqrt(hbar tau / m); |residual| must fall below
// tolerance * m / tau.
struct SolverSettings {
    double radius_scale = 10.0;
    std::size_t subintervals = 64;
    double tolerance = 1e-10;
};

enum class StepStatus { ok, no_solution, non_unique };

struct StepResult {
    StepStatus status = StepStatus::ok;
    Point x_next{0.0, 0.0};
    // |p_now + dS(x_next, x_now)/dy| at the returned point (the smallest value
    // seen when status is no_solution).
    double residual = 0.0;
    std::size_t roots_found = 0;
};

// p = dS(x, y)/dx at (x_now, x_prev).
Point momentum_from_pair(const ActionModel& model, const Point& x_now, const Point& x_prev);

// Solve dS(x_now, x_prev)/dx + dS(x_next, x_now)/dy = 0 for x_next.
StepResult eom_step(const ActionModel& model, const Point& x_prev, const Point& x_now,
                    const SolverSettings& settings = {});

// Same equation written with the incoming momentum p_now = dS(x_now, x_prev)/dx.
// `prediction` breaks ties between multiple roots; the scan is centred on
// x_now with half-width `radius`.
StepResult eom_step_from_momentum(const ActionModel& model, const Point& x_now, const Point& p_now,
                                  const Point& prediction, double radius,
                                  const SolverSettings& settings = {});

// x_prev such that momentum_from_pair(model, x0, x_prev) = p0. Throws
// NumericalError when no such position exists in the search region.
Point previous_from_momentum(const ActionModel& model, const Point& x0, const Point& p0,
                             const SolverSettings& settings = {});

enum class TrajectoryStatus { complete, no_solution, non_unique };

struct ClassicalTrajectory {
    int dimension = 1;
    std::vector<long> times;
    std::vector<Point> positions;
    std::vector<Point> momenta;
    // Residual of the equation that produced positions[n]; zero for n = 0.
    std::vector<double> residuals;
    TrajectoryStatus status = TrajectoryStatus::complete;
    // Step index of the first failure (no_solution) or first ambiguous root
    // (non_unique).
    std::optional<std::size_t> status_step;

    // "complete", "no_solution_at(k)" or "non_unique_at(k)".
    std::string status_string() const;
};

// Iterates eom_step from (x0, x_prev). Stops at the first step without a
// solution; ambiguous steps continue with the root nearest free motion and
// are flagged.
ClassicalTrajectory integrate(const ActionModel& model, const Point& x0, const Point& x_prev,
                              std::size_t n_steps, const SolverSettings& settings = {});

// Same, seeded with position and momentum. Unlike the two-position form, the
// first step can fail when no x_1 balances p0.
ClassicalTrajectory integrate_from_momentum(const ActionModel& model, const Point& x0,
                                            const Point& p0, std::size_t n_steps,
                                            const SolverSettings& settings = {});

// x_{n+1} = 2 x_n - x_{n-1} - (tau^2 / m) V'(x_n), returns x_0..x_{n_steps}.
std::vector<double> leapfrog_reference(const std::function<double(double)>& potential_derivative,
                                       double mass, double tau, double x0, double x_prev,
                                       std::size_t n_steps);

}  // namespace dtqm
