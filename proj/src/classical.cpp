#include "dtqm/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtqm/errors.hpp"
#include "dtqm/roots.hpp"

namespace dtqm {

namespace {

double gradient_scale(const ActionModel& model) {
    return model.constants().mass / model.constants().time_step;
}

double quantum_length(const ActionModel& model) {
    const auto& c = model.constants();
    return std::sqrt(c.hbar * c.time_step / c.mass);
}

double distance(const Point& a, const Point& b, int dimension) {
    double s = 0.0;
    for (int d = 0; d < dimension; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return std::sqrt(s);
}

double magnitude(const Point& a, int dimension) { return distance(a, Point{0.0, 0.0}, dimension); }

// Finds the zeros of f on [centre - radius, centre + radius] by a uniform
// sign-change scan followed by safeguarded Newton on every bracket; falls
// back to Newton from the best node when no sign change is seen.
StepResult solve_scalar(const std::function<double(double)>& f, const std::function<double(double)>& df,
                        double centre, double radius, double prediction, double f_tolerance,
                        std::size_t subintervals) {
    const double lo = centre - radius;
    const double width = 2.0 * radius / static_cast<double>(subintervals);
    std::vector<double> nodes(subintervals + 1);
    std::vector<double> values(subintervals + 1);
    for (std::size_t i = 0; i <= subintervals; ++i) {
        nodes[i] = lo + width * static_cast<double>(i);
        values[i] = f(nodes[i]);
    }

    std::vector<RootResult> roots;
    for (std::size_t i = 0; i < subintervals; ++i) {
        const double a = values[i];
        const double b = values[i + 1];
        if (a == 0.0) {
            roots.push_back({nodes[i], 0.0, 0});
            continue;
        }
        if (b == 0.0) continue;  // picked up as the left node of the next interval
        if ((a > 0.0) != (b > 0.0)) {
            if (auto r = safeguarded_newton(f, df, nodes[i], nodes[i + 1], f_tolerance)) {
                roots.push_back(*r);
            }
        }
    }
    if (values[subintervals] == 0.0) roots.push_back({nodes[subintervals], 0.0, 0});

    StepResult out;
    if (roots.empty()) {
        // Tangential zero: polish from the node with the smallest |f|.
        std::size_t best = 0;
        for (std::size_t i = 1; i <= subintervals; ++i) {
            if (std::abs(values[i]) < std::abs(values[best])) best = i;
        }
        double x = nodes[best];
        double fx = values[best];
        for (int it = 0; it < 50 && std::abs(fx) > f_tolerance; ++it) {
            const double slope = df(x);
            if (slope == 0.0 || !std::isfinite(slope)) break;
            const double next = std::clamp(x - fx / slope, lo, centre + radius);
            const double f_next = f(next);
            if (!(std::abs(f_next) < std::abs(fx))) break;
            x = next;
            fx = f_next;
        }
        out.x_next = {x, 0.0};
        out.residual = std::abs(fx);
        if (std::abs(fx) <= f_tolerance) {
            out.status = StepStatus::ok;
            out.roots_found = 1;
        } else {
            out.status = StepStatus::no_solution;
        }
        return out;
    }

    const auto nearest = std::min_element(roots.begin(), roots.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.x - prediction) < std::abs(b.x - prediction);
    });
    out.x_next = {nearest->x, 0.0};
    out.residual = std::abs(nearest->residual);
    out.roots_found = roots.size();
    out.status = roots.size() == 1 ? StepStatus::ok : StepStatus::non_unique;
    return out;
}

bool solve_2x2(const Mat2& j, const Point& rhs, Point& out) {
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    const double scale = std::max({std::abs(j[0][0]), std::abs(j[0][1]), std::abs(j[1][0]), std::abs(j[1][1])});
    if (!(std::abs(det) > 1e-14 * scale * scale) || !std::isfinite(det)) return false;
    out = {(j[1][1] * rhs[0] - j[0][1] * rhs[1]) / det, (j[0][0] * rhs[1] - j[1][0] * rhs[0]) / det};
    return true;
}

// Newton for the two-component momentum balance G(xi) = p + grad_y S(xi, x_now).
StepResult solve_planar(const ActionModel& model, const Point& x_now, const Point& p_now,
                        const Point& prediction, double radius, double f_tolerance) {
    auto residual = [&](const Point& xi) {
        const Point g = model.grad_y(xi, x_now);
        return Point{p_now[0] + g[0], p_now[1] + g[1]};
    };
    auto jacobian = [&](const Point& xi) {
        const Mat2 h = model.mixed(xi, x_now);
        return Mat2{{{h[0][0], h[1][0]}, {h[0][1], h[1][1]}}};  // dG_b/dxi_a = h[a][b]
    };
    auto finite_difference_jacobian = [&](const Point& xi) {
        Mat2 j{};
        const double h = 1e-6 * std::max(1.0, magnitude(xi, 2));
        for (int a = 0; a < 2; ++a) {
            Point up = xi;
            Point down = xi;
            up[a] += h;
            down[a] -= h;
            const Point gu = residual(up);
            const Point gd = residual(down);
            for (int b = 0; b < 2; ++b) j[b][a] = (gu[b] - gd[b]) / (2.0 * h);
        }
        return j;
    };

    Point xi = prediction;
    Point g = residual(xi);
    double norm_g = magnitude(g, 2);
    for (int it = 0; it < 100 && norm_g > f_tolerance; ++it) {
        Point step{};
        if (!solve_2x2(jacobian(xi), {-g[0], -g[1]}, step) &&
            !solve_2x2(finite_difference_jacobian(xi), {-g[0], -g[1]}, step)) {
            break;
        }
        double damping = 1.0;
        bool improved = false;
        for (int k = 0; k < 30; ++k) {
            const Point trial{xi[0] + damping * step[0], xi[1] + damping * step[1]};
            const Point g_trial = residual(trial);
            if (magnitude(g_trial, 2) < norm_g) {
                xi = trial;
                g = g_trial;
                norm_g = magnitude(g, 2);
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if (!improved) break;
    }

    StepResult out;
    out.x_next = xi;
    out.residual = norm_g;
    const bool inside = distance(xi, x_now, 2) <= radius;
    if (norm_g <= f_tolerance && inside) {
        out.status = StepStatus::ok;
        out.roots_found = 1;
    } else {
        out.status = StepStatus::no_solution;
    }
    return out;
}

void record_step(ClassicalTrajectory& traj, const StepResult& step, std::size_t index) {
    if (step.status == StepStatus::non_unique && traj.status == TrajectoryStatus::complete) {
        traj.status = TrajectoryStatus::non_unique;
        traj.status_step = index;
    }
}

ClassicalTrajectory run(const ActionModel& model, const Point& x0, const Point& p0,
                        const std::optional<Point>& x_prev, std::size_t n_steps,
                        const SolverSettings& settings) {
    if (n_steps < 1) throw PreconditionError("integration needs at least one step");
    const int dim = model.dimension();
    const double tau = model.constants().time_step;
    const double mass = model.constants().mass;

    ClassicalTrajectory traj;
    traj.dimension = dim;
    traj.times.push_back(0);
    traj.positions.push_back(x0);
    traj.momenta.push_back(p0);
    traj.residuals.push_back(0.0);

    std::optional<Point> previous = x_prev;
    for (std::size_t n = 0; n < n_steps; ++n) {
        const Point x_now = traj.positions.back();
        const Point p_now = traj.momenta.back();
        Point prediction{};
        double displacement = 0.0;
        if (previous) {
            for (int d = 0; d < dim; ++d) prediction[d] = 2.0 * x_now[d] - (*previous)[d];
            displacement = distance(x_now, *previous, dim);
        } else {
            for (int d = 0; d < dim; ++d) prediction[d] = x_now[d] + tau * p_now[d] / mass;
            displacement = distance(prediction, x_now, dim);
        }
        const double radius = settings.radius_scale * (displacement + quantum_length(model));
        const StepResult step = eom_step_from_momentum(model, x_now, p_now, prediction, radius, settings);
        if (step.status == StepStatus::no_solution) {
            traj.status = TrajectoryStatus::no_solution;
            traj.status_step = n + 1;
            break;
        }
        record_step(traj, step, n + 1);
        traj.times.push_back(static_cast<long>(n + 1));
        traj.positions.push_back(step.x_next);
        traj.momenta.push_back(momentum_from_pair(model, step.x_next, x_now));
        traj.residuals.push_back(step.residual);
        previous = x_now;
    }
    return traj;
}

}  // namespace

Point momentum_from_pair(const ActionModel& model, const Point& x_now, const Point& x_prev) {
    return model.grad_x(x_now, x_prev);
}

StepResult eom_step_from_momentum(const ActionModel& model, const Point& x_now, const Point& p_now,
                                  const Point& prediction, double radius,
                                  const SolverSettings& settings) {
    if (settings.subintervals < 1) throw PreconditionError("root scan needs at least one subinterval");
    if (!(radius > 0.0)) throw PreconditionError("root scan radius must be positive");
    const double f_tolerance = settings.tolerance * gradient_scale(model);

    if (model.dimension() == 2) {
        return solve_planar(model, x_now, p_now, prediction, radius, f_tolerance);
    }
    auto f = [&](double xi) { return p_now[0] + model.grad_y({xi, 0.0}, x_now)[0]; };
    auto df = [&](double xi) { return model.mixed({xi, 0.0}, x_now)[0][0]; };
    return solve_scalar(f, df, x_now[0], radius, prediction[0], f_tolerance, settings.subintervals);
}

StepResult eom_step(const ActionModel& model, const Point& x_prev, const Point& x_now,
                    const SolverSettings& settings) {
    const int dim = model.dimension();
    const Point p_now = momentum_from_pair(model, x_now, x_prev);
    Point prediction{};
    for (int d = 0; d < dim; ++d) prediction[d] = 2.0 * x_now[d] - x_prev[d];
    const double radius =
        settings.radius_scale * (distance(x_now, x_prev, dim) + quantum_length(model));
    return eom_step_from_momentum(model, x_now, p_now, prediction, radius, settings);
}

Point previous_from_momentum(const ActionModel& model, const Point& x0, const Point& p0,
                             const SolverSettings& settings) {
    const int dim = model.dimension();
    const double tau = model.constants().time_step;
    const double mass = model.constants().mass;
    Point guess{};
    for (int d = 0; d < dim; ++d) guess[d] = x0[d] - tau * p0[d] / mass;
    const double radius = settings.radius_scale * (distance(guess, x0, dim) + quantum_length(model));
    const double f_tolerance = settings.tolerance * gradient_scale(model);

    StepResult r;
    if (dim == 2) {
        // grad_x S(x0, y) - p0 = 0; reuse the planar solver on the swapped action.
        auto residual = [&](const Point& y) {
            const Point g = model.grad_x(x0, y);
            return Point{g[0] - p0[0], g[1] - p0[1]};
        };
        Point y = guess;
        Point g = residual(y);
        for (int it = 0; it < 100 && magnitude(g, 2) > f_tolerance; ++it) {
            const Mat2 h = model.mixed(x0, y);  // d(grad_x)_a / dy_b = h[a][b]
            Point step{};
            if (!solve_2x2(h, {-g[0], -g[1]}, step)) break;
            y = {y[0] + step[0], y[1] + step[1]};
            g = residual(y);
        }
        r.x_next = y;
        r.residual = magnitude(g, 2);
        r.status = r.residual <= f_tolerance ? StepStatus::ok : StepStatus::no_solution;
    } else {
        auto f = [&](double y) { return model.grad_x(x0, {y, 0.0})[0] - p0[0]; };
        auto df = [&](double y) { return model.mixed(x0, {y, 0.0})[0][0]; };
        r = solve_scalar(f, df, guess[0], radius, guess[0], f_tolerance, settings.subintervals);
    }
    if (r.status == StepStatus::no_solution) {
        throw NumericalError("no previous position reproduces the requested momentum");
    }
    return r.x_next;
}

std::string ClassicalTrajectory::status_string() const {
    switch (status) {
        case TrajectoryStatus::complete: return "complete";
        case TrajectoryStatus::no_solution: return "no_solution_at(" + std::to_string(*status_step) + ")";
        case TrajectoryStatus::non_unique: return "non_unique_at(" + std::to_string(*status_step) + ")";
    }
    return "unknown";
}

ClassicalTrajectory integrate(const ActionModel& model, const Point& x0, const Point& x_prev,
                              std::size_t n_steps, const SolverSettings& settings) {
    return run(model, x0, momentum_from_pair(model, x0, x_prev), x_prev, n_steps, settings);
}

ClassicalTrajectory integrate_from_momentum(const ActionModel& model, const Point& x0,
                                            const Point& p0, std::size_t n_steps,
                                            const SolverSettings& settings) {
    return run(model, x0, p0, std::nullopt, n_steps, settings);
}

std::vector<double> leapfrog_reference(const std::function<double(double)>& potential_derivative,
                                       double mass, double tau, double x0, double x_prev,
                                       std::size_t n_steps) {
    std::vector<double> xs{x0};
    xs.reserve(n_steps + 1);
    double previous = x_prev;
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double now = xs.back();
        const double next = 2.0 * now - previous - tau * tau / mass * potential_derivative(now);
        previous = now;
        xs.push_back(next);
    }
    return xs;
}

}  // namespace dtqm
