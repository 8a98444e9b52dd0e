#include "dtqm/action.hpp"

#include <cmath>

#include "dtqm/errors.hpp"

namespace dtqm {

namespace {

Point difference(const Point& x, const Point& y) { return {x[0] - y[0], x[1] - y[1]}; }

double squared(const Point& d, int dimension) {
    double s = 0.0;
    for (int k = 0; k < dimension; ++k) s += d[k] * d[k];
    return s;
}

}  // namespace

PhysicalConstants PhysicalConstants::make(double mass, double time_step, double hbar) {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(mass)) throw PreconditionError("mass must be positive");
    if (!positive(time_step)) throw PreconditionError("time step must be positive");
    if (!positive(hbar)) throw PreconditionError("hbar must be positive");
    return PhysicalConstants{mass, time_step, hbar};
}

std::string to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::standard: return "standard";
        case ActionKind::gauged: return "gauged";
        case ActionKind::quartic: return "quartic";
        case ActionKind::sine: return "sine";
        case ActionKind::vector_potential_2d: return "vector_potential_2d";
    }
    return "unknown";
}

ActionModel ActionModel::with_time_step(double tau) const {
    ActionModel out = *this;
    out.constants_ = constants_.with_time_step(tau);
    return out;
}

double ActionModel::value(const Point& x, const Point& y) const {
    const double m = constants_.mass;
    const double tau = constants_.time_step;
    if (kind_ == ActionKind::sine) return -coupling_ * std::sin(x[0]) * std::sin(y[0]);

    const Point d = difference(x, y);
    double s = m / (2.0 * tau) * squared(d, dimension_) -
               0.5 * tau * (potential_.value(x, dimension_) + potential_.value(y, dimension_));
    switch (kind_) {
        case ActionKind::gauged: s += gauge_.value(x[0]) - gauge_.value(y[0]); break;
        case ActionKind::quartic: s += epsilon_ * d[0] * d[0] * d[0] * d[0]; break;
        case ActionKind::vector_potential_2d: s += perturbation(x, y); break;
        default: break;
    }
    return s;
}

Point ActionModel::grad_x(const Point& x, const Point& y) const {
    if (kind_ == ActionKind::sine) return {-coupling_ * std::cos(x[0]) * std::sin(y[0]), 0.0};

    const double m = constants_.mass;
    const double tau = constants_.time_step;
    const Point d = difference(x, y);
    const Point dv = potential_.gradient(x, dimension_);
    Point g{0.0, 0.0};
    for (int k = 0; k < dimension_; ++k) g[k] = m / tau * d[k] - 0.5 * tau * dv[k];
    switch (kind_) {
        case ActionKind::gauged: g[0] += gauge_.derivative(x[0]); break;
        case ActionKind::quartic: g[0] += 4.0 * epsilon_ * d[0] * d[0] * d[0]; break;
        case ActionKind::vector_potential_2d: {
            const Point p = perturbation_grad_x(x, y);
            g[0] += p[0];
            g[1] += p[1];
            break;
        }
        default: break;
    }
    return g;
}

Point ActionModel::grad_y(const Point& x, const Point& y) const {
    if (kind_ == ActionKind::sine) return {-coupling_ * std::sin(x[0]) * std::cos(y[0]), 0.0};

    const double m = constants_.mass;
    const double tau = constants_.time_step;
    const Point d = difference(x, y);
    const Point dv = potential_.gradient(y, dimension_);
    Point g{0.0, 0.0};
    for (int k = 0; k < dimension_; ++k) g[k] = -m / tau * d[k] - 0.5 * tau * dv[k];
    switch (kind_) {
        case ActionKind::gauged: g[0] -= gauge_.derivative(y[0]); break;
        case ActionKind::quartic: g[0] -= 4.0 * epsilon_ * d[0] * d[0] * d[0]; break;
        case ActionKind::vector_potential_2d: {
            const Point p = perturbation_grad_y(x, y);
            g[0] += p[0];
            g[1] += p[1];
            break;
        }
        default: break;
    }
    return g;
}

Mat2 ActionModel::mixed(const Point& x, const Point& y) const {
    Mat2 h{};
    if (kind_ == ActionKind::sine) {
        h[0][0] = -coupling_ * std::cos(x[0]) * std::cos(y[0]);
        return h;
    }
    const double diag = -constants_.mass / constants_.time_step;
    for (int k = 0; k < dimension_; ++k) h[k][k] = diag;
    if (kind_ == ActionKind::quartic) {
        const double d = x[0] - y[0];
        h[0][0] -= 12.0 * epsilon_ * d * d;
    } else if (kind_ == ActionKind::vector_potential_2d) {
        const Mat2 p = perturbation_mixed(x, y);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) h[a][b] += p[a][b];
    }
    return h;
}

double ActionModel::perturbation(const Point& x, const Point& y) const {
    if (kind_ != ActionKind::vector_potential_2d) return 0.0;
    const auto& a1 = pair_first_;
    const auto& a2 = pair_second_;
    return 0.5 * ((a1.value(x[0], y[1]) - a1.value(y[0], x[1])) +
                  (a2.value(y[0], x[1]) - a2.value(x[0], y[1])));
}

Point ActionModel::perturbation_grad_x(const Point& x, const Point& y) const {
    const auto& a1 = pair_first_;
    const auto& a2 = pair_second_;
    return {0.5 * (a1.d_a(x[0], y[1]) - a2.d_a(x[0], y[1])),
            0.5 * (a2.d_b(y[0], x[1]) - a1.d_b(y[0], x[1]))};
}

Point ActionModel::perturbation_grad_y(const Point& x, const Point& y) const {
    const auto& a1 = pair_first_;
    const auto& a2 = pair_second_;
    return {0.5 * (a2.d_a(y[0], x[1]) - a1.d_a(y[0], x[1])),
            0.5 * (a1.d_b(x[0], y[1]) - a2.d_b(x[0], y[1]))};
}

Mat2 ActionModel::perturbation_mixed(const Point& x, const Point& y) const {
    Mat2 h{};
    if (kind_ != ActionKind::vector_potential_2d) return h;
    const auto& a1 = pair_first_;
    const auto& a2 = pair_second_;
    // Each term couples x_a only with y_b for b != a, so the diagonal is zero.
    h[0][1] = 0.5 * (a1.d_ab(x[0], y[1]) - a2.d_ab(x[0], y[1]));
    h[1][0] = 0.5 * (a2.d_ab(y[0], x[1]) - a1.d_ab(y[0], x[1]));
    return h;
}

ActionModel standard_action(const PhysicalConstants& constants, const Potential& potential,
                            int dimension) {
    if (dimension != 1 && dimension != 2) throw PreconditionError("dimension must be 1 or 2");
    return ActionModel(ActionKind::standard, dimension, constants, potential);
}

ActionModel gauged_action(const PhysicalConstants& constants, const Potential& potential,
                          const GaugeFunction& phi) {
    ActionModel model(ActionKind::gauged, 1, constants, potential);
    model.gauge_ = phi;
    return model;
}

ActionModel quartic_action(const PhysicalConstants& constants, const Potential& potential,
                           double epsilon) {
    ActionModel model(ActionKind::quartic, 1, constants, potential);
    model.epsilon_ = epsilon;
    return model;
}

ActionModel sine_action(const PhysicalConstants& constants, double c) {
    if (!(c > 0.0)) throw PreconditionError("sine action needs c > 0");
    ActionModel model(ActionKind::sine, 1, constants, Potential::zero());
    model.coupling_ = c;
    return model;
}

ActionModel vector_potential_action_2d(const PhysicalConstants& constants, const Potential& potential,
                                       const PairFunction& a1, const PairFunction& a2) {
    ActionModel model(ActionKind::vector_potential_2d, 2, constants, potential);
    model.pair_first_ = a1;
    model.pair_second_ = a2;
    return model;
}

double continuum_lagrangian(const ActionModel& model, double x, double v) {
    if (!model.is_standard_family()) {
        throw PreconditionError("continuum_lagrangian needs a standard or gauged action, got " +
                                to_string(model.kind()));
    }
    const double tau = model.constants().time_step;
    return model.value({x, 0.0}, {x - tau * v, 0.0}) / tau;
}

double analytic_lagrangian(const ActionModel& model, double x, double v) {
    if (!model.is_standard_family()) {
        throw PreconditionError("analytic_lagrangian needs a standard or gauged action, got " +
                                to_string(model.kind()));
    }
    double l = 0.5 * model.constants().mass * v * v - model.potential().value({x, 0.0}, 1);
    if (model.kind() == ActionKind::gauged) l += model.gauge().derivative(x) * v;
    return l;
}

namespace {

void require_vector_potential(const ActionModel& model) {
    if (model.kind() != ActionKind::vector_potential_2d) {
        throw PreconditionError("operation needs a vector_potential_2d action, got " +
                                to_string(model.kind()));
    }
}

}  // namespace

double continuum_lagrangian_2d(const ActionModel& model, const Point& x, const Point& v) {
    require_vector_potential(model);
    const double tau = model.constants().time_step;
    return model.value(x, {x[0] - tau * v[0], x[1] - tau * v[1]}) / tau;
}

Point vector_potential(const ActionModel& model, const Point& x) {
    require_vector_potential(model);
    return {model.pair_first().d_a(x[0], x[1]), model.pair_second().d_b(x[0], x[1])};
}

double charged_particle_lagrangian(const ActionModel& model, const Point& x, const Point& v) {
    const Point qa = vector_potential(model, x);
    const double kinetic = 0.5 * model.constants().mass * (v[0] * v[0] + v[1] * v[1]);
    return kinetic + v[0] * qa[0] + v[1] * qa[1] - model.potential().value(x, 2);
}

double total_derivative_term(const ActionModel& model, const Point& x, const Point& v) {
    require_vector_potential(model);
    const auto& a1 = model.pair_first();
    const auto& a2 = model.pair_second();
    const double rate = (a1.d_a(x[0], x[1]) + a2.d_a(x[0], x[1])) * v[0] +
                        (a1.d_b(x[0], x[1]) + a2.d_b(x[0], x[1])) * v[1];
    return -0.5 * rate;
}

double continuum_limit_2d(const ActionModel& model, const Point& x, const Point& v) {
    return charged_particle_lagrangian(model, x, v) + total_derivative_term(model, x, v);
}

}  // namespace dtqm
