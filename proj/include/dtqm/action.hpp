#pragma once

#include <string>

#include "dtqm/functions.hpp"
#include "dtqm/types.hpp"

namespace dtqm {

struct PhysicalConstants {
    double mass = 1.0;
    double time_step = 1.0;
    double hbar = 1.0;

    // Throws PreconditionError unless all three are strictly positive and finite.
    static PhysicalConstants make(double mass, double time_step, double hbar);
    PhysicalConstants with_time_step(double tau) const { return make(mass, tau, hbar); }
};

enum class ActionKind { standard, gauged, quartic, sine, vector_potential_2d };

std::string to_string(ActionKind kind);

// One-step action S(x, y) = S(x_{n+1}, x_n) together with its analytic first
// derivatives and the mixed block d^2 S / dx_a dy_b. Immutable.
class ActionModel {
public:
    ActionKind kind() const { return kind_; }
    int dimension() const { return dimension_; }
    const PhysicalConstants& constants() const { return constants_; }
    const Potential& potential() const { return potential_; }

    // Same action with a different time step (kinetic and potential terms
    // rescale; probe parameters are kept).
    ActionModel with_time_step(double tau) const;

    // Standard or gauged: the family whose mixed derivative is exactly -m/tau.
    bool is_standard_family() const {
        return kind_ == ActionKind::standard || kind_ == ActionKind::gauged;
    }

    double value(const Point& x, const Point& y) const;
    Point grad_x(const Point& x, const Point& y) const;
    Point grad_y(const Point& x, const Point& y) const;
    Mat2 mixed(const Point& x, const Point& y) const;

    // The vector-potential perturbation s(x, y) on its own, and its mixed block.
    // Zero for every other kind.
    double perturbation(const Point& x, const Point& y) const;
    Mat2 perturbation_mixed(const Point& x, const Point& y) const;

    const GaugeFunction& gauge() const { return gauge_; }
    const PairFunction& pair_first() const { return pair_first_; }
    const PairFunction& pair_second() const { return pair_second_; }
    double epsilon() const { return epsilon_; }
    double coupling() const { return coupling_; }

private:
    friend ActionModel standard_action(const PhysicalConstants&, const Potential&, int);
    friend ActionModel gauged_action(const PhysicalConstants&, const Potential&, const GaugeFunction&);
    friend ActionModel quartic_action(const PhysicalConstants&, const Potential&, double);
    friend ActionModel sine_action(const PhysicalConstants&, double);
    friend ActionModel vector_potential_action_2d(const PhysicalConstants&, const Potential&,
                                                  const PairFunction&, const PairFunction&);

    ActionModel(ActionKind kind, int dimension, PhysicalConstants constants, Potential potential)
        : kind_(kind), dimension_(dimension), constants_(constants), potential_(potential) {}

    Point perturbation_grad_x(const Point& x, const Point& y) const;
    Point perturbation_grad_y(const Point& x, const Point& y) const;

    ActionKind kind_;
    int dimension_;
    PhysicalConstants constants_;
    Potential potential_;
    GaugeFunction gauge_ = GaugeFunction::zero();
    PairFunction pair_first_ = PairFunction::zero();
    PairFunction pair_second_ = PairFunction::zero();
    double epsilon_ = 0.0;
    double coupling_ = 0.0;
};

// S = (m / 2 tau) |x - y|^2 - (tau / 2) [V(x) + V(y)]
ActionModel standard_action(const PhysicalConstants& constants, const Potential& potential,
                            int dimension = 1);

// Standard action plus phi(x) - phi(y).
ActionModel gauged_action(const PhysicalConstants& constants, const Potential& potential,
                          const GaugeFunction& phi);

// Standard action plus epsilon (x - y)^4. Violates the constant-determinant
// condition for epsilon != 0.
ActionModel quartic_action(const PhysicalConstants& constants, const Potential& potential,
                           double epsilon);

// S = -c sin(x) sin(y); |dS/dy| <= c. Requires c > 0.
ActionModel sine_action(const PhysicalConstants& constants, double c);

// 2D standard action plus
//   s = 1/2 {[A1(x1, y2) - A1(y1, x2)] + [A2(y1, x2) - A2(x1, y2)]}.
ActionModel vector_potential_action_2d(const PhysicalConstants& constants, const Potential& potential,
                                       const PairFunction& a1, const PairFunction& a2);

// S(x, x - tau v) / tau at the model's tau (1D; standard or gauged).
double continuum_lagrangian(const ActionModel& model, double x, double v);
// tau -> 0 limit of continuum_lagrangian: m v^2 / 2 - V(x), plus phi'(x) v when gauged.
double analytic_lagrangian(const ActionModel& model, double x, double v);

// S(x, x - tau v) / tau for the 2D vector-potential model.
double continuum_lagrangian_2d(const ActionModel& model, const Point& x, const Point& v);
// qA_a = dA_a / dx_a evaluated at (x1, x2).
Point vector_potential(const ActionModel& model, const Point& x);
// m |v|^2 / 2 + q v.A - V(x); the total derivative is not included.
double charged_particle_lagrangian(const ActionModel& model, const Point& x, const Point& v);
// -(1/2) d/dt (A1 + A2) along velocity v: the total-derivative part of the limit.
double total_derivative_term(const ActionModel& model, const Point& x, const Point& v);
// The actual tau -> 0 limit of continuum_lagrangian_2d.
double continuum_limit_2d(const ActionModel& model, const Point& x, const Point& v);

}  // namespace dtqm
