#pragma once

#include <string>

#include "dtqm/types.hpp"

namespace dtqm {

// Built-in scalar potentials V(x). In two dimensions every kind acts as the
// sum of its one-dimensional form over both coordinates (harmonic: the
// isotropic well). `offset` adds a constant to V.
class Potential {
public:
    enum class Kind { zero, harmonic, quartic, cosine };

    static Potential zero();
    // (1/2) mass omega^2 x^2
    static Potential harmonic(double mass, double omega);
    // lambda x^4
    static Potential quartic(double lambda);
    // -depth cos(wavenumber x)
    static Potential cosine(double depth, double wavenumber);

    Potential with_offset(double offset) const;

    Kind kind() const { return kind_; }
    std::string name() const;

    double value(const Point& x, int dimension) const;
    Point gradient(const Point& x, int dimension) const;
    // One-dimensional derivative V'(x).
    double derivative(double x) const;

private:
    Potential(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}
    double value_1d(double x) const;

    Kind kind_;
    double a_;
    double b_;
    double offset_ = 0.0;
};

// Gauge function phi(x) = c0 + c1 x + c2 x^2 (one dimension).
class GaugeFunction {
public:
    static GaugeFunction zero() { return {0.0, 0.0, 0.0}; }
    static GaugeFunction constant(double c) { return {c, 0.0, 0.0}; }
    static GaugeFunction linear(double k) { return {0.0, k, 0.0}; }
    static GaugeFunction quadratic(double a) { return {0.0, 0.0, a}; }
    static GaugeFunction polynomial(double c0, double c1, double c2) { return {c0, c1, c2}; }

    double value(double x) const { return c0_ + x * (c1_ + x * c2_); }
    double derivative(double x) const { return c1_ + 2.0 * c2_ * x; }

private:
    GaugeFunction(double c0, double c1, double c2) : c0_(c0), c1_(c1), c2_(c2) {}
    double c0_;
    double c1_;
    double c2_;
};

// Two-argument building block F(a, b) of the 2D vector-potential action.
class PairFunction {
public:
    enum class Kind { zero, bilinear, quadratic_linear, sine_product };

    static PairFunction zero() { return {Kind::zero, 0.0}; }
    // k a b
    static PairFunction bilinear(double k) { return {Kind::bilinear, k}; }
    // k a^2 b
    static PairFunction quadratic_linear(double k) { return {Kind::quadratic_linear, k}; }
    // k sin(a) sin(b)
    static PairFunction sine_product(double k) { return {Kind::sine_product, k}; }

    Kind kind() const { return kind_; }
    double value(double a, double b) const;
    double d_a(double a, double b) const;
    double d_b(double a, double b) const;
    double d_ab(double a, double b) const;

private:
    PairFunction(Kind kind, double k) : kind_(kind), k_(k) {}
    Kind kind_;
    double k_;
};

}  // namespace dtqm
