#include "dtqm/functions.hpp"

#include <cmath>

namespace dtqm {

Potential Potential::zero() { return {Kind::zero, 0.0, 0.0}; }

Potential Potential::harmonic(double mass, double omega) {
    return {Kind::harmonic, mass * omega * omega, 0.0};
}

Potential Potential::quartic(double lambda) { return {Kind::quartic, lambda, 0.0}; }

Potential Potential::cosine(double depth, double wavenumber) {
    return {Kind::cosine, depth, wavenumber};
}

Potential Potential::with_offset(double offset) const {
    Potential out = *this;
    out.offset_ = offset;
    return out;
}

std::string Potential::name() const {
    switch (kind_) {
        case Kind::zero: return "zero";
        case Kind::harmonic: return "harmonic";
        case Kind::quartic: return "quartic";
        case Kind::cosine: return "cosine";
    }
    return "unknown";
}

double Potential::value_1d(double x) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::harmonic: return 0.5 * a_ * x * x;
        case Kind::quartic: return a_ * x * x * x * x;
        case Kind::cosine: return -a_ * std::cos(b_ * x);
    }
    return 0.0;
}

double Potential::derivative(double x) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::harmonic: return a_ * x;
        case Kind::quartic: return 4.0 * a_ * x * x * x;
        case Kind::cosine: return a_ * b_ * std::sin(b_ * x);
    }
    return 0.0;
}

double Potential::value(const Point& x, int dimension) const {
    double v = offset_;
    for (int d = 0; d < dimension; ++d) v += value_1d(x[d]);
    return v;
}

Point Potential::gradient(const Point& x, int dimension) const {
    Point g{0.0, 0.0};
    for (int d = 0; d < dimension; ++d) g[d] = derivative(x[d]);
    return g;
}

double PairFunction::value(double a, double b) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::bilinear: return k_ * a * b;
        case Kind::quadratic_linear: return k_ * a * a * b;
        case Kind::sine_product: return k_ * std::sin(a) * std::sin(b);
    }
    return 0.0;
}

double PairFunction::d_a(double a, double b) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::bilinear: return k_ * b;
        case Kind::quadratic_linear: return 2.0 * k_ * a * b;
        case Kind::sine_product: return k_ * std::cos(a) * std::sin(b);
    }
    return 0.0;
}

double PairFunction::d_b(double a, double b) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::bilinear: return k_ * a;
        case Kind::quadratic_linear: return k_ * a * a;
        case Kind::sine_product: return k_ * std::sin(a) * std::cos(b);
    }
    return 0.0;
}

double PairFunction::d_ab(double a, double b) const {
    switch (kind_) {
        case Kind::zero: return 0.0;
        case Kind::bilinear: return k_;
        case Kind::quadratic_linear: return 2.0 * k_ * a;
        case Kind::sine_product: return k_ * std::cos(a) * std::cos(b);
    }
    return 0.0;
}

}  // namespace dtqm
