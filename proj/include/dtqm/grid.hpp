#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dtqm/types.hpp"

namespace dtqm {

enum class Boundary { periodic };

// One uniform lattice axis: x_j = x_min + j * spacing, j = 0..n_points-1.
struct Axis {
    std::size_t n_points = 0;
    double x_min = 0.0;
    double spacing = 0.0;

    double point(std::size_t j) const { return x_min + static_cast<double>(j) * spacing; }
    double extent() const { return static_cast<double>(n_points) * spacing; }
    double x_max() const { return point(n_points - 1); }

    friend bool operator==(const Axis&, const Axis&) = default;
};

// Uniform position lattice in one or two dimensions. Two-dimensional grids
// are the Cartesian product of two axes, flattened row-major: the flat index
// of (j1, j2) is j1 * n2 + j2.
class SpatialGrid {
public:
    static SpatialGrid line(std::size_t n_points, double x_min, double spacing);
    static SpatialGrid plane(const Axis& first, const Axis& second);

    int dimension() const { return static_cast<int>(axes_.size()); }
    const Axis& axis(int d) const { return axes_.at(static_cast<std::size_t>(d)); }
    Boundary boundary() const { return Boundary::periodic; }

    // Total number of lattice sites.
    std::size_t size() const;
    // Quadrature weight of one site (spacing, or the product of spacings).
    double weight() const;
    // Spacing and extent of the first axis.
    double spacing() const { return axes_.front().spacing; }
    double extent() const { return axes_.front().extent(); }

    Point point(std::size_t flat) const;
    std::vector<Point> points() const;

    friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

private:
    explicit SpatialGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {}
    std::vector<Axis> axes_;
};

SpatialGrid make_grid(std::size_t n_points, double x_min, double spacing);

// Complex amplitudes psi_j over a grid.
class WaveState {
public:
    WaveState(SpatialGrid grid, ComplexVector amplitudes);

    const SpatialGrid& grid() const { return grid_; }
    const ComplexVector& amplitudes() const { return amplitudes_; }

    // sqrt(sum_j w |psi_j|^2)
    double norm() const;
    bool is_normalized(double tolerance = 1e-12) const;
    WaveState normalized() const;

    // Set by make_gaussian when the packet is under-resolved or too wide for
    // the box.
    bool resolution_warning() const { return resolution_warning_; }
    void set_resolution_warning(bool flag) { resolution_warning_ = flag; }

private:
    SpatialGrid grid_;
    ComplexVector amplitudes_;
    bool resolution_warning_ = false;
};

Complex inner(const WaveState& a, const WaveState& b);

// Mean position per dimension. Requires a normalized state (relative norm
// error below 1e-6).
Point expect_x(const WaveState& psi);

// Position spread sqrt(<x^2> - <x>^2) per dimension.
Point spread_x(const WaveState& psi);

// Central-difference momentum along one axis, periodic wraparound:
// (P psi)_j = -i hbar (psi_{j+1} - psi_{j-1}) / (2 dx).
ComplexVector apply_momentum(const WaveState& psi, int axis, double hbar);

// Dense matrix of apply_momentum (Hermitian by construction).
ComplexMatrix momentum_matrix(const SpatialGrid& grid, int axis, double hbar);

// <psi|P|psi> per dimension. Meaningful only for packets localized away from
// the boundary; that is not checked.
Point expect_p(const WaveState& psi, double hbar);

// Momentum spread per dimension under the same central-difference P.
Point spread_p(const WaveState& psi, double hbar);

// Normalized minimum-uncertainty packet
//   psi_j ~ exp(-(x_j - x0)^2 / (4 sigma^2) + i p0 x_j / hbar),
// sigma = alpha sqrt(hbar/2), product form in 2D. Sets resolution_warning
// when sigma < 2 dx or sigma > L/8 on any axis.
WaveState make_gaussian(const SpatialGrid& grid, const Point& x0, const Point& p0, double alpha,
                        double hbar);

// psi_j -> exp(-i phi_j / hbar) psi_j.
WaveState apply_gauge_phase(const WaveState& psi, std::span<const double> phi, double hbar);

}  // namespace dtqm
