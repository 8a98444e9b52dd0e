#include "dtqm/grid.hpp"

#include <cmath>
#include <string>

#include "dtqm/errors.hpp"

namespace dtqm {

namespace {

void validate_axis(const Axis& axis) {
    if (axis.n_points < 4) {
        throw PreconditionError("grid needs at least 4 points, got " +
                                std::to_string(axis.n_points));
    }
    if (!(axis.spacing > 0.0) || !std::isfinite(axis.spacing)) {
        throw PreconditionError("grid spacing must be positive and finite");
    }
    if (!std::isfinite(axis.x_min)) {
        throw PreconditionError("grid origin must be finite");
    }
}

void require_same_grid(const WaveState& a, const WaveState& b) {
    if (!(a.grid() == b.grid())) {
        throw PreconditionError("states live on different grids");
    }
}

void require_normalized(const WaveState& psi) {
    if (std::abs(psi.norm() - 1.0) > 1e-6) {
        throw PreconditionError("state is not normalized (norm = " + std::to_string(psi.norm()) +
                                ")");
    }
}

// Stride of one step along `axis` in the flat row-major index.
std::size_t axis_stride(const SpatialGrid& grid, int axis) {
    return (grid.dimension() == 2 && axis == 0) ? grid.axis(1).n_points : 1;
}

// Flat index of the periodic neighbour at offset +1/-1 along `axis`.
std::size_t neighbour(const SpatialGrid& grid, std::size_t flat, int axis, int offset) {
    const std::size_t n = grid.axis(axis).n_points;
    const std::size_t stride = axis_stride(grid, axis);
    const std::size_t coord = (flat / stride) % n;
    const std::size_t shifted = offset > 0 ? (coord + 1) % n : (coord + n - 1) % n;
    return flat - coord * stride + shifted * stride;
}

}  // namespace

SpatialGrid SpatialGrid::line(std::size_t n_points, double x_min, double spacing) {
    Axis axis{n_points, x_min, spacing};
    validate_axis(axis);
    return SpatialGrid({axis});
}

SpatialGrid SpatialGrid::plane(const Axis& first, const Axis& second) {
    validate_axis(first);
    validate_axis(second);
    return SpatialGrid({first, second});
}

std::size_t SpatialGrid::size() const {
    std::size_t n = 1;
    for (const auto& a : axes_) n *= a.n_points;
    return n;
}

double SpatialGrid::weight() const {
    double w = 1.0;
    for (const auto& a : axes_) w *= a.spacing;
    return w;
}

Point SpatialGrid::point(std::size_t flat) const {
    if (axes_.size() == 1) return {axes_[0].point(flat), 0.0};
    const std::size_t n2 = axes_[1].n_points;
    return {axes_[0].point(flat / n2), axes_[1].point(flat % n2)};
}

std::vector<Point> SpatialGrid::points() const {
    std::vector<Point> out(size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = point(j);
    return out;
}

SpatialGrid make_grid(std::size_t n_points, double x_min, double spacing) {
    return SpatialGrid::line(n_points, x_min, spacing);
}

WaveState::WaveState(SpatialGrid grid, ComplexVector amplitudes)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != grid_.size()) {
        throw PreconditionError("amplitude vector length does not match grid size");
    }
}

double WaveState::norm() const {
    return std::sqrt(grid_.weight() * amplitudes_.squaredNorm());
}

bool WaveState::is_normalized(double tolerance) const {
    return std::abs(norm() - 1.0) < tolerance;
}

WaveState WaveState::normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw PreconditionError("cannot normalize a zero state");
    WaveState out(grid_, amplitudes_ / n);
    out.resolution_warning_ = resolution_warning_;
    return out;
}

Complex inner(const WaveState& a, const WaveState& b) {
    require_same_grid(a, b);
    return a.grid().weight() * a.amplitudes().dot(b.amplitudes());
}

Point expect_x(const WaveState& psi) {
    require_normalized(psi);
    const auto& grid = psi.grid();
    const auto& amp = psi.amplitudes();
    Point mean{0.0, 0.0};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double density = std::norm(amp[static_cast<Eigen::Index>(j)]);
        const Point x = grid.point(j);
        for (int d = 0; d < grid.dimension(); ++d) mean[d] += x[d] * density;
    }
    for (double& m : mean) m *= grid.weight();
    return mean;
}

Point spread_x(const WaveState& psi) {
    const Point mean = expect_x(psi);
    const auto& grid = psi.grid();
    const auto& amp = psi.amplitudes();
    Point var{0.0, 0.0};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double density = std::norm(amp[static_cast<Eigen::Index>(j)]);
        const Point x = grid.point(j);
        for (int d = 0; d < grid.dimension(); ++d) var[d] += (x[d] - mean[d]) * (x[d] - mean[d]) * density;
    }
    return {std::sqrt(var[0] * grid.weight()), std::sqrt(var[1] * grid.weight())};
}

ComplexVector apply_momentum(const WaveState& psi, int axis, double hbar) {
    const auto& grid = psi.grid();
    if (axis < 0 || axis >= grid.dimension()) throw PreconditionError("momentum axis out of range");
    const auto& amp = psi.amplitudes();
    const Complex factor(0.0, -hbar / (2.0 * grid.axis(axis).spacing));
    ComplexVector out(amp.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto up = static_cast<Eigen::Index>(neighbour(grid, j, axis, +1));
        const auto down = static_cast<Eigen::Index>(neighbour(grid, j, axis, -1));
        out[static_cast<Eigen::Index>(j)] = factor * (amp[up] - amp[down]);
    }
    return out;
}

ComplexMatrix momentum_matrix(const SpatialGrid& grid, int axis, double hbar) {
    if (axis < 0 || axis >= grid.dimension()) throw PreconditionError("momentum axis out of range");
    const auto n = static_cast<Eigen::Index>(grid.size());
    const Complex factor(0.0, -hbar / (2.0 * grid.axis(axis).spacing));
    ComplexMatrix p = ComplexMatrix::Zero(n, n);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto row = static_cast<Eigen::Index>(j);
        p(row, static_cast<Eigen::Index>(neighbour(grid, j, axis, +1))) += factor;
        p(row, static_cast<Eigen::Index>(neighbour(grid, j, axis, -1))) -= factor;
    }
    return p;
}

Point expect_p(const WaveState& psi, double hbar) {
    Point mean{0.0, 0.0};
    for (int d = 0; d < psi.grid().dimension(); ++d) {
        const ComplexVector p_psi = apply_momentum(psi, d, hbar);
        mean[d] = (psi.grid().weight() * psi.amplitudes().dot(p_psi)).real();
    }
    return mean;
}

Point spread_p(const WaveState& psi, double hbar) {
    const Point mean = expect_p(psi, hbar);
    Point out{0.0, 0.0};
    for (int d = 0; d < psi.grid().dimension(); ++d) {
        const ComplexVector p_psi = apply_momentum(psi, d, hbar);
        const double second = psi.grid().weight() * p_psi.squaredNorm();
        out[d] = std::sqrt(std::max(0.0, second - mean[d] * mean[d]));
    }
    return out;
}

WaveState make_gaussian(const SpatialGrid& grid, const Point& x0, const Point& p0, double alpha,
                        double hbar) {
    if (!(alpha > 0.0) || !(hbar > 0.0)) {
        throw PreconditionError("packet needs alpha > 0 and hbar > 0");
    }
    const double sigma = alpha * std::sqrt(hbar / 2.0);
    bool warn = false;
    for (int d = 0; d < grid.dimension(); ++d) {
        const Axis& a = grid.axis(d);
        if (sigma < 2.0 * a.spacing || sigma > a.extent() / 8.0) warn = true;
    }
    ComplexVector amp(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const Point x = grid.point(j);
        double envelope = 0.0;
        double phase = 0.0;
        for (int d = 0; d < grid.dimension(); ++d) {
            envelope -= (x[d] - x0[d]) * (x[d] - x0[d]) / (4.0 * sigma * sigma);
            phase += p0[d] * x[d] / hbar;
        }
        amp[static_cast<Eigen::Index>(j)] = std::polar(std::exp(envelope), phase);
    }
    WaveState psi = WaveState(grid, std::move(amp)).normalized();
    psi.set_resolution_warning(warn);
    return psi;
}

WaveState apply_gauge_phase(const WaveState& psi, std::span<const double> phi, double hbar) {
    if (phi.size() != psi.grid().size()) {
        throw PreconditionError("gauge field length does not match grid size");
    }
    ComplexVector amp = psi.amplitudes();
    for (std::size_t j = 0; j < phi.size(); ++j) {
        if (!std::isfinite(phi[j])) throw PreconditionError("gauge field is not finite");
        amp[static_cast<Eigen::Index>(j)] *= std::polar(1.0, -phi[j] / hbar);
    }
    WaveState out(psi.grid(), std::move(amp));
    out.set_resolution_warning(psi.resolution_warning());
    return out;
}

}  // namespace dtqm
