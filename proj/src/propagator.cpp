#include "dtqm/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dtqm {

namespace {

// exp(-i pi d / 4), the stationary-phase factor of the free propagator.
Complex amplitude_phase(int dimension) { return std::polar(1.0, -kPi * dimension / 4.0); }

void check_size(const SpatialGrid& grid) {
    if (grid.dimension() == 1 && grid.size() > kMaxSites1D) {
        throw PreconditionError("dense kernel limited to 1024 sites in 1D");
    }
    if (grid.dimension() == 2 && (grid.axis(0).n_points > kMaxSitesPerAxis2D ||
                                  grid.axis(1).n_points > kMaxSitesPerAxis2D)) {
        throw PreconditionError("dense kernel limited to 48 sites per axis in 2D");
    }
}

// G_jk = exp(i S(x_j, x_k) / hbar)
ComplexMatrix phase_matrix(const SpatialGrid& grid, const ActionModel& model) {
    const auto points = grid.points();
    const auto n = static_cast<Eigen::Index>(points.size());
    const double hbar = model.constants().hbar;
    ComplexMatrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double s = model.value(points[static_cast<std::size_t>(j)], points[static_cast<std::size_t>(k)]);
            g(j, k) = std::polar(1.0, s / hbar);
        }
    }
    return g;
}

// (m / (2 pi hbar tau))^(d/2)
double analytic_magnitude(const ActionModel& model) {
    const auto& c = model.constants();
    return std::pow(c.mass / (2.0 * kPi * c.hbar * c.time_step), 0.5 * model.dimension());
}

double unit_diagonal_magnitude(const SpatialGrid& grid) {
    return 1.0 / (grid.weight() * std::sqrt(static_cast<double>(grid.size())));
}

// Deviation of a * M - I in max-row-sum norm, M = G G^dagger.
double scaled_deviation(const ComplexMatrix& gram, double a) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < gram.rows(); ++j) {
        double row = 0.0;
        for (Eigen::Index l = 0; l < gram.cols(); ++l) {
            row += std::abs(a * gram(j, l) - (j == l ? 1.0 : 0.0));
        }
        worst = std::max(worst, row);
    }
    return worst;
}

// Golden-section search for |A| on [0.5, 1.5] * reference.
double calibrate_magnitude(const SpatialGrid& grid, const ComplexMatrix& phases, double reference) {
    const ComplexMatrix gram = phases * phases.adjoint();
    const double w2 = grid.weight() * grid.weight();
    std::vector<std::pair<double, double>> scanned;
    auto deviation = [&](double magnitude) {
        const double d = scaled_deviation(gram, w2 * magnitude * magnitude);
        scanned.emplace_back(magnitude, d);
        return d;
    };

    const double lo = 0.5 * reference;
    const double hi = 1.5 * reference;
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = deviation(c);
    double fd = deviation(d);
    while (b - a > 1e-12 * reference) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = deviation(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = deviation(d);
        }
    }
    const double best = 0.5 * (a + b);
    const double edge_margin = 1e-6 * reference;
    if (best - lo < edge_margin || hi - best < edge_margin) {
        std::ostringstream os;
        os << "amplitude calibration found no interior minimum in [" << lo << ", " << hi
           << "]; minimum at |A| = " << best;
        throw CalibrationError(os.str(), std::move(scanned));
    }
    return best;
}

void require_same_grid(const PropagatorKernel& kernel, const WaveState& psi) {
    if (!(kernel.grid() == psi.grid())) throw PreconditionError("state and kernel grids differ");
}

}  // namespace

std::string to_string(AmplitudeMode mode) {
    switch (mode) {
        case AmplitudeMode::analytic: return "analytic";
        case AmplitudeMode::calibrated: return "calibrated";
        case AmplitudeMode::unit_diagonal: return "unit_diagonal";
    }
    return "unknown";
}

AmplitudeMode amplitude_mode_from_string(const std::string& name) {
    if (name == "analytic") return AmplitudeMode::analytic;
    if (name == "calibrated") return AmplitudeMode::calibrated;
    if (name == "unit_diagonal") return AmplitudeMode::unit_diagonal;
    throw PreconditionError("unknown amplitude mode '" + name + "'");
}

double magic_time_step(const SpatialGrid& grid, double mass, double hbar) {
    if (!(mass > 0.0) || !(hbar > 0.0)) throw PreconditionError("mass and hbar must be positive");
    if (grid.dimension() == 2) {
        const double first = grid.axis(0).spacing * grid.axis(0).extent();
        const double second = grid.axis(1).spacing * grid.axis(1).extent();
        if (std::abs(first - second) > 1e-12 * first) {
            throw PreconditionError("magic time step needs equal dx * L on both axes");
        }
    }
    return mass * grid.spacing() * grid.extent() / (2.0 * kPi * hbar);
}

double unitarity_deviation(const ComplexMatrix& u) {
    const ComplexMatrix product = u * u.adjoint();
    return scaled_deviation(product, 1.0);
}

PropagatorKernel::PropagatorKernel(SpatialGrid grid, ActionModel model, Complex amplitude,
                                   AmplitudeMode mode, ComplexMatrix matrix)
    : grid_(std::move(grid)),
      model_(std::move(model)),
      amplitude_(amplitude),
      mode_(mode),
      matrix_(std::move(matrix)),
      deviation_(dtqm::unitarity_deviation(matrix_)) {}

PropagatorKernel PropagatorKernel::adjoint() const {
    PropagatorKernel out = *this;
    out.matrix_ = matrix_.adjoint();
    out.amplitude_ = std::conj(amplitude_);
    return out;
}

PropagatorKernel build_kernel(const SpatialGrid& grid, const ActionModel& model, AmplitudeMode mode) {
    if (grid.dimension() != model.dimension()) {
        throw PreconditionError("grid and action dimensions differ");
    }
    check_size(grid);
    const ComplexMatrix phases = phase_matrix(grid, model);

    double magnitude = 0.0;
    switch (mode) {
        case AmplitudeMode::analytic:
            if (!model.is_standard_family()) {
                throw PreconditionError("analytic amplitude needs a standard or gauged action, got " +
                                        to_string(model.kind()));
            }
            magnitude = analytic_magnitude(model);
            break;
        case AmplitudeMode::calibrated: {
            const double reference =
                model.is_standard_family() ? analytic_magnitude(model) : unit_diagonal_magnitude(grid);
            magnitude = calibrate_magnitude(grid, phases, reference);
            break;
        }
        case AmplitudeMode::unit_diagonal: magnitude = unit_diagonal_magnitude(grid); break;
    }

    const Complex amplitude = magnitude * amplitude_phase(grid.dimension());
    ComplexMatrix matrix = (grid.weight() * amplitude) * phases;
    return PropagatorKernel(grid, model, amplitude, mode, std::move(matrix));
}

WaveState evolve(const PropagatorKernel& kernel, const WaveState& psi) {
    require_same_grid(kernel, psi);
    return WaveState(psi.grid(), kernel.matrix() * psi.amplitudes());
}

Complex multi_step_pathsum(const PropagatorKernel& kernel, int k_steps, std::size_t initial_index,
                           std::size_t final_index) {
    const auto& grid = kernel.grid();
    if (k_steps < 1 || k_steps > 3) throw PreconditionError("path sum supports 1 to 3 steps");
    if (grid.size() > 64 && k_steps > 1) throw PreconditionError("path sum limited to 64 sites");
    if (initial_index >= grid.size() || final_index >= grid.size()) {
        throw PreconditionError("path endpoint outside the grid");
    }

    const auto& model = kernel.model();
    const double hbar = model.constants().hbar;
    const auto points = grid.points();
    const Point& start = points[initial_index];
    const Point& end = points[final_index];
    const std::size_t n = points.size();

    Complex sum(0.0, 0.0);
    if (k_steps == 1) {
        sum = std::polar(1.0, model.value(end, start) / hbar);
    } else if (k_steps == 2) {
        for (std::size_t l = 0; l < n; ++l) {
            const double action = model.value(end, points[l]) + model.value(points[l], start);
            sum += std::polar(1.0, action / hbar);
        }
    } else {
        for (std::size_t l1 = 0; l1 < n; ++l1) {
            const double first = model.value(points[l1], start);
            for (std::size_t l2 = 0; l2 < n; ++l2) {
                const double action = model.value(end, points[l2]) + model.value(points[l2], points[l1]) + first;
                sum += std::polar(1.0, action / hbar);
            }
        }
    }
    const Complex scale = grid.weight() * kernel.amplitude();
    Complex factor = scale;
    for (int k = 1; k < k_steps; ++k) factor *= scale;
    return factor * sum;
}

ComplexMatrix momentum_identity_operator(const PropagatorKernel& kernel, int axis) {
    const auto& grid = kernel.grid();
    if (axis < 0 || axis >= grid.dimension()) throw PreconditionError("axis out of range");
    const auto points = grid.points();
    const auto n = static_cast<Eigen::Index>(points.size());
    const auto& model = kernel.model();
    const ComplexMatrix& u = kernel.matrix();

    // weighted(l, k) = dS/dy(x_l, x_k) U_lk
    ComplexMatrix weighted(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const Point g = model.grad_y(points[static_cast<std::size_t>(l)], points[static_cast<std::size_t>(k)]);
            weighted(l, k) = g[static_cast<std::size_t>(axis)] * u(l, k);
        }
    }
    return u.adjoint() * weighted;
}

double momentum_identity_residual(const PropagatorKernel& kernel, const WaveState& psi, double sign) {
    require_same_grid(kernel, psi);
    const double hbar = kernel.model().constants().hbar;
    double numerator = 0.0;
    double denominator = 0.0;
    for (int d = 0; d < psi.grid().dimension(); ++d) {
        const ComplexVector p_psi = apply_momentum(psi, d, hbar);
        const ComplexVector d_psi = momentum_identity_operator(kernel, d) * psi.amplitudes();
        numerator += (d_psi + sign * p_psi).squaredNorm();
        denominator += p_psi.squaredNorm();
    }
    if (!(denominator > 0.0)) throw PreconditionError("test state has no momentum content");
    return std::sqrt(numerator / denominator);
}

}  // namespace dtqm
