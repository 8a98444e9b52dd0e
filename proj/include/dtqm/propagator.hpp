#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dtqm/action.hpp"
#include "dtqm/errors.hpp"
#include "dtqm/grid.hpp"

namespace dtqm {

enum class AmplitudeMode {
    // A = exp(-i pi d/4) (m / (2 pi hbar tau))^(d/2); standard/gauged actions only.
    analytic,
    // |A| minimizes the unitarity deviation inside +-50% of a reference value.
    calibrated,
    // |A| = 1 / sqrt(w * N), which makes every diagonal entry of U U^dagger one.
    unit_diagonal,
};

std::string to_string(AmplitudeMode mode);
AmplitudeMode amplitude_mode_from_string(const std::string& name);

// Time step at which the free kinetic phase m (x_j - x_k)^2 / (2 hbar tau)
// equals pi (j - k)^2 / N, so the free kernel is an exact finite unitary
// (quadratic Gauss sum): tau* = m dx L / (2 pi hbar).
double magic_time_step(const SpatialGrid& grid, double mass, double hbar);

// Max-row-sum norm of U U^dagger - I.
double unitarity_deviation(const ComplexMatrix& u);

class CalibrationError : public NumericalError {
public:
    CalibrationError(const std::string& what, std::vector<std::pair<double, double>> scanned)
        : NumericalError(what), scanned_(std::move(scanned)) {}
    // (|A|, deviation) pairs visited during the search.
    const std::vector<std::pair<double, double>>& scanned() const { return scanned_; }

private:
    std::vector<std::pair<double, double>> scanned_;
};

// Single-step kernel U_jk = w A exp(i S(x_j, x_k) / hbar), w the quadrature
// weight. Immutable after construction.
class PropagatorKernel {
public:
    const SpatialGrid& grid() const { return grid_; }
    const ActionModel& model() const { return model_; }
    Complex amplitude() const { return amplitude_; }
    AmplitudeMode mode() const { return mode_; }
    const ComplexMatrix& matrix() const { return matrix_; }
    double unitarity_deviation() const { return deviation_; }

    // Kernel of the same grid with matrix replaced by its conjugate transpose.
    PropagatorKernel adjoint() const;

private:
    friend PropagatorKernel build_kernel(const SpatialGrid&, const ActionModel&, AmplitudeMode);
    PropagatorKernel(SpatialGrid grid, ActionModel model, Complex amplitude, AmplitudeMode mode,
                     ComplexMatrix matrix);

    SpatialGrid grid_;
    ActionModel model_;
    Complex amplitude_;
    AmplitudeMode mode_;
    ComplexMatrix matrix_;
    double deviation_;
};

// Dense size limits: 1024 sites in 1D, 48 per axis in 2D.
inline constexpr std::size_t kMaxSites1D = 1024;
inline constexpr std::size_t kMaxSitesPerAxis2D = 48;

PropagatorKernel build_kernel(const SpatialGrid& grid, const ActionModel& model, AmplitudeMode mode);

// psi' = U psi.
WaveState evolve(const PropagatorKernel& kernel, const WaveState& psi);

// Brute-force k-step path sum (k = 1..3) between two lattice sites:
//   w^k A^k sum over intermediate sites of exp(i sum_n S(x_{n+1}, x_n) / hbar),
// i.e. the (final, initial) entry of the k-th matrix power, computed from the
// additive action rather than from matrix products. Needs at most 64 sites.
Complex multi_step_pathsum(const PropagatorKernel& kernel, int k_steps, std::size_t initial_index,
                           std::size_t final_index);

// D_jk = sum_l conj(U_lj) dS/dy_axis(x_l, x_k) U_lk, the lattice form of
// <x'| dS(x_up, x'')/dx'' |x''>.
ComplexMatrix momentum_identity_operator(const PropagatorKernel& kernel, int axis);

// ||D psi + sign P psi|| / ||P psi|| summed over axes, with P the
// central-difference momentum. sign = +1 tests D = -P; sign = -1 is the
// flipped probe.
double momentum_identity_residual(const PropagatorKernel& kernel, const WaveState& psi,
                                  double sign = 1.0);

}  // namespace dtqm
