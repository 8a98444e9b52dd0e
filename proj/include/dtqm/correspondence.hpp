#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dtqm/classical.hpp"
#include "dtqm/functions.hpp"
#include "dtqm/grid.hpp"
#include "dtqm/propagator.hpp"

namespace dtqm {

struct PacketParams {
    Point x0{0.0, 0.0};
    Point p0{0.0, 0.0};
    double alpha = 1.0;
};

struct Observables {
    Point mean_x{0.0, 0.0};
    Point mean_p{0.0, 0.0};
    Point spread_x{0.0, 0.0};
    double norm = 0.0;
};

struct EhrenfestOptions {
    AmplitudeMode mode = AmplitudeMode::analytic;
    // Accept a time step other than the grid's exact-unitary step.
    bool allow_any_time_step = false;
    // Half-width of the packet envelope in units of its position spread.
    double envelope_sigmas = 5.0;
    // Skip the envelope test. The kernel is periodic, so norms stay exact,
    // but means lose their meaning once the packet wraps around.
    bool check_boundary = true;
    SolverSettings solver;
};

struct EhrenfestRun {
    double tau = 0.0;
    double unitarity_deviation = 0.0;
    std::vector<Observables> quantum;
    // Classical trajectory seeded with (x0, x_prev) where x_prev reproduces p0.
    ClassicalTrajectory classical;
    Point seed_previous{0.0, 0.0};

    // max_n |<x>_n - x_n| and max_n |<p>_n - p_n| over dimensions.
    double max_position_deviation() const;
    double max_momentum_deviation() const;
    double max_norm_drift() const;
};

// The packet's envelope left the grid.
class BoundaryError : public PreconditionError {
public:
    BoundaryError(const std::string& what, std::size_t step) : PreconditionError(what), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

bool nearly_magic(const SpatialGrid& grid, const PhysicalConstants& constants);

// Evolves a Gaussian packet with the model's kernel and records observables at
// every step next to the classical trajectory with matching initial data.
EhrenfestRun ehrenfest_run(const ActionModel& model, const SpatialGrid& grid, const PacketParams& packet,
                           std::size_t n_steps, const EhrenfestOptions& options = {});

struct SweepSpec {
    Potential potential = Potential::zero();
    double mass = 1.0;
    double tau = 0.2;
    // Grid extent aimed for; every hbar gets N = even(L^2 m / (2 pi hbar tau)).
    double target_extent = 12.0;
    std::vector<double> hbar_values;
    PacketParams packet;
    std::size_t n_steps = 40;
    // 0 runs sequentially.
    unsigned threads = 0;
};

struct SweepPoint {
    double hbar = 0.0;
    std::size_t n_points = 0;
    double spacing = 0.0;
    std::optional<double> max_deviation;
    std::optional<std::string> error;
};

struct CorrespondenceReport {
    std::vector<double> hbar_values;
    std::vector<SweepPoint> points;
    bool monotone = false;
    // Per-step |<x>_n - x_n| for the smallest hbar that ran.
    std::vector<double> finest_series;
    ClassicalTrajectory classical;
};

// Grid with exactly tau = tau* for the given hbar, centred on the origin.
SpatialGrid sweep_grid(const SweepSpec& spec, double hbar);

// Runs ehrenfest_run for every hbar (descending) against the hbar-independent
// classical trajectory. Needs at least three hbar values.
CorrespondenceReport hbar_sweep(const SweepSpec& spec);

struct GaugeComparison {
    // max over steps and sites of | |psi_A|^2 - |psi_B|^2 |
    double max_density_discrepancy = 0.0;
    // max over steps of |x_A - x_B| for the classical trajectories.
    double max_classical_difference = 0.0;
};

// Run A: standard action from psi. Run B: gauged action from
// apply_gauge_phase(psi, -phi), the state matching the factorization
// U_gauged = Phi U Phi^dagger, Phi = diag(exp(i phi / hbar)).
GaugeComparison gauge_equivalence_run(const PhysicalConstants& constants, const SpatialGrid& grid,
                                      const Potential& potential, const GaugeFunction& phi,
                                      const PacketParams& packet, std::size_t n_steps);

}  // namespace dtqm
