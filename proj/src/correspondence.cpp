#include "dtqm/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace dtqm {

namespace {

Observables observe(const WaveState& psi, double hbar) {
    Observables obs;
    obs.norm = psi.norm();
    const WaveState unit = psi.normalized();
    obs.mean_x = expect_x(unit);
    obs.mean_p = expect_p(unit, hbar);
    obs.spread_x = spread_x(unit);
    return obs;
}

void check_envelope(const SpatialGrid& grid, const Point& centre, const Point& half_width,
                    std::size_t step) {
    for (int d = 0; d < grid.dimension(); ++d) {
        const Axis& a = grid.axis(d);
        if (centre[d] - half_width[d] < a.x_min || centre[d] + half_width[d] > a.x_max()) {
            std::ostringstream os;
            os << "packet envelope reaches the grid boundary at step " << step << " (axis " << d
               << ", centre " << centre[d] << ", half-width " << half_width[d] << ")";
            throw BoundaryError(os.str(), step);
        }
    }
}

}  // namespace

bool nearly_magic(const SpatialGrid& grid, const PhysicalConstants& constants) {
    const double magic = magic_time_step(grid, constants.mass, constants.hbar);
    return std::abs(constants.time_step - magic) <= 1e-9 * magic;
}

double EhrenfestRun::max_position_deviation() const {
    double worst = 0.0;
    const std::size_t n = std::min(quantum.size(), classical.positions.size());
    for (std::size_t k = 0; k < n; ++k)
        for (int d = 0; d < classical.dimension; ++d)
            worst = std::max(worst, std::abs(quantum[k].mean_x[d] - classical.positions[k][d]));
    return worst;
}

double EhrenfestRun::max_momentum_deviation() const {
    double worst = 0.0;
    const std::size_t n = std::min(quantum.size(), classical.momenta.size());
    for (std::size_t k = 0; k < n; ++k)
        for (int d = 0; d < classical.dimension; ++d)
            worst = std::max(worst, std::abs(quantum[k].mean_p[d] - classical.momenta[k][d]));
    return worst;
}

double EhrenfestRun::max_norm_drift() const {
    double worst = 0.0;
    for (const auto& obs : quantum) worst = std::max(worst, std::abs(obs.norm - quantum.front().norm));
    return worst;
}

EhrenfestRun ehrenfest_run(const ActionModel& model, const SpatialGrid& grid, const PacketParams& packet,
                           std::size_t n_steps, const EhrenfestOptions& options) {
    const auto& constants = model.constants();
    if (!options.allow_any_time_step && !nearly_magic(grid, constants)) {
        throw PreconditionError("ehrenfest_run expects tau = tau* for this grid");
    }
    const int dim = grid.dimension();
    const double sigma = packet.alpha * std::sqrt(constants.hbar / 2.0);

    EhrenfestRun out;
    out.tau = constants.time_step;
    out.seed_previous = previous_from_momentum(model, packet.x0, packet.p0, options.solver);
    if (n_steps > 0) {
        out.classical = integrate(model, packet.x0, out.seed_previous, n_steps, options.solver);
    } else {
        out.classical.dimension = dim;
        out.classical.times = {0};
        out.classical.positions = {packet.x0};
        out.classical.momenta = {momentum_from_pair(model, packet.x0, out.seed_previous)};
        out.classical.residuals = {0.0};
    }

    // Up-front estimate: classical excursion plus the initial envelope.
    const Point initial_width{options.envelope_sigmas * sigma, options.envelope_sigmas * sigma};
    for (std::size_t k = 0; options.check_boundary && k < out.classical.positions.size(); ++k) {
        check_envelope(grid, out.classical.positions[k], initial_width, k);
    }

    const PropagatorKernel kernel = build_kernel(grid, model, options.mode);
    out.unitarity_deviation = kernel.unitarity_deviation();

    WaveState psi = make_gaussian(grid, packet.x0, packet.p0, packet.alpha, constants.hbar);
    out.quantum.reserve(n_steps + 1);
    for (std::size_t n = 0;; ++n) {
        const Observables obs = observe(psi, constants.hbar);
        if (options.check_boundary) {
            check_envelope(grid, obs.mean_x,
                           {options.envelope_sigmas * obs.spread_x[0], options.envelope_sigmas * obs.spread_x[1]}, n);
        }
        out.quantum.push_back(obs);
        if (n == n_steps) break;
        psi = evolve(kernel, psi);
    }
    return out;
}

SpatialGrid sweep_grid(const SweepSpec& spec, double hbar) {
    const double target = spec.target_extent * spec.target_extent * spec.mass / (2.0 * kPi * hbar * spec.tau);
    auto n = static_cast<std::size_t>(2.0 * std::round(target / 2.0));
    n = std::max<std::size_t>(n, 4);
    const double spacing = std::sqrt(2.0 * kPi * hbar * spec.tau / (spec.mass * static_cast<double>(n)));
    const double extent = spacing * static_cast<double>(n);
    return make_grid(n, -0.5 * extent, spacing);
}

CorrespondenceReport hbar_sweep(const SweepSpec& spec) {
    if (spec.hbar_values.size() < 3) throw PreconditionError("hbar sweep needs at least three hbar values");
    for (std::size_t k = 0; k < spec.hbar_values.size(); ++k) {
        if (!(spec.hbar_values[k] > 0.0)) throw PreconditionError("hbar values must be positive");
        if (k > 0 && !(spec.hbar_values[k] < spec.hbar_values[k - 1])) {
            throw PreconditionError("hbar values must be strictly descending");
        }
    }

    CorrespondenceReport report;
    report.hbar_values = spec.hbar_values;
    report.points.resize(spec.hbar_values.size());
    std::vector<std::vector<double>> series(spec.hbar_values.size());

    // Classical reference is hbar-independent; the solver's search radius is
    // the only hbar-dependent piece, so use the largest hbar.
    {
        const auto model = standard_action(
            PhysicalConstants::make(spec.mass, spec.tau, spec.hbar_values.front()), spec.potential);
        const Point previous = previous_from_momentum(model, spec.packet.x0, spec.packet.p0);
        report.classical = integrate(model, spec.packet.x0, previous, std::max<std::size_t>(spec.n_steps, 1));
    }

    auto run_one = [&](std::size_t k) {
        const double hbar = spec.hbar_values[k];
        SweepPoint& point = report.points[k];
        point.hbar = hbar;
        try {
            const SpatialGrid grid = sweep_grid(spec, hbar);
            point.n_points = grid.size();
            point.spacing = grid.spacing();
            const auto constants = PhysicalConstants::make(spec.mass, magic_time_step(grid, spec.mass, hbar), hbar);
            const auto model = standard_action(constants, spec.potential);
            const EhrenfestRun run = ehrenfest_run(model, grid, spec.packet, spec.n_steps);
            std::vector<double> dev;
            dev.reserve(run.quantum.size());
            for (std::size_t n = 0; n < run.quantum.size(); ++n) {
                dev.push_back(std::abs(run.quantum[n].mean_x[0] - report.classical.positions[n][0]));
            }
            point.max_deviation = *std::max_element(dev.begin(), dev.end());
            series[k] = std::move(dev);
        } catch (const std::exception& e) {
            point.error = e.what();
        }
    };

    const std::size_t count = spec.hbar_values.size();
    if (spec.threads <= 1) {
        for (std::size_t k = 0; k < count; ++k) run_one(k);
    } else {
        std::vector<std::thread> workers;
        std::mutex next_mutex;
        std::size_t next = 0;
        const unsigned n_workers = std::min<unsigned>(spec.threads, static_cast<unsigned>(count));
        for (unsigned w = 0; w < n_workers; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    std::size_t k = 0;
                    {
                        std::lock_guard<std::mutex> lock(next_mutex);
                        if (next >= count) return;
                        k = next++;
                    }
                    run_one(k);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    report.monotone = true;
    std::optional<double> previous;
    for (const auto& point : report.points) {
        if (!point.max_deviation) {
            report.monotone = false;
            continue;
        }
        if (previous && *point.max_deviation > *previous + 1e-6) report.monotone = false;
        previous = point.max_deviation;
    }
    for (std::size_t k = count; k-- > 0;) {
        if (!series[k].empty()) {
            report.finest_series = series[k];
            break;
        }
    }
    return report;
}

GaugeComparison gauge_equivalence_run(const PhysicalConstants& constants, const SpatialGrid& grid,
                                      const Potential& potential, const GaugeFunction& phi,
                                      const PacketParams& packet, std::size_t n_steps) {
    if (grid.dimension() != 1) throw PreconditionError("gauge comparison is one-dimensional");
    const auto plain = standard_action(constants, potential);
    const auto gauged = gauged_action(constants, potential, phi);
    const PropagatorKernel kernel_a = build_kernel(grid, plain, AmplitudeMode::analytic);
    const PropagatorKernel kernel_b = build_kernel(grid, gauged, AmplitudeMode::analytic);

    std::vector<double> minus_phi(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) minus_phi[j] = -phi.value(grid.point(j)[0]);

    WaveState psi_a = make_gaussian(grid, packet.x0, packet.p0, packet.alpha, constants.hbar);
    WaveState psi_b = apply_gauge_phase(psi_a, minus_phi, constants.hbar);

    GaugeComparison out;
    for (std::size_t n = 0;; ++n) {
        const auto& a = psi_a.amplitudes();
        const auto& b = psi_b.amplitudes();
        for (Eigen::Index j = 0; j < a.size(); ++j) {
            out.max_density_discrepancy = std::max(out.max_density_discrepancy, std::abs(std::norm(a[j]) - std::norm(b[j])));
        }
        if (n == n_steps) break;
        psi_a = evolve(kernel_a, psi_a);
        psi_b = evolve(kernel_b, psi_b);
    }

    if (n_steps > 0) {
        const Point previous = previous_from_momentum(plain, packet.x0, packet.p0);
        const auto traj_a = integrate(plain, packet.x0, previous, n_steps);
        const auto traj_b = integrate(gauged, packet.x0, previous, n_steps);
        const std::size_t n = std::min(traj_a.positions.size(), traj_b.positions.size());
        for (std::size_t k = 0; k < n; ++k) {
            out.max_classical_difference =
                std::max(out.max_classical_difference, std::abs(traj_a.positions[k][0] - traj_b.positions[k][0]));
        }
    }
    return out;
}

}  // namespace dtqm
