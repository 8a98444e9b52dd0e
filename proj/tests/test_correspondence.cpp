#include <gtest/gtest.h>

#include <cmath>

#include "dtqm/correspondence.hpp"
#include "dtqm/errors.hpp"

using namespace dtqm;

namespace {

struct Setup {
    SpatialGrid grid;
    PhysicalConstants constants;
};

Setup magic(std::size_t n, double dx, double hbar = 1.0) {
    const auto grid = make_grid(n, -0.5 * static_cast<double>(n) * dx, dx);
    return {grid, PhysicalConstants::make(1.0, magic_time_step(grid, 1.0, hbar), hbar)};
}

}  // namespace

TEST(Correspondence, StationaryFreePacket) {
    // The packet spreads freely, so the run is kept short enough to stay on the grid.
    const auto s = magic(512, 0.05);
    const auto run = ehrenfest_run(standard_action(s.constants, Potential::zero()), s.grid, {{0.0, 0}, {0.0, 0}, 1.0}, 10);
    ASSERT_EQ(run.quantum.size(), 11u);
    for (const auto& obs : run.quantum) EXPECT_NEAR(obs.mean_x[0], 0.0, 1e-9);
    EXPECT_LT(run.max_position_deviation(), 1e-9);
    EXPECT_EQ(run.classical.status, TrajectoryStatus::complete);
}

TEST(Correspondence, HarmonicEhrenfestTracking) {
    const auto s = magic(256, 0.04);
    const auto model = standard_action(s.constants, Potential::harmonic(1.0, 1.0));
    const auto run = ehrenfest_run(model, s.grid, {{1.0, 0}, {0.5, 0}, 1.0}, 50);
    EXPECT_LT(run.max_position_deviation(), 1e-3);
    EXPECT_LT(run.max_momentum_deviation(), 1e-3);
    EXPECT_LT(run.max_norm_drift(), 10.0 * std::max(run.unitarity_deviation, 1e-15) + 1e-12);
    // Seed reproduces the requested momentum.
    EXPECT_NEAR(momentum_from_pair(model, {1.0, 0}, run.seed_previous)[0], 0.5, 1e-9);
    EXPECT_NEAR(run.classical.momenta.front()[0], 0.5, 1e-9);
    ASSERT_EQ(run.classical.positions.size(), run.quantum.size());
}

TEST(Correspondence, RequiresMagicStepUnlessOverridden) {
    const auto s = magic(128, 0.125);
    const auto off = standard_action(s.constants.with_time_step(0.9 * s.constants.time_step), Potential::zero());
    EXPECT_FALSE(nearly_magic(s.grid, off.constants()));
    EXPECT_TRUE(nearly_magic(s.grid, s.constants));
    EXPECT_THROW(ehrenfest_run(off, s.grid, {}, 5), PreconditionError);
    EhrenfestOptions opts;
    opts.allow_any_time_step = true;
    opts.mode = AmplitudeMode::unit_diagonal;
    const auto run = ehrenfest_run(off, s.grid, {}, 5, opts);
    EXPECT_GT(run.unitarity_deviation, 1e-8);
}

TEST(Correspondence, BoundaryViolationReportsStep) {
    const auto s = magic(64, 0.125);
    // A fast packet leaves [-4, 4) well before 100 steps.
    try {
        ehrenfest_run(standard_action(s.constants, Potential::zero()), s.grid, {{0.0, 0}, {1.5, 0}, 1.0}, 100);
        FAIL() << "expected BoundaryError";
    } catch (const BoundaryError& e) {
        EXPECT_GT(e.step(), 0u);
        EXPECT_LT(e.step(), 100u);
    }
    // Starting against the wall fails immediately.
    try {
        ehrenfest_run(standard_action(s.constants, Potential::zero()), s.grid, {{3.5, 0}, {0.0, 0}, 1.0}, 5);
        FAIL() << "expected BoundaryError";
    } catch (const BoundaryError& e) {
        EXPECT_EQ(e.step(), 0u);
    }
}

TEST(Correspondence, SweepGridIsMagic) {
    SweepSpec spec;
    spec.tau = 0.2;
    spec.target_extent = 12.0;
    for (double hbar : {1.0, 0.5, 0.25, 0.125}) {
        const auto g = sweep_grid(spec, hbar);
        EXPECT_EQ(g.size() % 2, 0u);
        EXPECT_NEAR(magic_time_step(g, 1.0, hbar), 0.2, 1e-12);
        EXPECT_NEAR(g.extent(), 12.0, 1.0);
        EXPECT_NEAR(g.axis(0).x_min + 0.5 * g.extent(), 0.0, 1e-12);
    }
}

TEST(Correspondence, QuarticSweepIsMonotone) {
    SweepSpec spec;
    spec.potential = Potential::quartic(0.1);
    spec.hbar_values = {1.0, 0.5, 0.25, 0.125};
    spec.packet = {{1.0, 0}, {0.0, 0}, 1.0};
    const auto report = hbar_sweep(spec);
    ASSERT_EQ(report.points.size(), 4u);
    for (const auto& p : report.points) {
        ASSERT_FALSE(p.error.has_value()) << *p.error;
        ASSERT_TRUE(p.max_deviation.has_value());
        EXPECT_GE(*p.max_deviation, 0.0);
    }
    EXPECT_TRUE(report.monotone);
    EXPECT_EQ(report.finest_series.size(), spec.n_steps + 1);
    EXPECT_EQ(report.classical.positions.size(), spec.n_steps + 1);
    // Not flat: the anharmonic deviation really shrinks.
    EXPECT_LT(*report.points.back().max_deviation, 0.5 * *report.points.front().max_deviation);
}

TEST(Correspondence, SweepIsThreadIndependent) {
    SweepSpec spec;
    spec.potential = Potential::quartic(0.1);
    spec.hbar_values = {1.0, 0.5, 0.25};
    spec.packet = {{1.0, 0}, {0.0, 0}, 1.0};
    spec.n_steps = 10;
    const auto a = hbar_sweep(spec);
    spec.threads = 3;
    const auto b = hbar_sweep(spec);
    for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(*a.points[i].max_deviation, *b.points[i].max_deviation);
}

TEST(Correspondence, HarmonicSweepIsFlat) {
    SweepSpec spec;
    spec.potential = Potential::harmonic(1.0, 1.0);
    spec.hbar_values = {1.0, 0.5, 0.25, 0.125};
    spec.packet = {{1.0, 0}, {0.0, 0}, 1.0};
    const auto report = hbar_sweep(spec);
    for (const auto& p : report.points) {
        ASSERT_TRUE(p.max_deviation.has_value());
        EXPECT_LT(*p.max_deviation, 1e-3) << p.hbar;
    }
}

TEST(Correspondence, SweepPreconditions) {
    SweepSpec spec;
    spec.hbar_values = {1.0, 0.5};
    EXPECT_THROW(hbar_sweep(spec), PreconditionError);
    spec.hbar_values = {1.0, 0.25, 0.5};
    EXPECT_THROW(hbar_sweep(spec), PreconditionError);
}

TEST(Correspondence, SweepRecordsPerRunErrors) {
    SweepSpec spec;
    spec.potential = Potential::zero();
    spec.target_extent = 4.0;
    spec.hbar_values = {1.0, 0.5, 0.25};
    spec.packet = {{0.0, 0}, {2.0, 0}, 1.0};
    const auto report = hbar_sweep(spec);
    ASSERT_EQ(report.points.size(), 3u);
    EXPECT_TRUE(report.points.front().error.has_value());
    EXPECT_FALSE(report.points.front().max_deviation.has_value());
}

TEST(Correspondence, GaugeEquivalence) {
    const auto s = magic(128, 0.125);
    const auto harmonic = Potential::harmonic(1.0, 1.0);
    const PacketParams packet{{0.5, 0}, {0.3, 0}, 1.0};
    const auto none = gauge_equivalence_run(s.constants, s.grid, harmonic, GaugeFunction::zero(), packet, 100);
    EXPECT_LT(none.max_density_discrepancy, 1e-14);
    EXPECT_EQ(none.max_classical_difference, 0.0);

    const auto quad = gauge_equivalence_run(s.constants, s.grid, harmonic, GaugeFunction::quadratic(0.3), packet, 100);
    EXPECT_LT(quad.max_density_discrepancy, 1e-10);
    EXPECT_LT(quad.max_classical_difference, 1e-9);

    const auto flat = gauge_equivalence_run(s.constants, s.grid, harmonic, GaugeFunction::constant(2.0), packet, 100);
    EXPECT_LT(flat.max_density_discrepancy, 1e-13);
}
