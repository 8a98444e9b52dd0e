#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dtqm/action.hpp"
#include "dtqm/classical.hpp"
#include "dtqm/correspondence.hpp"
#include "dtqm/criterion.hpp"
#include "dtqm/grid.hpp"
#include "dtqm/propagator.hpp"

namespace dtqm::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kCsvVersion = 1;

enum class Command { check_action, evolve, classical, sweep, build };

std::string to_string(Command command);
Command command_from_string(const std::string& name);

enum class OutputFormat { csv, json };

struct GridConfig {
    std::size_t n_points = 0;
    double x_min = 0.0;
    double spacing = 0.0;
    int dimension = 1;

    SpatialGrid make() const;
};

struct ConstantsConfig {
    double mass = 1.0;
    std::optional<double> hbar;
    // Unset means "magic": tau* of the configured grid.
    std::optional<double> tau;
};

struct PotentialConfig {
    std::string name = "zero";
    double omega = 1.0;
    double lambda = 0.0;
    double depth = 0.0;
    double wavenumber = 1.0;
    double offset = 0.0;

    Potential make(double mass) const;
};

struct PairConfig {
    std::string kind = "zero";
    double k = 0.0;

    PairFunction make() const;
};

struct ActionConfig {
    ActionKind kind = ActionKind::standard;
    PotentialConfig potential;
    double gauge_c0 = 0.0;
    double gauge_c1 = 0.0;
    double gauge_c2 = 0.0;
    double epsilon = 0.0;
    double c = 1.0;
    PairConfig a1;
    PairConfig a2;
};

struct CheckActionRun {
    DomainBox domain;
    std::size_t samples = kDefaultCriterionSamples;
    double tolerance = kDefaultCriterionTolerance;
    bool expect_admissible = true;
    double trace_tolerance = 1e-10;
};

struct EvolveRun {
    PacketParams packet;
    std::size_t n_steps = 0;
    AmplitudeMode mode = AmplitudeMode::analytic;
    bool allow_any_time_step = false;
    bool check_boundary = true;
    double envelope_sigmas = 5.0;
    std::optional<double> position_tolerance;
    std::optional<double> momentum_tolerance;
    std::optional<double> norm_tolerance;
};

struct ClassicalRun {
    Point x0{0.0, 0.0};
    std::optional<Point> x_prev;
    std::optional<Point> p0;
    std::size_t n_steps = 1;
    SolverSettings solver;
    TrajectoryStatus expect_status = TrajectoryStatus::complete;
};

struct SweepRun {
    std::vector<double> hbar_values;
    double target_extent = 12.0;
    PacketParams packet;
    std::size_t n_steps = 40;
    bool expect_monotone = false;
    std::optional<double> max_deviation;
};

struct BuildRun {
    AmplitudeMode mode = AmplitudeMode::analytic;
    bool spectrum = true;
    std::optional<double> max_unitarity_deviation;
    std::optional<double> min_unitarity_deviation;
};

struct OutputConfig {
    std::string directory = ".";
    std::vector<OutputFormat> formats{OutputFormat::csv};
};

// A fully validated experiment description. Exactly one run block is
// populated, matching `command`.
struct ExperimentConfig {
    Command command = Command::check_action;
    std::optional<GridConfig> grid;
    ConstantsConfig constants;
    std::optional<ActionConfig> action;
    std::optional<CheckActionRun> check_action;
    std::optional<EvolveRun> evolve;
    std::optional<ClassicalRun> classical;
    std::optional<SweepRun> sweep;
    std::optional<BuildRun> build;
    OutputConfig output;
    // The document as read, echoed into reports.
    nlohmann::json source;
};

// Validates `doc` against the schema for `command`. Unknown keys, missing
// required keys and ill-typed values raise ConfigError naming the key path.
ExperimentConfig parse_config(const nlohmann::json& doc, Command command);
ExperimentConfig load_config(const std::string& path, Command command);

// Physical constants with "magic" resolved against the grid.
PhysicalConstants resolve_constants(const ExperimentConfig& config);
ActionModel make_model(const ExperimentConfig& config, const PhysicalConstants& constants);

}  // namespace dtqm::cli
