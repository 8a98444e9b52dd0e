#include "dtqm/cli/commands.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dtqm/errors.hpp"

namespace dtqm::cli {

using nlohmann::json;

namespace {

// Pass/fail bookkeeping for one run.
class Checks {
public:
    void add(const std::string& name, bool passed, json detail = json::object()) {
        detail["name"] = name;
        detail["passed"] = passed;
        items_.push_back(std::move(detail));
        all_ &= passed;
    }
    void upper(const std::string& name, double value, double limit) {
        add(name, value < limit, {{"value", value}, {"limit", limit}, {"relation", "<"}});
    }
    void lower(const std::string& name, double value, double limit) {
        add(name, value > limit, {{"value", value}, {"limit", limit}, {"relation", ">"}});
    }
    bool passed() const { return all_; }
    json to_json() const { return items_; }

private:
    json items_ = json::array();
    bool all_ = true;
};

// Empty cells stay empty; anything else is quoted with doubled inner quotes.
std::string quote(const std::string& text) {
    if (text.empty()) return text;
    std::string out = "\"";
    for (char ch : text) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

json point_json(const Point& p, int dim) {
    return dim == 1 ? json(p[0]) : json::array({p[0], p[1]});
}

// A table emitted as CSV (with a versioned header comment) or as a JSON array
// of row objects.
struct Table {
    std::string kind;
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;
    // Extra text columns appended to every row (sweep error messages).
    std::vector<std::string> text_columns;
    std::vector<std::vector<std::string>> text_rows;

    std::string csv() const {
        std::ostringstream out;
        out << "# dtqm " << kind << " csv v" << kCsvVersion << "\n";
        for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
        for (const auto& t : text_columns) out << "," << t;
        out << "\n";
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < rows[r].size(); ++c) {
                if (c) out << ",";
                if (rows[r][c]) out << format_number(*rows[r][c]);
            }
            if (!text_rows.empty()) {
                for (const auto& t : text_rows[r]) out << "," << quote(t);
            }
            out << "\n";
        }
        return out.str();
    }

    json rows_json() const {
        json out = json::array();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            json row = json::object();
            for (std::size_t c = 0; c < columns.size(); ++c) {
                row[columns[c]] = rows[r][c] ? json(*rows[r][c]) : json(nullptr);
            }
            for (std::size_t t = 0; t < text_columns.size(); ++t) {
                row[text_columns[t]] = text_rows[r][t].empty() ? json(nullptr) : json(text_rows[r][t]);
            }
            out.push_back(std::move(row));
        }
        return out;
    }
};

void emit_table(const ExperimentConfig& config, const Table& table, RunResult& result) {
    const std::string stem = to_string(config.command);
    for (OutputFormat f : config.output.formats) {
        if (f == OutputFormat::csv) {
            result.files.push_back({stem + ".csv", table.csv()});
        } else {
            json doc = {{"version", kVersion}, {"kind", table.kind}, {"rows", table.rows_json()}};
            result.files.push_back({stem + ".json", doc.dump(2) + "\n"});
        }
    }
}

json run_check_action(const ExperimentConfig& config, Checks& checks) {
    const CheckActionRun& run = *config.check_action;
    const auto model = make_model(config, resolve_constants(config));
    const CriterionReport report = check_criterion(model, run.domain, run.samples, run.tolerance);
    json out = {{"action", to_string(model.kind())},
                {"samples", report.samples},
                {"tolerance", report.tolerance},
                {"determinant",
                 {{"min", report.det.min},
                  {"max", report.det.max},
                  {"mean", report.det.mean},
                  {"relative_spread", report.det.relative_spread}}},
                {"is_constant", report.is_constant},
                {"expect", run.expect_admissible ? "admissible" : "inadmissible"}};

    bool admissible = report.is_constant;
    if (model.kind() == ActionKind::vector_potential_2d) {
        // The field term is judged by the linearized (trace) condition.
        const double trace = check_linearized(model, run.domain, run.samples);
        out["trace_linearized"] = trace;
        out["trace_tolerance"] = run.trace_tolerance;
        admissible = trace < run.trace_tolerance;
    }
    out["admissible"] = admissible;
    checks.add("expectation", admissible == run.expect_admissible,
               {{"observed", admissible ? "admissible" : "inadmissible"}});
    return out;
}

json run_evolve(const ExperimentConfig& config, Checks& checks, RunResult& result) {
    const EvolveRun& run = *config.evolve;
    const auto grid = config.grid->make();
    const auto constants = resolve_constants(config);
    const auto model = make_model(config, constants);
    EhrenfestOptions options;
    options.mode = run.mode;
    options.allow_any_time_step = run.allow_any_time_step;
    options.check_boundary = run.check_boundary;
    options.envelope_sigmas = run.envelope_sigmas;
    const EhrenfestRun er = ehrenfest_run(model, grid, run.packet, run.n_steps, options);
    const int dim = grid.dimension();

    double worst_norm = 0.0;
    for (const auto& obs : er.quantum) worst_norm = std::max(worst_norm, std::abs(obs.norm - 1.0));

    Table table;
    table.kind = "evolve";
    if (dim == 1) {
        table.columns = {"step", "mean_x", "mean_p", "spread_x", "norm", "x_classical", "p_classical"};
    } else {
        table.columns = {"step",   "mean_x",   "mean_y",      "mean_px",     "mean_py",      "spread_x",
                         "spread_y", "norm", "x_classical", "y_classical", "px_classical", "py_classical"};
    }
    for (std::size_t n = 0; n < er.quantum.size(); ++n) {
        const auto& q = er.quantum[n];
        const bool has_c = n < er.classical.positions.size();
        std::vector<std::optional<double>> row{static_cast<double>(n)};
        for (int d = 0; d < dim; ++d) row.emplace_back(q.mean_x[d]);
        for (int d = 0; d < dim; ++d) row.emplace_back(q.mean_p[d]);
        for (int d = 0; d < dim; ++d) row.emplace_back(q.spread_x[d]);
        row.emplace_back(q.norm);
        for (int d = 0; d < dim; ++d) row.push_back(has_c ? std::optional<double>(er.classical.positions[n][d]) : std::nullopt);
        for (int d = 0; d < dim; ++d) row.push_back(has_c ? std::optional<double>(er.classical.momenta[n][d]) : std::nullopt);
        table.rows.push_back(std::move(row));
    }
    emit_table(config, table, result);

    const double pos = er.max_position_deviation();
    const double mom = er.max_momentum_deviation();
    if (run.position_tolerance) checks.upper("position_tracking", pos, *run.position_tolerance);
    if (run.momentum_tolerance) checks.upper("momentum_tracking", mom, *run.momentum_tolerance);
    if (run.norm_tolerance) checks.upper("norm", worst_norm, *run.norm_tolerance);

    return {{"action", to_string(model.kind())},
            {"tau", er.tau},
            {"amplitude_mode", to_string(run.mode)},
            {"unitarity_deviation", er.unitarity_deviation},
            {"steps", run.n_steps},
            {"max_position_deviation", pos},
            {"max_momentum_deviation", mom},
            {"max_norm_drift", er.max_norm_drift()},
            {"max_norm_error", worst_norm},
            {"classical_seed_previous", point_json(er.seed_previous, dim)},
            {"classical_status", er.classical.status_string()}};
}

json run_classical(const ExperimentConfig& config, Checks& checks, RunResult& result) {
    const ClassicalRun& run = *config.classical;
    const auto model = make_model(config, resolve_constants(config));
    const int dim = model.dimension();
    const ClassicalTrajectory traj = run.p0 ? integrate_from_momentum(model, run.x0, *run.p0, run.n_steps, run.solver)
                                            : integrate(model, run.x0, *run.x_prev, run.n_steps, run.solver);

    Table table;
    table.kind = "classical";
    table.columns = dim == 1 ? std::vector<std::string>{"step", "x", "p", "residual"}
                             : std::vector<std::string>{"step", "x", "y", "p", "p_y", "residual"};
    double worst = 0.0;
    for (std::size_t n = 0; n < traj.positions.size(); ++n) {
        std::vector<std::optional<double>> row{static_cast<double>(traj.times[n])};
        for (int d = 0; d < dim; ++d) row.emplace_back(traj.positions[n][d]);
        for (int d = 0; d < dim; ++d) row.emplace_back(traj.momenta[n][d]);
        row.emplace_back(traj.residuals[n]);
        worst = std::max(worst, traj.residuals[n]);
        table.rows.push_back(std::move(row));
    }
    emit_table(config, table, result);

    const double limit = run.solver.tolerance * model.constants().mass / model.constants().time_step;
    const std::string expected = run.expect_status == TrajectoryStatus::complete      ? "complete"
                                 : run.expect_status == TrajectoryStatus::no_solution ? "no_solution"
                                                                                      : "non_unique";
    checks.add("status", traj.status == run.expect_status,
               {{"observed", traj.status_string()}, {"expected", expected}});

    json out = {{"action", to_string(model.kind())},
                {"tau", model.constants().time_step},
                {"status", traj.status_string()},
                {"positions_computed", traj.positions.size()},
                {"max_residual", worst},
                {"residual_limit", limit}};
    if (traj.status_step) out["status_step"] = *traj.status_step;
    return out;
}

json run_sweep(const ExperimentConfig& config, unsigned threads, Checks& checks, RunResult& result) {
    const SweepRun& run = *config.sweep;
    SweepSpec spec;
    spec.mass = config.constants.mass;
    spec.potential = config.action->potential.make(spec.mass);
    spec.tau = *config.constants.tau;
    spec.target_extent = run.target_extent;
    spec.hbar_values = run.hbar_values;
    spec.packet = run.packet;
    spec.n_steps = run.n_steps;
    spec.threads = threads;
    const CorrespondenceReport report = hbar_sweep(spec);

    Table table;
    table.kind = "sweep";
    table.columns = {"hbar", "n_points", "spacing", "max_deviation"};
    table.text_columns = {"error"};
    json points = json::array();
    bool all_ran = true;
    double worst = 0.0;
    for (const auto& p : report.points) {
        table.rows.push_back({p.hbar, static_cast<double>(p.n_points), p.spacing, p.max_deviation});
        table.text_rows.push_back({p.error.value_or("")});
        points.push_back({{"hbar", p.hbar},
                          {"n_points", p.n_points},
                          {"spacing", p.spacing},
                          {"max_deviation", p.max_deviation ? json(*p.max_deviation) : json(nullptr)},
                          {"error", p.error ? json(*p.error) : json(nullptr)}});
        all_ran &= p.max_deviation.has_value();
        if (p.max_deviation) worst = std::max(worst, *p.max_deviation);
    }
    emit_table(config, table, result);

    if (run.expect_monotone) checks.add("monotone", report.monotone && all_ran);
    if (run.max_deviation) {
        checks.add("max_deviation", all_ran && worst < *run.max_deviation,
                   {{"value", worst}, {"limit", *run.max_deviation}, {"relation", "<"}});
    }

    json classical = json::array();
    for (const auto& x : report.classical.positions) classical.push_back(x[0]);
    return {{"tau", spec.tau},
            {"points", points},
            {"monotone", report.monotone},
            {"finest_series", report.finest_series},
            {"classical_positions", classical},
            {"classical_status", report.classical.status_string()}};
}

json run_build(const ExperimentConfig& config, Checks& checks, RunResult& result) {
    const BuildRun& run = *config.build;
    const auto grid = config.grid->make();
    const auto constants = resolve_constants(config);
    const auto model = make_model(config, constants);
    json out = {{"action", to_string(model.kind())},
                {"dimension", grid.dimension()},
                {"sites", grid.size()},
                {"tau", constants.time_step},
                {"magic_tau", magic_time_step(grid, constants.mass, constants.hbar)},
                {"amplitude_mode", to_string(run.mode)}};
    try {
        const PropagatorKernel kernel = build_kernel(grid, model, run.mode);
        const Complex a = kernel.amplitude();
        out["amplitude"] = {{"re", a.real()}, {"im", a.imag()}, {"abs", std::abs(a)}, {"arg", std::arg(a)}};
        out["unitarity_deviation"] = kernel.unitarity_deviation();
        if (run.spectrum) {
            const Eigen::ComplexEigenSolver<ComplexMatrix> solver(kernel.matrix(), false);
            double lo = 1e300, hi = 0.0;
            for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
                const double m = std::abs(solver.eigenvalues()[i]);
                lo = std::min(lo, m);
                hi = std::max(hi, m);
            }
            out["spectrum"] = {{"min_abs", lo}, {"max_abs", hi}, {"max_off_unit_circle", std::max(hi - 1.0, 1.0 - lo)}};
        }
        if (run.max_unitarity_deviation) {
            checks.upper("unitarity_deviation", kernel.unitarity_deviation(), *run.max_unitarity_deviation);
        }
        if (run.min_unitarity_deviation) {
            checks.lower("unitarity_deviation", kernel.unitarity_deviation(), *run.min_unitarity_deviation);
        }
    } catch (const CalibrationError& e) {
        json scanned = json::array();
        for (const auto& [amp, dev] : e.scanned()) scanned.push_back({{"amplitude", amp}, {"deviation", dev}});
        out["error"] = e.what();
        out["calibration_scan"] = scanned;
        result.exit_code = kExitNumericalError;
    }
    return out;
}

}  // namespace

std::string format_number(double value) {
    if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

RunResult run_experiment(const ExperimentConfig& config, unsigned threads) {
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    Checks checks;
    json results;
    switch (config.command) {
        case Command::check_action: results = run_check_action(config, checks); break;
        case Command::evolve: results = run_evolve(config, checks, result); break;
        case Command::classical: results = run_classical(config, checks, result); break;
        case Command::sweep: results = run_sweep(config, threads, checks, result); break;
        case Command::build: results = run_build(config, checks, result); break;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (result.exit_code == kExitPass && !checks.passed()) result.exit_code = kExitToleranceFailure;
    result.report = {{"version", kVersion},
                     {"command", to_string(config.command)},
                     {"config", config.source},
                     {"wall_time_seconds", seconds},
                     {"results", results},
                     {"checks", checks.to_json()},
                     {"passed", result.exit_code == kExitPass}};
    return result;
}

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const ConfigError*>(&error) || dynamic_cast<const PreconditionError*>(&error)) {
        return kExitConfigError;
    }
    return kExitNumericalError;
}

void write_outputs(const RunResult& result, const std::string& directory) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw ConfigError("cannot create output directory '" + directory + "': " + ec.message());
    auto write = [&](const std::string& name, const std::string& content) {
        const fs::path path = fs::path(directory) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + path.string() + "'");
        out << content;
    };
    write(result.report.at("command").get<std::string>() + "_report.json", result.report.dump(2) + "\n");
    for (const auto& f : result.files) write(f.name, f.content);
}

}  // namespace dtqm::cli
