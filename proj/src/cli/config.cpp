#include "dtqm/cli/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "dtqm/errors.hpp"

namespace dtqm::cli {

using nlohmann::json;

namespace {

// A JSON object together with its key path. Every read marks the key as
// known; `close` rejects anything left over.
class Block {
public:
    Block(const json& value, std::string path) : value_(value), path_(std::move(path)) {
        if (!value_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
    }

    bool has(const std::string& key) const { return value_.contains(key); }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!value_.contains(key)) throw ConfigError("missing key '" + key_path(key) + "'");
        return value_.at(key);
    }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError("'" + key_path(key) + "' must be a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : mark(key, fallback); }

    double positive(const std::string& key) {
        const double v = number(key);
        if (!(v > 0.0)) throw ConfigError("'" + key_path(key) + "' must be positive");
        return v;
    }
    double positive(const std::string& key, double fallback) { return has(key) ? positive(key) : mark(key, fallback); }

    std::size_t count(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ConfigError("'" + key_path(key) + "' must be a non-negative integer");
        }
        return v.get<std::size_t>();
    }
    std::size_t count(const std::string& key, std::size_t fallback) { return has(key) ? count(key) : mark(key, fallback); }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return mark(key, fallback);
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError("'" + key_path(key) + "' must be true or false");
        return v.get<bool>();
    }

    std::string text(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError("'" + key_path(key) + "' must be a string");
        return v.get<std::string>();
    }
    std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : mark(key, fallback); }

    std::string choice(const std::string& key, std::initializer_list<const char*> options, const std::string& fallback) {
        const std::string v = text(key, fallback);
        for (const char* o : options) {
            if (v == o) return v;
        }
        std::string list;
        for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
        throw ConfigError("'" + key_path(key) + "' must be one of: " + list + " (got '" + v + "')");
    }

    // A point: a number (one dimension) or an array of `dim` numbers.
    Point point(const std::string& key, int dim) {
        const json& v = raw(key);
        Point out{0.0, 0.0};
        if (v.is_number() && dim == 1) {
            out[0] = v.get<double>();
            return out;
        }
        if (!v.is_array() || static_cast<int>(v.size()) != dim) {
            throw ConfigError("'" + key_path(key) + "' must be " +
                              (dim == 1 ? std::string("a number") : "an array of " + std::to_string(dim) + " numbers"));
        }
        for (int d = 0; d < dim; ++d) {
            if (!v[static_cast<std::size_t>(d)].is_number()) {
                throw ConfigError("'" + key_path(key) + "' must contain numbers only");
            }
            out[static_cast<std::size_t>(d)] = v[static_cast<std::size_t>(d)].get<double>();
        }
        return out;
    }
    Point point(const std::string& key, int dim, Point fallback) { return has(key) ? point(key, dim) : mark(key, fallback); }

    Block child(const std::string& key) { return Block(raw(key), key_path(key)); }

    void close() const {
        for (auto it = value_.begin(); it != value_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError("unknown key '" + key_path(it.key()) + "'");
        }
    }

private:
    template <typename T>
    T mark(const std::string& key, T value) {
        seen_.insert(key);
        return value;
    }

    const json& value_;
    std::string path_;
    std::set<std::string> seen_;
};

GridConfig parse_grid(Block b) {
    GridConfig g;
    g.n_points = b.count("n_points");
    g.x_min = b.number("x_min");
    g.spacing = b.positive("spacing");
    g.dimension = static_cast<int>(b.count("dimension", 1));
    if (g.dimension != 1 && g.dimension != 2) throw ConfigError("'grid.dimension' must be 1 or 2");
    if (g.n_points < 4) throw ConfigError("'grid.n_points' must be at least 4");
    b.close();
    return g;
}

ConstantsConfig parse_constants(Block b, Command command) {
    ConstantsConfig c;
    c.mass = b.positive("mass", 1.0);
    if (b.has("hbar")) {
        if (command == Command::sweep) {
            throw ConfigError("'constants.hbar' is not used by sweep; list values in 'run.hbar_values'");
        }
        c.hbar = b.positive("hbar");
    }
    if (b.has("tau")) {
        const json& t = b.raw("tau");
        if (t.is_string()) {
            if (t.get<std::string>() != "magic") throw ConfigError("'constants.tau' must be a number or \"magic\"");
            if (command == Command::sweep) throw ConfigError("sweep needs a numeric 'constants.tau'");
        } else {
            c.tau = b.positive("tau");
        }
    } else if (command == Command::sweep) {
        throw ConfigError("missing key 'constants.tau'");
    }
    b.close();
    return c;
}

PotentialConfig parse_potential(Block b) {
    PotentialConfig p;
    p.name = b.choice("name", {"zero", "harmonic", "quartic", "cosine"}, "zero");
    if (p.name == "harmonic") p.omega = b.positive("omega", 1.0);
    if (p.name == "quartic") p.lambda = b.number("lambda");
    if (p.name == "cosine") {
        p.depth = b.number("depth");
        p.wavenumber = b.number("wavenumber", 1.0);
    }
    p.offset = b.number("offset", 0.0);
    b.close();
    return p;
}

PairConfig parse_pair(Block b) {
    PairConfig p;
    p.kind = b.choice("kind", {"zero", "bilinear", "quadratic_linear", "sine_product"}, "zero");
    if (p.kind != "zero") p.k = b.number("k");
    b.close();
    return p;
}

ActionConfig parse_action(Block b) {
    ActionConfig a;
    const std::string kind =
        b.choice("kind", {"standard", "gauged", "quartic", "sine", "vector_potential_2d"}, "standard");
    if (kind == "standard") a.kind = ActionKind::standard;
    if (kind == "gauged") a.kind = ActionKind::gauged;
    if (kind == "quartic") a.kind = ActionKind::quartic;
    if (kind == "sine") a.kind = ActionKind::sine;
    if (kind == "vector_potential_2d") a.kind = ActionKind::vector_potential_2d;

    if (a.kind != ActionKind::sine && b.has("potential")) a.potential = parse_potential(b.child("potential"));
    if (a.kind == ActionKind::gauged) {
        Block g = b.child("gauge");
        a.gauge_c0 = g.number("c0", 0.0);
        a.gauge_c1 = g.number("c1", 0.0);
        a.gauge_c2 = g.number("c2", 0.0);
        g.close();
    }
    if (a.kind == ActionKind::quartic) a.epsilon = b.number("epsilon");
    if (a.kind == ActionKind::sine) a.c = b.positive("c");
    if (a.kind == ActionKind::vector_potential_2d) {
        if (b.has("a1")) a.a1 = parse_pair(b.child("a1"));
        if (b.has("a2")) a.a2 = parse_pair(b.child("a2"));
    }
    b.close();
    return a;
}

PacketParams parse_packet(Block b, int dim) {
    PacketParams p;
    p.x0 = b.point("x0", dim);
    p.p0 = b.point("p0", dim, Point{0.0, 0.0});
    p.alpha = b.positive("alpha", 1.0);
    b.close();
    return p;
}

AmplitudeMode parse_mode(Block& b) {
    return amplitude_mode_from_string(b.choice("amplitude_mode", {"analytic", "calibrated", "unit_diagonal"}, "analytic"));
}

OutputConfig parse_output(Block b) {
    OutputConfig o;
    o.directory = b.text("directory", ".");
    if (b.has("formats")) {
        const json& f = b.raw("formats");
        if (!f.is_array() || f.empty()) throw ConfigError("'output.formats' must be a non-empty array");
        o.formats.clear();
        for (const auto& item : f) {
            if (item == "csv") {
                o.formats.push_back(OutputFormat::csv);
            } else if (item == "json") {
                o.formats.push_back(OutputFormat::json);
            } else {
                throw ConfigError("'output.formats' entries must be \"csv\" or \"json\"");
            }
        }
    }
    b.close();
    return o;
}

int run_dimension(const ExperimentConfig& c) { return c.grid ? c.grid->dimension : 1; }

void parse_run(ExperimentConfig& c, Block b) {
    const int dim = run_dimension(c);
    switch (c.command) {
        case Command::check_action: {
            CheckActionRun r;
            Block d = b.child("domain");
            r.domain.lo = d.point("lo", dim);
            r.domain.hi = d.point("hi", dim);
            d.close();
            r.samples = b.count("samples", kDefaultCriterionSamples);
            r.tolerance = b.positive("tolerance", kDefaultCriterionTolerance);
            r.expect_admissible = b.choice("expect", {"admissible", "inadmissible"}, "admissible") == "admissible";
            r.trace_tolerance = b.positive("trace_tolerance", 1e-10);
            c.check_action = r;
            break;
        }
        case Command::evolve: {
            EvolveRun r;
            r.packet = parse_packet(b.child("packet"), dim);
            r.n_steps = b.count("n_steps");
            r.mode = parse_mode(b);
            r.allow_any_time_step = b.flag("allow_any_time_step", false);
            r.check_boundary = b.flag("check_boundary", true);
            r.envelope_sigmas = b.positive("envelope_sigmas", r.envelope_sigmas);
            if (b.has("tolerance")) {
                Block t = b.child("tolerance");
                if (t.has("position")) r.position_tolerance = t.positive("position");
                if (t.has("momentum")) r.momentum_tolerance = t.positive("momentum");
                if (t.has("norm")) r.norm_tolerance = t.positive("norm");
                t.close();
            }
            c.evolve = r;
            break;
        }
        case Command::classical: {
            ClassicalRun r;
            r.x0 = b.point("x0", dim);
            if (b.has("x_prev") == b.has("p0")) throw ConfigError("'run' needs exactly one of 'x_prev' and 'p0'");
            if (b.has("x_prev")) r.x_prev = b.point("x_prev", dim);
            if (b.has("p0")) r.p0 = b.point("p0", dim);
            r.n_steps = b.count("n_steps");
            if (r.n_steps == 0) throw ConfigError("'run.n_steps' must be at least 1");
            if (b.has("solver")) {
                Block s = b.child("solver");
                r.solver.radius_scale = s.positive("radius_scale", r.solver.radius_scale);
                r.solver.subintervals = s.count("subintervals", r.solver.subintervals);
                r.solver.tolerance = s.positive("tolerance", r.solver.tolerance);
                if (r.solver.subintervals == 0) throw ConfigError("'run.solver.subintervals' must be positive");
                s.close();
            }
            const std::string expect = b.choice("expect_status", {"complete", "no_solution", "non_unique"}, "complete");
            r.expect_status = expect == "complete"      ? TrajectoryStatus::complete
                              : expect == "no_solution" ? TrajectoryStatus::no_solution
                                                        : TrajectoryStatus::non_unique;
            c.classical = r;
            break;
        }
        case Command::sweep: {
            SweepRun r;
            const json& h = b.raw("hbar_values");
            if (!h.is_array()) throw ConfigError("'run.hbar_values' must be an array of numbers");
            for (const auto& v : h) {
                if (!v.is_number()) throw ConfigError("'run.hbar_values' must be an array of numbers");
                r.hbar_values.push_back(v.get<double>());
            }
            r.target_extent = b.positive("target_extent", r.target_extent);
            r.packet = parse_packet(b.child("packet"), 1);
            r.n_steps = b.count("n_steps", r.n_steps);
            if (b.has("expect")) {
                Block e = b.child("expect");
                r.expect_monotone = e.flag("monotone", false);
                if (e.has("max_deviation")) r.max_deviation = e.positive("max_deviation");
                e.close();
            }
            c.sweep = r;
            break;
        }
        case Command::build: {
            BuildRun r;
            r.mode = parse_mode(b);
            r.spectrum = b.flag("spectrum", true);
            if (b.has("expect")) {
                Block e = b.child("expect");
                if (e.has("max_unitarity_deviation")) r.max_unitarity_deviation = e.positive("max_unitarity_deviation");
                if (e.has("min_unitarity_deviation")) r.min_unitarity_deviation = e.positive("min_unitarity_deviation");
                e.close();
            }
            c.build = r;
            break;
        }
    }
    b.close();
}

}  // namespace

std::string to_string(Command command) {
    switch (command) {
        case Command::check_action: return "check-action";
        case Command::evolve: return "evolve";
        case Command::classical: return "classical";
        case Command::sweep: return "sweep";
        case Command::build: return "build";
    }
    return "unknown";
}

Command command_from_string(const std::string& name) {
    for (Command c : {Command::check_action, Command::evolve, Command::classical, Command::sweep, Command::build}) {
        if (to_string(c) == name) return c;
    }
    throw ConfigError("unknown subcommand '" + name + "'");
}

SpatialGrid GridConfig::make() const {
    const Axis axis{n_points, x_min, spacing};
    return dimension == 1 ? SpatialGrid::line(n_points, x_min, spacing) : SpatialGrid::plane(axis, axis);
}

Potential PotentialConfig::make(double mass) const {
    Potential p = Potential::zero();
    if (name == "harmonic") p = Potential::harmonic(mass, omega);
    if (name == "quartic") p = Potential::quartic(lambda);
    if (name == "cosine") p = Potential::cosine(depth, wavenumber);
    return offset != 0.0 ? p.with_offset(offset) : p;
}

PairFunction PairConfig::make() const {
    if (kind == "bilinear") return PairFunction::bilinear(k);
    if (kind == "quadratic_linear") return PairFunction::quadratic_linear(k);
    if (kind == "sine_product") return PairFunction::sine_product(k);
    return PairFunction::zero();
}

ExperimentConfig parse_config(const json& doc, Command command) {
    ExperimentConfig c;
    c.command = command;
    c.source = doc;
    Block root(doc, "");

    const bool needs_grid = command != Command::sweep;
    if (needs_grid) {
        c.grid = parse_grid(root.child("grid"));
    } else if (root.has("grid")) {
        throw ConfigError("sweep builds its own grids; remove 'grid' and set 'run.target_extent'");
    }
    if (root.has("constants")) {
        c.constants = parse_constants(root.child("constants"), command);
    } else if (command == Command::sweep) {
        throw ConfigError("missing key 'constants'");
    }
    c.action = parse_action(root.child("action"));
    parse_run(c, root.child("run"));
    if (root.has("output")) c.output = parse_output(root.child("output"));
    root.close();

    const int dim = run_dimension(c);
    const bool planar_kind = c.action->kind == ActionKind::vector_potential_2d;
    if (planar_kind && dim != 2) throw ConfigError("'action.kind' vector_potential_2d needs 'grid.dimension' = 2");
    if (dim == 2 && !(planar_kind || c.action->kind == ActionKind::standard)) {
        throw ConfigError("two-dimensional grids support the standard and vector_potential_2d actions only");
    }
    if (command == Command::sweep && c.action->kind != ActionKind::standard) {
        throw ConfigError("sweep runs the standard action; set 'action.kind' to \"standard\"");
    }
    return c;
}

ExperimentConfig load_config(const std::string& path, Command command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc, command);
}

PhysicalConstants resolve_constants(const ExperimentConfig& config) {
    const double hbar = config.constants.hbar.value_or(1.0);
    if (config.constants.tau) return PhysicalConstants::make(config.constants.mass, *config.constants.tau, hbar);
    if (!config.grid) throw ConfigError("\"magic\" tau needs a grid");
    return PhysicalConstants::make(config.constants.mass,
                                   magic_time_step(config.grid->make(), config.constants.mass, hbar), hbar);
}

ActionModel make_model(const ExperimentConfig& config, const PhysicalConstants& constants) {
    const ActionConfig& a = *config.action;
    const Potential v = a.potential.make(constants.mass);
    const int dim = run_dimension(config);
    switch (a.kind) {
        case ActionKind::standard: return standard_action(constants, v, dim);
        case ActionKind::gauged:
            return gauged_action(constants, v, GaugeFunction::polynomial(a.gauge_c0, a.gauge_c1, a.gauge_c2));
        case ActionKind::quartic: return quartic_action(constants, v, a.epsilon);
        case ActionKind::sine: return sine_action(constants, a.c);
        case ActionKind::vector_potential_2d: return vector_potential_action_2d(constants, v, a.a1.make(), a.a2.make());
    }
    throw ConfigError("unsupported action kind");
}

}  // namespace dtqm::cli
