#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dtqm/cli/commands.hpp"
#include "dtqm/errors.hpp"

namespace {

unsigned threads_from_env() {
    const char* raw = std::getenv("DTQM_THREADS");
    if (raw == nullptr || *raw == '\0') return 0;
    try {
        const long v = std::stol(raw);
        if (v < 0) throw std::invalid_argument("negative");
        return static_cast<unsigned>(v);
    } catch (const std::exception&) {
        throw dtqm::ConfigError(std::string("DTQM_THREADS must be a non-negative integer (got '") + raw + "')");
    }
}

void print_summary(const dtqm::cli::RunResult& result) {
    const auto& r = result.report;
    std::cout << r.at("command").get<std::string>() << ": " << (r.at("passed").get<bool>() ? "pass" : "fail")
              << " (exit " << result.exit_code << ")\n";
    for (const auto& check : r.at("checks")) {
        std::cout << "  " << check.at("name").get<std::string>() << ": "
                  << (check.at("passed").get<bool>() ? "ok" : "FAILED");
        if (check.contains("value")) std::cout << " value=" << dtqm::cli::format_number(check.at("value").get<double>());
        if (check.contains("limit")) std::cout << " limit=" << dtqm::cli::format_number(check.at("limit").get<double>());
        if (check.contains("observed")) std::cout << " observed=" << check.at("observed").get<std::string>();
        std::cout << "\n";
    }
    if (r.at("results").contains("error")) std::cout << "  error: " << r.at("results").at("error").get<std::string>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    using namespace dtqm::cli;

    CLI::App app{"Discrete-time quantum mechanics experiments"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    std::string format;
    const std::string names[] = {"check-action", "evolve", "classical", "sweep", "build"};
    const std::string help[] = {"Test an action against the constant-determinant condition",
                                "Evolve a Gaussian packet and track the classical trajectory",
                                "Integrate the discrete equation of motion",
                                "Run a correspondence sweep over decreasing hbar",
                                "Build a kernel and report amplitude, unitarity and spectrum"};
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], help[i]);
        sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "Output directory (overrides output.directory)");
        sub->add_option("--format", format, "Data file format (overrides output.formats)")
            ->check(CLI::IsMember({"csv", "json"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        const Command command = command_from_string(app.get_subcommands().front()->get_name());
        ExperimentConfig config = load_config(config_path, command);
        if (!out_dir.empty()) config.output.directory = out_dir;
        if (!format.empty()) config.output.formats = {format == "csv" ? OutputFormat::csv : OutputFormat::json};
        const RunResult result = run_experiment(config, threads_from_env());
        write_outputs(result, config.output.directory);
        print_summary(result);
        return result.exit_code;
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        std::cerr << "error: " << e.what() << "\n";
        return code;
    }
}
