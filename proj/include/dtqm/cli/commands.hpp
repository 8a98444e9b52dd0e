#pragma once

#include <string>
#include <vector>

#include "dtqm/cli/config.hpp"

namespace dtqm::cli {

// Process exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitToleranceFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunResult {
    // Config echo, version, wall time, results and per-check verdicts.
    nlohmann::json report;
    // Data files (CSV or JSON series); byte-identical across reruns.
    std::vector<OutputFile> files;
    int exit_code = kExitPass;
};

// Runs the experiment described by `config`. Configuration and precondition
// problems throw (ConfigError, PreconditionError); solver and calibration
// failures throw NumericalError except where the report itself carries the
// diagnosis (kernel calibration in `build`).
RunResult run_experiment(const ExperimentConfig& config, unsigned threads = 0);

// Maps an exception escaping run_experiment to the exit-code contract.
int exit_code_for(const std::exception& error);

// Writes `<command>_report.json` and the data files into `directory`.
void write_outputs(const RunResult& result, const std::string& directory);

// CSV helpers shared by the data files.
std::string format_number(double value);

}  // namespace dtqm::cli
