#pragma once

#include <string>

#include "ctc/simulator.hpp"

namespace ctc::cli {

/// Exit-code contract shared by all subcommands.
enum ExitCode {
    kOk = 0,
    kObjectivesNotMet = 1,
    kConfigError = 2,
    kSimulationAbort = 3,
    kIoError = 4,
};

/// Full command-line entry point: run | sweep | validate.
int run(int argc, const char* const* argv);

/// Per-run artifact summary.
struct RunReport {
    std::string scenario;
    ControllerMode mode = ControllerMode::FullState;
    Metrics metrics;
    bool aborted = false;
    std::string diagnostic;
    std::vector<std::string> artifacts;
    double wall_seconds = 0.0;

    bool objectives_met() const { return !aborted && metrics.all_ok(); }
};

/// Executes a parsed scenario and writes CSV + SVG + report under
/// out_dir/<scenario name>/. Returns the report; filesystem problems throw
/// IoError.
RunReport execute_run(const ScenarioConfig& cfg, const std::string& out_dir);

/// Deterministic textual report (no timestamps).
std::string format_report(const RunReport& report, const ScenarioConfig& cfg);

}  // namespace ctc::cli
