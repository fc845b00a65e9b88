#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "grnbounds/app/config.hpp"

namespace grnbounds::app {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kIoError = 4 };

struct CommandOptions {
    std::optional<std::filesystem::path> out;  ///< overrides cfg.out
    unsigned threads = 1;                      ///< 0 selects the hardware concurrency
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> ensemble;
    std::optional<std::vector<double>> sample_times;
    std::optional<std::filesystem::path> theta_out;
    std::ostream* log = nullptr;  ///< stage timings and diagnostics; std::cerr when null
};

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs one subcommand (bounds, solve, expect, ssa, pipeline, validate) and
/// returns its exit code. Artifacts go to the output directory together with
/// manifest.json; on failure a one-line JSON diagnostic is written to the log
/// and the manifest marks the failed stage. `validate` ignores `cfg`.
int run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& options);

/// Shortest round-trip decimal form, used for every number in CSV output.
std::string format_number(double v);

}  // namespace grnbounds::app
