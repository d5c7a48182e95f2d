#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "lora/results_io.hpp"
#include "lora/simulator.hpp"

namespace lorasync {

enum class Mode { rmse, ser, sync_file, budget };

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitInsufficientData = 4;
inline constexpr int kExitMalformedFile = 5;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown for --help; what() holds the help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CliArgs {
    Mode mode = Mode::ser;
    lora::ExperimentConfig experiment;
    lora::TableFormat format = lora::TableFormat::csv;
    std::string out;      // empty: stdout
    std::string iq_dump;  // rmse/ser: stream of trial 0 at the first SNR point
    std::string iq_in;    // sync-file input
    unsigned threads = 0;
    // budget mode: restrict the table when set explicitly
    bool sf_given = false;
    bool ppm_given = false;
};

// Throws UsageError or HelpRequested.
CliArgs parse_args(const std::vector<std::string>& args);

std::vector<double> snr_grid(double start, double stop, double step);

// Runs a parsed command. Writes results to args.out or `out`, diagnostics
// to `err`, and returns the exit code.
int run(const CliArgs& args, std::ostream& out, std::ostream& err);

// parse + run with exit-code mapping.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lorasync
