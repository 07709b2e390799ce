#ifndef SPIKELAB_CONFIG_HPP
#define SPIKELAB_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikelab {

/// Fixed default seed; reproducibility by default, never wall-clock.
inline constexpr std::uint64_t kDefaultSeed = 1729;

/// Version string stamped into every manifest.
inline constexpr const char* kArtifactVersion = "1.0.0";

enum class Command { Grf, Waterfill, Envelope, Detect, Moment, Verify };

const char* command_name(Command c);

/// Bad command lines and malformed config files; maps to exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Parsed invocation. Optional fields keep "not set on the command line"
 * distinguishable from an explicit value; commands resolve their own
 * defaults (e.g. n_block = 2r) once the spectrum is known.
 */
struct RunConfig {
    Command command = Command::Grf;
    std::vector<double> spectrum;
    long n = 200;                      // observation / block dimension
    long samples = 100000;             // envelope, moment
    long trials = 200;                 // detect
    std::uint64_t seed = kDefaultSeed;
    std::optional<double> epsilon;     // moment split point; default eta_max/4
    std::optional<double> threshold;   // detect; default 2.05
    std::optional<long> n_block;       // envelope; default 2r
    long grid = 1000;                  // curve / envelope grid points
    std::optional<double> x;           // waterfill evaluation point
    long budget = 100000;              // verify search budget
    long grid_steps = 400;             // verify grid resolution
    double tol = 1e-3;                 // verify gap tolerance
    std::optional<double> calibrate;   // detect H0-quantile calibration
    int jobs = 0;                      // 0 = available parallelism
    std::string out = "out";

    bool operator==(const RunConfig&) const = default;
};

/// Parses `<command> [flags]`. A `--config <file>` JSON is merged first and
/// explicit flags win. Throws UsageError naming the offending field.
RunConfig parse_config(const std::vector<std::string>& args);

/// Canonical command line for a config; parse_config(render_config(c)) == c.
std::vector<std::string> render_config(const RunConfig& config);

/// Comma-separated values, e.g. "1,0.7,0.2".
std::vector<double> parse_spectrum_flag(const std::string& text);

}  // namespace spikelab

#endif
