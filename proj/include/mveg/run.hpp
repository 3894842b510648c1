#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "mveg/config.hpp"

namespace mveg {

struct SimulateResult {
    std::string directory;  // resolved output directory
    double dt_used = 0.0;
    std::size_t retries = 0;
    double final_mass = 0.0;
    std::optional<double> final_target_distance;
    bool dissipativity_applicable = false;
    bool dissipativity_pass = false;
    double wall_seconds = 0.0;
};

// Integrates the configured experiment and writes trajectory.csv,
// diagnostics.csv, and manifest.json into the resolved output directory.
// Step failures are retried with dt/2 up to four times; the failure
// propagates as StepFailure (with the failing time) if all retries fail.
// Output CSVs are byte-deterministic given the config.
SimulateResult run_simulate(const ExperimentConfig& cfg, std::ostream& log);

// Flat norm of a measure given as a JSON document:
//   {"points": [[...], ...], "weights": [...],
//    "metric": [[...], ...]?, "quad_weights": [...]?}
// With oracle=true the value is recomputed by the brute-force oracle instead
// of the LP (supported for measures on at most 3 points).
double run_flatnorm_text(const std::string& text, bool oracle);

struct SweepResult {
    std::string directory;  // resolved base directory holding all runs
    std::size_t runs = 0;
};

// Expands `axis_spec` ("dotted.path=v1,v2,...") over the config template: one
// run per value, each in its own subdirectory of the template's output
// directory, plus a summary.csv with rows sorted by axis value.
SweepResult run_sweep(const std::string& config_text, const std::string& axis_spec,
                      std::ostream& log);

// Prepends the MVEG_OUTPUT_ROOT environment variable to relative paths;
// absolute paths and unset environments pass through unchanged.
std::string resolve_output_dir(const std::string& configured);

}  // namespace mveg
