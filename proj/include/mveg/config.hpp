#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mveg/bl_space.hpp"
#include "mveg/dynamics.hpp"
#include "mveg/strategy_space.hpp"
#include "mveg/vital_rates.hpp"

namespace mveg {

struct PicardSpec {
    double tol = 1e-10;
    std::size_t max_iter = 50;
};

struct OutputSpec {
    double cadence = 0.0;
    std::string directory;
    // Index of the strategy whose Dirac is the distance target in the
    // diagnostics. Defaults to the profile's fittest strategy at run time.
    std::optional<std::size_t> target_index;
};

// A fully validated experiment: every cross-reference (vector lengths, kernel
// dimensions, indices) has been checked against the space before any
// computation starts. `rates` are stored untruncated; the run layer applies
// the truncation policy.
struct ExperimentConfig {
    SpacePtr space;
    VitalRates rates;
    std::optional<double> truncation_override;
    MutationKernel kernel;
    DiscreteMeasure initial;
    Scheme scheme;
    double dt;
    double T;
    PicardSpec picard;
    OutputSpec outputs;
    std::uint64_t seed;
    // Canonical serialized form of the accepted document, echoed into the run
    // manifest so a run directory alone reproduces the run.
    std::string echo;
};

// Parses and validates a JSON experiment document. All validation problems
// are collected and reported together in one ConfigError, each prefixed with
// the path of the offending key; unknown keys are rejected everywhere.
//
// Document shape (see README for the full key-by-key description):
//   {
//     "space":   {"grid": {"lo": [...], "hi": [...], "counts": [...]}}
//                or {"points": [[...], ...], "metric": [[...], ...]?,
//                    "quad_weights": [...]?}
//     "rates":   {"family": "logistic_paper" | "logistic_a2" | "ricker"
//                           | "beverton_holt",
//                 "params": {...}, "truncation": number?}
//     "kernel":  {"type": "pure_selection"}
//                or {"type": "smoothed", "bandwidth": number}
//                or {"type": "matrix", "columns": [[...], ...]}
//     "initial": {"type": "dirac", "index": n, "mass": number?}
//                or {"type": "weights", "weights": [...]}
//                or {"type": "density", "expression": "..."}
//     "scheme":  "picard" | "rk4"
//     "dt": number, "T": number,
//     "picard":  {"tol": number?, "max_iter": n?}?
//     "outputs": {"cadence": number, "directory": "...", "target_index": n?}
//     "seed":    n?
//   }
//
// Rate parameters accept a number (broadcast to every strategy), an array of
// one value per strategy, or {"coord": k} meaning coordinate k of each point.
ExperimentConfig parse_config_text(const std::string& text);

ExperimentConfig parse_config_file(const std::string& path);

}  // namespace mveg
