#include "mveg/config.hpp"

#include <string>

#include "doctest.h"
#include "mveg/errors.hpp"

using namespace mveg;

namespace {

const char* kMinimal = R"json({
  "space": {"points": [[0.0]]},
  "rates": {"family": "logistic_a2", "params": {"q1": 1.5, "q2": 1.0, "w0": 1.0}},
  "kernel": {"type": "pure_selection"},
  "initial": {"type": "dirac", "index": 0},
  "scheme": "picard",
  "dt": 0.1,
  "T": 1.0,
  "outputs": {"cadence": 0.5, "directory": "out"}
})json";

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

bool mentions(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
    ExperimentConfig cfg = parse_config_text(kMinimal);
    CHECK(cfg.space->size() == 1);
    CHECK(cfg.rates.family() == RateFamily::logistic_a2);
    CHECK(cfg.kernel.size() == 1);
    CHECK(cfg.initial.total_mass() == 1.0);
    CHECK(cfg.scheme == Scheme::picard);
    CHECK(cfg.dt == 0.1);
    CHECK(cfg.T == 1.0);
    CHECK(cfg.picard.tol == 1e-10);
    CHECK(cfg.picard.max_iter == 50);
    CHECK(cfg.outputs.cadence == 0.5);
    CHECK(cfg.outputs.directory == "out");
    CHECK_FALSE(cfg.outputs.target_index.has_value());
    CHECK_FALSE(cfg.truncation_override.has_value());
    CHECK(cfg.seed == 0);
    CHECK(mentions(cfg.echo, "logistic_a2"));
}

TEST_CASE("grid spaces and coordinate-valued parameters resolve") {
    ExperimentConfig cfg = parse_config_text(R"json({
      "space": {"grid": {"lo": [0.5, 0.5], "hi": [1.5, 1.5], "counts": [5, 5]}},
      "rates": {"family": "logistic_paper",
                "params": {"q1": {"coord": 0}, "q2": {"coord": 1}}},
      "kernel": {"type": "smoothed", "bandwidth": 0.4},
      "initial": {"type": "density", "expression": "1"},
      "scheme": "picard",
      "dt": 0.01,
      "T": 2.0,
      "picard": {"tol": 1e-9, "max_iter": 30},
      "outputs": {"cadence": 0.1, "directory": "runs/grid", "target_index": 20},
      "seed": 7
    })json");
    CHECK(cfg.space->size() == 25);
    CHECK(cfg.space->dim() == 2);
    CHECK(cfg.rates.birth(3.7, 20) == 1.5);
    CHECK(cfg.rates.death(2.0, 20) == 1.0);
    CHECK(cfg.initial.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cfg.picard.tol == 1e-9);
    CHECK(cfg.picard.max_iter == 30);
    CHECK(cfg.outputs.target_index == 20);
    CHECK(cfg.seed == 7);
}

TEST_CASE("kernel matrix with a deficient column is rejected by name") {
    std::string err = error_of(R"json({
      "space": {"points": [[0.0], [1.0]]},
      "rates": {"family": "logistic_a2", "params": {"q1": 1.5, "q2": 1.0, "w0": 1.0}},
      "kernel": {"type": "matrix", "columns": [[0.5, 0.4], [0.3, 0.7]]},
      "initial": {"type": "dirac", "index": 0},
      "scheme": "picard",
      "dt": 0.1,
      "T": 1.0,
      "outputs": {"cadence": 0.5, "directory": "out"}
    })json");
    CHECK(mentions(err, "kernel.columns"));
    CHECK(mentions(err, "column 0"));
    CHECK(mentions(err, "0.9"));
}

TEST_CASE("per-strategy vectors must match the space size") {
    std::string cfg = R"json({
      "space": {"grid": {"lo": [0.5, 0.5], "hi": [1.5, 1.5], "counts": [5, 5]}},
      "rates": {"family": "logistic_paper", "params": {"q1": [)json";
    for (int i = 0; i < 24; ++i) cfg += (i ? ", 1.0" : "1.0");
    cfg += R"json(], "q2": 1.0}},
      "kernel": {"type": "pure_selection"},
      "initial": {"type": "density", "expression": "1"},
      "scheme": "picard",
      "dt": 0.1,
      "T": 1.0,
      "outputs": {"cadence": 0.5, "directory": "out"}
    })json";
    std::string err = error_of(cfg);
    CHECK(mentions(err, "rates.params.q1"));
    CHECK(mentions(err, "expected 25"));
    CHECK(mentions(err, "got 24"));
}

TEST_CASE("all validation errors are reported together") {
    std::string err = error_of(R"json({
      "bogus": 1,
      "space": {"points": [[0.0]]},
      "rates": {"family": "nope", "params": {}},
      "kernel": {"type": "warp"},
      "initial": {"type": "dirac", "index": 3},
      "scheme": "picard",
      "dt": -0.1,
      "T": 1.0,
      "outputs": {"cadence": 0.5, "directory": ""}
    })json");
    CHECK(mentions(err, "unknown key 'bogus'"));
    CHECK(mentions(err, "rates.family"));
    CHECK(mentions(err, "kernel.type"));
    CHECK(mentions(err, "initial.index"));
    CHECK(mentions(err, "dt: must be positive"));
    CHECK(mentions(err, "outputs.directory"));
}

TEST_CASE("density initial data samples the expression over the grid") {
    std::string base = R"json({
      "space": {"grid": {"lo": [0.0], "hi": [1.0], "counts": [3]}},
      "rates": {"family": "logistic_a2", "params": {"q1": 1.5, "q2": 1.0, "w0": 1.0}},
      "kernel": {"type": "pure_selection"},
      "initial": {"type": "density", "expression": "EXPR"},
      "scheme": "picard",
      "dt": 0.1,
      "T": 1.0,
      "outputs": {"cadence": 0.5, "directory": "out"}
    })json";

    std::string flat = base;
    flat.replace(flat.find("EXPR"), 4, "2");
    ExperimentConfig cfg = parse_config_text(flat);
    std::vector<double> density(cfg.space->size(), 2.0);
    DiscreteMeasure expected = DiscreteMeasure::from_density(cfg.space, density);
    for (std::size_t i = 0; i < cfg.space->size(); ++i) CHECK(cfg.initial[i] == expected[i]);

    std::string negative = base;
    negative.replace(negative.find("EXPR"), 4, "q0 - 1");
    std::string err = error_of(negative);
    CHECK(mentions(err, "initial.expression"));
    CHECK(mentions(err, "nonnegative"));
}

TEST_CASE("time-grid divisibility is validated") {
    std::string bad_dt = kMinimal;
    bad_dt.replace(bad_dt.find("\"dt\": 0.1"), 9, "\"dt\": 0.3");
    CHECK(mentions(error_of(bad_dt), "dt: must divide"));

    std::string bad_cadence = kMinimal;
    bad_cadence.replace(bad_cadence.find("\"cadence\": 0.5"), 14, "\"cadence\": 0.4");
    CHECK(mentions(error_of(bad_cadence), "outputs.cadence: must divide T"));
}

TEST_CASE("unknown keys are rejected in nested objects") {
    CHECK(mentions(error_of(R"json({
      "space": {"points": [[0.0]], "shape": "round"},
      "rates": {"family": "logistic_a2", "params": {"q1": 1.5, "q2": 1.0, "w0": 1.0}},
      "kernel": {"type": "pure_selection", "bandwidth": 1.0},
      "initial": {"type": "dirac", "index": 0},
      "scheme": "picard",
      "dt": 0.1,
      "T": 1.0,
      "picard": {"tol": 1e-10, "iters": 3},
      "outputs": {"cadence": 0.5, "directory": "out"}
    })json"),
                  "space: unknown key 'shape'"));

    std::string err = error_of(R"json({
      "space": {"points": [[0.0]]},
      "rates": {"family": "logistic_a2", "params": {"q1": 1.5, "q2": 1.0, "w0": 1.0, "q3": 2}},
      "kernel": {"type": "pure_selection"},
      "initial": {"type": "dirac", "index": 0},
      "scheme": "picard",
      "dt": 0.1,
      "T": 1.0,
      "outputs": {"cadence": 0.5, "directory": "out"}
    })json");
    CHECK(mentions(err, "rates.params: unknown key 'q3'"));
}

TEST_CASE("range and sign problems are caught") {
    std::string bad = kMinimal;
    bad.replace(bad.find("\"type\": \"pure_selection\""), 24,
                "\"type\": \"smoothed\", \"bandwidth\": 0");
    CHECK(mentions(error_of(bad), "kernel.bandwidth"));

    std::string neg_weights = kMinimal;
    neg_weights.replace(neg_weights.find(R"json({"type": "dirac", "index": 0})json"), 29,
                        R"json({"type": "weights", "weights": [-1.0]})json");
    CHECK(mentions(error_of(neg_weights), "initial.weights[0]"));

    std::string bad_target = kMinimal;
    bad_target.replace(bad_target.find("\"directory\": \"out\""), 18,
                       "\"directory\": \"out\", \"target_index\": 5");
    CHECK(mentions(error_of(bad_target), "outputs.target_index"));

    std::string bad_seed = kMinimal;
    bad_seed.replace(bad_seed.find("\"dt\": 0.1"), 9, "\"dt\": 0.1, \"seed\": -4");
    CHECK(mentions(error_of(bad_seed), "seed"));

    std::string bad_trunc = kMinimal;
    bad_trunc.replace(bad_trunc.find(R"json("params")json"), 8,
                      R"json("truncation": -2, "params")json");
    CHECK(mentions(error_of(bad_trunc), "rates.truncation"));
}

TEST_CASE("truncation override and rk4 scheme round-trip") {
    std::string text = kMinimal;
    text.replace(text.find(R"json("params")json"), 8, R"json("truncation": 4.5, "params")json");
    text.replace(text.find("\"picard\","), 9, "\"rk4\",");
    ExperimentConfig cfg = parse_config_text(text);
    CHECK(cfg.truncation_override == 4.5);
    CHECK(cfg.scheme == Scheme::rk4);
}

TEST_CASE("syntactically broken documents fail up front") {
    CHECK(mentions(error_of("{"), "not valid JSON"));
    CHECK(mentions(error_of("[1, 2]"), "expected a JSON object"));
}
