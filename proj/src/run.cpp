#include "mveg/run.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <vector>

#include "json.hpp"
#include "mveg/asymptotics.hpp"
#include "mveg/errors.hpp"
#include "mveg/flat_norm_oracle.hpp"
#include "mveg/version.hpp"

namespace mveg {

namespace {

using nlohmann::json;

// 17 significant digits: enough to round-trip an IEEE double exactly.
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// One-sided second-order residual for the cadence ticks at the trajectory
// boundary, where the library's central difference is undefined.
double boundary_residual(const Trajectory& traj, const BLFunction& g, std::size_t k) {
    const std::size_t n = traj.size();
    if (n < 2) return 0.0;
    const double h = traj.time(1) - traj.time(0);
    double deriv = 0.0;
    if (k == 0) {
        if (n >= 3) {
            deriv = (-3.0 * pair(traj.state(0), g) + 4.0 * pair(traj.state(1), g) -
                     pair(traj.state(2), g)) /
                    (2.0 * h);
        } else {
            deriv = (pair(traj.state(1), g) - pair(traj.state(0), g)) / h;
        }
    } else {
        if (n >= 3) {
            deriv = (3.0 * pair(traj.state(n - 1), g) - 4.0 * pair(traj.state(n - 2), g) +
                     pair(traj.state(n - 3), g)) /
                    (2.0 * h);
        } else {
            deriv = (pair(traj.state(n - 1), g) - pair(traj.state(n - 2), g)) / h;
        }
    }
    DiscreteMeasure f = vector_field(traj.state(k), traj.gamma(), traj.rates());
    return std::abs(deriv - pair(f, g));
}

struct TargetSpec {
    std::size_t index;
    double mass;
};

}  // namespace

std::string resolve_output_dir(const std::string& configured) {
    namespace fs = std::filesystem;
    fs::path p(configured);
    const char* root = std::getenv("MVEG_OUTPUT_ROOT");
    if (root != nullptr && *root != '\0' && p.is_relative()) return (fs::path(root) / p).string();
    return p.string();
}

SimulateResult run_simulate(const ExperimentConfig& cfg, std::ostream& log) {
    namespace fs = std::filesystem;
    const auto t_start = std::chrono::steady_clock::now();

    const StrategySpace& space = *cfg.space;
    const std::size_t m = space.size();

    AsymptoticProfile prof = profile(cfg.rates, space);

    std::optional<double> truncation = cfg.truncation_override;
    if (!truncation && prof.k_diamond) truncation = std::ceil(*prof.k_diamond) + 1.0;
    VitalRates rates_run = truncation ? truncate(cfg.rates, *truncation) : cfg.rates;

    std::optional<TargetSpec> target;
    std::optional<std::size_t> target_index = cfg.outputs.target_index;
    if (!target_index) target_index = prof.fittest;
    if (target_index) {
        double mass = 1.0;
        if (prof.capacity[*target_index]) mass = *prof.capacity[*target_index];
        target = TargetSpec{*target_index, mass};
    }

    EvolveOptions opts;
    opts.picard_tol = cfg.picard.tol;
    opts.picard_max_iter = cfg.picard.max_iter;

    double dt = cfg.dt;
    std::size_t retries = 0;
    std::optional<Trajectory> traj;
    while (!traj) {
        try {
            traj.emplace(evolve(cfg.initial, cfg.kernel, rates_run, cfg.T, cfg.scheme, dt, opts));
            break;
        } catch (const StepFailure& e) {
            if (retries == 4)
                throw StepFailure(std::string(e.what()) + " (giving up after 4 dt retries)", e.t);
            ++retries;
            dt /= 2.0;
            log << "step failed at t=" << fmt17(e.t) << "; retrying with dt=" << fmt17(dt) << "\n";
        }
    }

    const std::string dir = resolve_output_dir(cfg.outputs.directory);
    fs::create_directories(dir);

    // Cadence tick -> trajectory sample stride. Both divisibilities were
    // validated at parse time, and dt halving preserves them.
    std::size_t stride = 1;
    if (traj->size() > 1) stride = static_cast<std::size_t>(std::llround(cfg.outputs.cadence / dt));
    std::vector<std::size_t> ticks;
    for (std::size_t k = 0; k < traj->size(); k += stride) ticks.push_back(k);
    if (traj->size() == 1) ticks = {0};

    {
        std::ofstream out(fs::path(dir) / "trajectory.csv");
        out << "t";
        for (std::size_t i = 0; i < m; ++i) out << ",w_" << i;
        out << "\n";
        for (std::size_t k : ticks) {
            out << fmt17(traj->time(k));
            const DiscreteMeasure& mu = traj->state(k);
            for (std::size_t i = 0; i < m; ++i) out << "," << fmt17(mu[i]);
            out << "\n";
        }
    }

    BLFunction g1 = BLFunction::constant(cfg.space, 1.0);
    std::optional<DiscreteMeasure> target_mu;
    if (target) target_mu = DiscreteMeasure::dirac(cfg.space, target->index, target->mass);

    std::optional<double> final_target_distance;
    {
        std::ofstream out(fs::path(dir) / "diagnostics.csv");
        out << "t,total_mass";
        for (std::size_t a = 0; a < space.dim(); ++a) out << ",mean_q" << a;
        if (target) out << ",flat_distance_to_target";
        out << ",min_weight,residual_g1\n";
        for (std::size_t k : ticks) {
            const DiscreteMeasure& mu = traj->state(k);
            const double mass = mu.total_mass();
            out << fmt17(traj->time(k)) << "," << fmt17(mass);
            for (std::size_t a = 0; a < space.dim(); ++a) {
                double mean = 0.0;
                if (std::abs(mass) > 1e-300) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < m; ++i) s += mu[i] * space.coord(i, a);
                    mean = s / mass;
                }
                out << "," << fmt17(mean);
            }
            if (target) {
                double d = flat_distance(mu, *target_mu);
                out << "," << fmt17(d);
                if (k == ticks.back()) final_target_distance = d;
            }
            double residual = (k == 0 || k + 1 == traj->size())
                                  ? boundary_residual(*traj, g1, k)
                                  : constraint_residual(*traj, g1, traj->time(k));
            out << "," << fmt17(mu.min_weight()) << "," << fmt17(residual) << "\n";
        }
    }

    DissipativityReport diss;
    if (traj->size() >= 2) diss = dissipativity_check(*traj, prof, 0.75 * cfg.T, 0.01, 1e-6);

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    json manifest;
    manifest["command"] = "simulate";
    manifest["version"] = kVersion;
    manifest["config"] = json::parse(cfg.echo);
    manifest["dt_requested"] = cfg.dt;
    manifest["dt_used"] = dt;
    manifest["retries"] = retries;
    manifest["truncation"] = truncation ? json(*truncation) : json(nullptr);
    manifest["target_index"] = target ? json(target->index) : json(nullptr);
    manifest["target_mass"] = target ? json(target->mass) : json(nullptr);
    manifest["profile"]["varpi"] = prof.varpi;
    manifest["profile"]["k_diamond"] = prof.k_diamond ? json(*prof.k_diamond) : json(nullptr);
    manifest["profile"]["fittest"] = prof.fittest ? json(*prof.fittest) : json(nullptr);
    manifest["dissipativity"]["applicable"] = diss.applicable;
    manifest["dissipativity"]["pass"] = diss.pass();
    manifest["files"] = json::array({"trajectory.csv", "diagnostics.csv"});
    manifest["wall_time_seconds"] = wall;
    {
        std::ofstream out(fs::path(dir) / "manifest.json");
        out << manifest.dump(2) << "\n";
    }

    SimulateResult result;
    result.directory = dir;
    result.dt_used = dt;
    result.retries = retries;
    result.final_mass = traj->state(traj->size() - 1).total_mass();
    result.final_target_distance = final_target_distance;
    result.dissipativity_applicable = diss.applicable;
    result.dissipativity_pass = diss.pass();
    result.wall_seconds = wall;

    log << "wrote " << dir << " (" << ticks.size() << " rows, dt=" << fmt17(dt)
        << ", wall=" << fmt17(wall) << "s)\n";
    return result;
}

double run_flatnorm_text(const std::string& text, bool oracle) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("flatnorm input is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("flatnorm input: expected a JSON object");
    for (const auto& item : doc.items()) {
        if (item.key() != "points" && item.key() != "weights" && item.key() != "metric" &&
            item.key() != "quad_weights")
            throw ConfigError("flatnorm input: unknown key '" + item.key() + "'");
    }
    if (!doc.contains("points") || !doc.contains("weights"))
        throw ConfigError("flatnorm input: 'points' and 'weights' are both required");

    const json& pts = doc.at("points");
    if (!pts.is_array() || pts.empty())
        throw ConfigError("flatnorm input: 'points' must be a nonempty array of coordinate arrays");
    std::vector<std::vector<double>> points;
    for (const auto& row : pts) {
        if (!row.is_array()) throw ConfigError("flatnorm input: each point must be an array");
        std::vector<double> coords;
        for (const auto& v : row) {
            if (!v.is_number()) throw ConfigError("flatnorm input: coordinates must be numbers");
            coords.push_back(v.get<double>());
        }
        points.push_back(std::move(coords));
    }
    const std::size_t m = points.size();

    const json& w_v = doc.at("weights");
    if (!w_v.is_array() || w_v.size() != m)
        throw ConfigError("flatnorm input: 'weights' must have one value per point");
    std::vector<double> weights;
    for (const auto& v : w_v) {
        if (!v.is_number()) throw ConfigError("flatnorm input: weights must be numbers");
        weights.push_back(v.get<double>());
    }

    MetricChoice choice = MetricChoice::euclidean;
    std::vector<double> dist;
    if (doc.contains("metric")) {
        const json& met = doc.at("metric");
        if (!met.is_array() || met.size() != m)
            throw ConfigError("flatnorm input: 'metric' must have one row per point");
        for (const auto& row : met) {
            if (!row.is_array() || row.size() != m)
                throw ConfigError("flatnorm input: 'metric' rows must have one entry per point");
            for (const auto& v : row) {
                if (!v.is_number()) throw ConfigError("flatnorm input: metric entries must be numbers");
                dist.push_back(v.get<double>());
            }
        }
        choice = MetricChoice::explicit_matrix;
    }

    std::vector<double> qw;
    if (doc.contains("quad_weights")) {
        const json& q = doc.at("quad_weights");
        if (!q.is_array() || q.size() != m)
            throw ConfigError("flatnorm input: 'quad_weights' must have one value per point");
        for (const auto& v : q) {
            if (!v.is_number())
                throw ConfigError("flatnorm input: quad_weights entries must be numbers");
            qw.push_back(v.get<double>());
        }
    }

    SpacePtr space = build_explicit(points, choice, dist, qw, true);
    DiscreteMeasure mu(space, std::move(weights));

    if (oracle) {
        std::size_t support = 0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (mu[i] != 0.0) ++support;
        if (support > kOracleMaxSupport)
            throw ConfigError("the oracle supports measures on at most " +
                              std::to_string(kOracleMaxSupport) + " points; this one sits on " +
                              std::to_string(support));
        return flat_norm_bruteforce(mu);
    }
    return flat_norm(mu);
}

SweepResult run_sweep(const std::string& config_text, const std::string& axis_spec,
                      std::ostream& log) {
    namespace fs = std::filesystem;

    const std::size_t eq = axis_spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("axis spec must look like dotted.path=v1,v2,...");
    const std::string path = axis_spec.substr(0, eq);
    const std::string value_list = axis_spec.substr(eq + 1);

    struct AxisValue {
        double value;
        std::string token;
    };
    std::vector<AxisValue> values;
    std::size_t pos = 0;
    while (pos <= value_list.size()) {
        std::size_t comma = value_list.find(',', pos);
        std::string token = value_list.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (token.empty()) throw ConfigError("axis spec has an empty value");
        char* end = nullptr;
        double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size() || !std::isfinite(v))
            throw ConfigError("axis value '" + token + "' is not a finite number");
        values.push_back({v, token});
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (values.empty()) throw ConfigError("axis spec has no values");
    std::stable_sort(values.begin(), values.end(),
                     [](const AxisValue& a, const AxisValue& b) { return a.value < b.value; });

    json doc;
    try {
        doc = json::parse(config_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    if (!doc.contains("outputs") || !doc.at("outputs").is_object() ||
        !doc.at("outputs").contains("directory") || !doc.at("outputs").at("directory").is_string())
        throw ConfigError("sweep template must set outputs.directory");
    const std::string base_configured = doc.at("outputs").at("directory").get<std::string>();

    std::vector<std::string> segments;
    {
        std::size_t start = 0;
        while (start <= path.size()) {
            std::size_t dot = path.find('.', start);
            std::string seg =
                path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (seg.empty()) throw ConfigError("axis path has an empty segment");
            segments.push_back(seg);
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
    }
    const std::string leaf = segments.back();

    struct Row {
        double value;
        std::string name;
        SimulateResult result;
    };
    std::vector<Row> rows;

    for (const AxisValue& av : values) {
        json run_doc = doc;
        json* cur = &run_doc;
        for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
            json& next = (*cur)[segments[s]];
            if (!next.is_null() && !next.is_object())
                throw ConfigError("axis path '" + path + "' traverses a non-object at '" +
                                  segments[s] + "'");
            if (next.is_null()) next = json::object();
            cur = &next;
        }
        (*cur)[leaf] = av.value;

        std::string name = leaf + "=";
        for (char ch : av.token)
            name += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' ||
                     ch == '_')
                        ? ch
                        : '_';
        run_doc["outputs"]["directory"] = base_configured + "/" + name;

        log << "sweep " << path << " = " << av.token << "\n";
        ExperimentConfig cfg = parse_config_text(run_doc.dump());
        SimulateResult res = run_simulate(cfg, log);
        rows.push_back({av.value, name, res});
    }

    const std::string base_dir = resolve_output_dir(base_configured);
    fs::create_directories(base_dir);
    {
        std::ofstream out(fs::path(base_dir) / "summary.csv");
        out << "axis_path,axis_value,directory,final_mass,final_target_distance,dissipativity\n";
        for (const Row& r : rows) {
            out << path << "," << fmt17(r.value) << "," << r.name << ","
                << fmt17(r.result.final_mass) << ",";
            if (r.result.final_target_distance) out << fmt17(*r.result.final_target_distance);
            out << ",";
            if (!r.result.dissipativity_applicable)
                out << "na";
            else
                out << (r.result.dissipativity_pass ? "pass" : "fail");
            out << "\n";
        }
    }

    SweepResult result;
    result.directory = base_dir;
    result.runs = rows.size();
    log << "wrote " << (fs::path(base_dir) / "summary.csv").string() << " (" << rows.size()
        << " runs)\n";
    return result;
}

}  // namespace mveg
