#include "mveg/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mveg/errors.hpp"
#include "mveg/expression.hpp"

namespace mveg {

namespace {

using nlohmann::json;

struct Collector {
    std::vector<std::string> errors;

    void add(const std::string& path, const std::string& message) {
        errors.push_back(path + ": " + message);
    }

    [[noreturn]] void throw_all() const {
        std::string joined = "configuration invalid:";
        for (const auto& e : errors) joined += "\n  - " + e;
        throw ConfigError(joined);
    }
};

std::string join_path(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed, Collector& c) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) known = true;
        if (!known) c.add(path.empty() ? "(top level)" : path, "unknown key '" + item.key() + "'");
    }
}

const json* get_member(const json& obj, const std::string& path, const char* key, bool required,
                       Collector& c) {
    if (!obj.contains(key)) {
        if (required) c.add(join_path(path, key), "missing required key");
        return nullptr;
    }
    return &obj.at(key);
}

std::optional<double> as_number(const json& v, const std::string& path, Collector& c) {
    if (!v.is_number()) {
        c.add(path, "expected a number");
        return std::nullopt;
    }
    return v.get<double>();
}

std::optional<std::size_t> as_count(const json& v, const std::string& path, Collector& c) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        c.add(path, "expected a nonnegative integer");
        return std::nullopt;
    }
    return static_cast<std::size_t>(v.get<long long>());
}

std::optional<std::string> as_string(const json& v, const std::string& path, Collector& c) {
    if (!v.is_string()) {
        c.add(path, "expected a string");
        return std::nullopt;
    }
    return v.get<std::string>();
}

std::optional<std::vector<double>> as_number_array(const json& v, const std::string& path,
                                                   Collector& c) {
    if (!v.is_array()) {
        c.add(path, "expected an array of numbers");
        return std::nullopt;
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
            c.add(path + "[" + std::to_string(i) + "]", "expected a number");
            return std::nullopt;
        }
        out.push_back(v[i].get<double>());
    }
    return out;
}

SpacePtr build_space(const json& v, Collector& c) {
    if (!v.is_object()) {
        c.add("space", "expected an object");
        return nullptr;
    }
    reject_unknown_keys(v, "space", {"grid", "points", "metric", "quad_weights"}, c);

    bool has_grid = v.contains("grid");
    bool has_points = v.contains("points");
    if (has_grid == has_points) {
        c.add("space", "provide exactly one of 'grid' or 'points'");
        return nullptr;
    }

    if (has_grid) {
        if (v.contains("metric") || v.contains("quad_weights")) {
            c.add("space", "'metric' and 'quad_weights' apply only to explicit 'points'");
            return nullptr;
        }
        const json& g = v.at("grid");
        if (!g.is_object()) {
            c.add("space.grid", "expected an object");
            return nullptr;
        }
        reject_unknown_keys(g, "space.grid", {"lo", "hi", "counts"}, c);
        const json* lo_v = get_member(g, "space.grid", "lo", true, c);
        const json* hi_v = get_member(g, "space.grid", "hi", true, c);
        const json* counts_v = get_member(g, "space.grid", "counts", true, c);
        if (!lo_v || !hi_v || !counts_v) return nullptr;
        auto lo = as_number_array(*lo_v, "space.grid.lo", c);
        auto hi = as_number_array(*hi_v, "space.grid.hi", c);
        if (!counts_v->is_array()) {
            c.add("space.grid.counts", "expected an array of positive integers");
            return nullptr;
        }
        std::vector<std::size_t> counts;
        for (std::size_t i = 0; i < counts_v->size(); ++i) {
            auto n = as_count((*counts_v)[i], "space.grid.counts[" + std::to_string(i) + "]", c);
            if (!n) return nullptr;
            counts.push_back(*n);
        }
        if (!lo || !hi) return nullptr;
        try {
            return build_grid(*lo, *hi, counts);
        } catch (const std::exception& e) {
            c.add("space.grid", e.what());
            return nullptr;
        }
    }

    const json& pts = v.at("points");
    if (!pts.is_array() || pts.empty()) {
        c.add("space.points", "expected a nonempty array of coordinate arrays");
        return nullptr;
    }
    std::vector<std::vector<double>> points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto row = as_number_array(pts[i], "space.points[" + std::to_string(i) + "]", c);
        if (!row) return nullptr;
        points.push_back(std::move(*row));
    }
    std::size_t m = points.size();

    std::vector<double> dist;
    MetricChoice choice = MetricChoice::euclidean;
    if (v.contains("metric")) {
        const json& met = v.at("metric");
        if (!met.is_array() || met.size() != m) {
            c.add("space.metric", "expected " + std::to_string(m) + " rows (one per point)");
            return nullptr;
        }
        for (std::size_t i = 0; i < m; ++i) {
            auto row = as_number_array(met[i], "space.metric[" + std::to_string(i) + "]", c);
            if (!row) return nullptr;
            if (row->size() != m) {
                c.add("space.metric[" + std::to_string(i) + "]",
                      "expected " + std::to_string(m) + " entries, got " + std::to_string(row->size()));
                return nullptr;
            }
            dist.insert(dist.end(), row->begin(), row->end());
        }
        choice = MetricChoice::explicit_matrix;
    }

    std::vector<double> qw;
    if (v.contains("quad_weights")) {
        auto w = as_number_array(v.at("quad_weights"), "space.quad_weights", c);
        if (!w) return nullptr;
        if (w->size() != m) {
            c.add("space.quad_weights", "expected " + std::to_string(m) + " values (one per point), got " +
                                            std::to_string(w->size()));
            return nullptr;
        }
        qw = std::move(*w);
    }

    try {
        return build_explicit(points, choice, dist, qw, true);
    } catch (const std::exception& e) {
        c.add("space", e.what());
        return nullptr;
    }
}

// A rate parameter is a number (broadcast), an array of one value per
// strategy, or {"coord": k} selecting coordinate k of each point. When the
// space itself failed to build, only the local shape is checked.
std::optional<std::vector<double>> resolve_rate_param(const json& params, const std::string& path,
                                                      const char* key, const StrategySpace* space,
                                                      Collector& c) {
    if (!params.contains(key)) {
        c.add(join_path(path, key), "missing required key");
        return std::nullopt;
    }
    const json& v = params.at(key);
    const std::string vpath = join_path(path, key);

    if (v.is_number()) {
        if (!space) return std::nullopt;
        return std::vector<double>(space->size(), v.get<double>());
    }
    if (v.is_array()) {
        auto vec = as_number_array(v, vpath, c);
        if (!vec) return std::nullopt;
        if (space && vec->size() != space->size()) {
            c.add(vpath, "expected " + std::to_string(space->size()) +
                             " values (one per strategy point), got " + std::to_string(vec->size()));
            return std::nullopt;
        }
        if (!space) return std::nullopt;
        return vec;
    }
    if (v.is_object()) {
        reject_unknown_keys(v, vpath, {"coord"}, c);
        const json* k = get_member(v, vpath, "coord", true, c);
        if (!k) return std::nullopt;
        auto axis = as_count(*k, join_path(vpath, "coord"), c);
        if (!axis || !space) return std::nullopt;
        if (*axis >= space->dim()) {
            c.add(join_path(vpath, "coord"), "axis " + std::to_string(*axis) + " out of range; space has " +
                                                 std::to_string(space->dim()) + " coordinate(s)");
            return std::nullopt;
        }
        std::vector<double> out(space->size());
        for (std::size_t i = 0; i < space->size(); ++i) out[i] = space->coord(i, *axis);
        return out;
    }
    c.add(vpath, "expected a number, an array of numbers, or {\"coord\": k}");
    return std::nullopt;
}

std::optional<double> positive_scalar_param(const json& params, const std::string& path,
                                            const char* key, Collector& c) {
    if (!params.contains(key)) {
        c.add(join_path(path, key), "missing required key");
        return std::nullopt;
    }
    auto v = as_number(params.at(key), join_path(path, key), c);
    if (!v) return std::nullopt;
    if (!(*v > 0.0)) {
        c.add(join_path(path, key), "must be positive");
        return std::nullopt;
    }
    return v;
}

std::optional<VitalRates> build_rates(const json& v, const StrategySpace* space, Collector& c,
                                      std::optional<double>& truncation_override) {
    if (!v.is_object()) {
        c.add("rates", "expected an object");
        return std::nullopt;
    }
    reject_unknown_keys(v, "rates", {"family", "params", "truncation"}, c);

    const json* fam_v = get_member(v, "rates", "family", true, c);
    const json* params_v = get_member(v, "rates", "params", true, c);

    if (v.contains("truncation")) {
        auto n = as_number(v.at("truncation"), "rates.truncation", c);
        if (n) {
            if (!(*n > 0.0))
                c.add("rates.truncation", "must be positive");
            else
                truncation_override = *n;
        }
    }

    if (!fam_v || !params_v) return std::nullopt;
    auto family = as_string(*fam_v, "rates.family", c);
    if (!family) return std::nullopt;
    if (!params_v->is_object()) {
        c.add("rates.params", "expected an object");
        return std::nullopt;
    }
    const json& params = *params_v;
    const std::string ppath = "rates.params";

    try {
        if (*family == "logistic_paper") {
            reject_unknown_keys(params, ppath, {"q1", "q2"}, c);
            auto q1 = resolve_rate_param(params, ppath, "q1", space, c);
            auto q2 = resolve_rate_param(params, ppath, "q2", space, c);
            if (!q1 || !q2) return std::nullopt;
            return make_logistic_paper(*q1, *q2);
        }
        if (*family == "logistic_a2") {
            reject_unknown_keys(params, ppath, {"q1", "q2", "w0"}, c);
            auto q1 = resolve_rate_param(params, ppath, "q1", space, c);
            auto q2 = resolve_rate_param(params, ppath, "q2", space, c);
            auto w0 = positive_scalar_param(params, ppath, "w0", c);
            if (!q1 || !q2 || !w0) return std::nullopt;
            return make_logistic_a2(*q1, *q2, *w0);
        }
        if (*family == "ricker") {
            reject_unknown_keys(params, ppath, {"b", "c", "w0", "d1"}, c);
            auto b = resolve_rate_param(params, ppath, "b", space, c);
            auto cc = resolve_rate_param(params, ppath, "c", space, c);
            auto w0 = positive_scalar_param(params, ppath, "w0", c);
            auto d1 = resolve_rate_param(params, ppath, "d1", space, c);
            if (!b || !cc || !w0 || !d1) return std::nullopt;
            return make_ricker(*b, *cc, *w0, *d1);
        }
        if (*family == "beverton_holt") {
            reject_unknown_keys(params, ppath, {"b", "c", "w0", "d1"}, c);
            auto b = resolve_rate_param(params, ppath, "b", space, c);
            auto cc = resolve_rate_param(params, ppath, "c", space, c);
            auto w0 = positive_scalar_param(params, ppath, "w0", c);
            auto d1 = resolve_rate_param(params, ppath, "d1", space, c);
            if (!b || !cc || !w0 || !d1) return std::nullopt;
            return make_beverton_holt(*b, *cc, *w0, *d1);
        }
    } catch (const std::exception& e) {
        c.add("rates", e.what());
        return std::nullopt;
    }

    c.add("rates.family", "unknown family '" + *family +
                              "'; expected logistic_paper, logistic_a2, ricker, or beverton_holt");
    return std::nullopt;
}

std::optional<MutationKernel> build_kernel(const json& v, const SpacePtr& space, Collector& c) {
    if (!v.is_object()) {
        c.add("kernel", "expected an object");
        return std::nullopt;
    }
    const json* type_v = get_member(v, "kernel", "type", true, c);
    if (!type_v) return std::nullopt;
    auto type = as_string(*type_v, "kernel.type", c);
    if (!type) return std::nullopt;

    if (*type == "pure_selection") {
        reject_unknown_keys(v, "kernel", {"type"}, c);
        if (!space) return std::nullopt;
        return make_pure_selection(space);
    }
    if (*type == "smoothed") {
        reject_unknown_keys(v, "kernel", {"type", "bandwidth"}, c);
        const json* bw_v = get_member(v, "kernel", "bandwidth", true, c);
        if (!bw_v) return std::nullopt;
        auto bw = as_number(*bw_v, "kernel.bandwidth", c);
        if (!bw || !space) return std::nullopt;
        try {
            return make_smoothed_kernel(space, *bw);
        } catch (const std::exception& e) {
            c.add("kernel.bandwidth", e.what());
            return std::nullopt;
        }
    }
    if (*type == "matrix") {
        reject_unknown_keys(v, "kernel", {"type", "columns"}, c);
        const json* cols_v = get_member(v, "kernel", "columns", true, c);
        if (!cols_v) return std::nullopt;
        if (!cols_v->is_array()) {
            c.add("kernel.columns", "expected an array of per-parent columns");
            return std::nullopt;
        }
        if (!space) return std::nullopt;
        std::size_t m = space->size();
        if (cols_v->size() != m) {
            c.add("kernel.columns", "expected " + std::to_string(m) + " columns (one per parent), got " +
                                        std::to_string(cols_v->size()));
            return std::nullopt;
        }
        std::vector<double> data(m * m, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            auto col = as_number_array((*cols_v)[j], "kernel.columns[" + std::to_string(j) + "]", c);
            if (!col) return std::nullopt;
            if (col->size() != m) {
                c.add("kernel.columns[" + std::to_string(j) + "]",
                      "expected " + std::to_string(m) + " entries, got " + std::to_string(col->size()));
                return std::nullopt;
            }
            for (std::size_t i = 0; i < m; ++i) data[j * m + i] = (*col)[i];
        }
        try {
            return MutationKernel::checked(space, std::move(data));
        } catch (const std::exception& e) {
            c.add("kernel.columns", e.what());
            return std::nullopt;
        }
    }

    c.add("kernel.type", "unknown type '" + *type + "'; expected pure_selection, smoothed, or matrix");
    return std::nullopt;
}

std::optional<DiscreteMeasure> build_initial(const json& v, const SpacePtr& space, Collector& c) {
    if (!v.is_object()) {
        c.add("initial", "expected an object");
        return std::nullopt;
    }
    const json* type_v = get_member(v, "initial", "type", true, c);
    if (!type_v) return std::nullopt;
    auto type = as_string(*type_v, "initial.type", c);
    if (!type) return std::nullopt;

    if (*type == "dirac") {
        reject_unknown_keys(v, "initial", {"type", "index", "mass"}, c);
        const json* idx_v = get_member(v, "initial", "index", true, c);
        if (!idx_v) return std::nullopt;
        auto idx = as_count(*idx_v, "initial.index", c);
        double mass = 1.0;
        if (v.contains("mass")) {
            auto m_v = as_number(v.at("mass"), "initial.mass", c);
            if (!m_v) return std::nullopt;
            if (!(*m_v > 0.0)) {
                c.add("initial.mass", "must be positive");
                return std::nullopt;
            }
            mass = *m_v;
        }
        if (!idx || !space) return std::nullopt;
        if (*idx >= space->size()) {
            c.add("initial.index", "index " + std::to_string(*idx) + " out of range; space has " +
                                       std::to_string(space->size()) + " point(s)");
            return std::nullopt;
        }
        return DiscreteMeasure::dirac(space, *idx, mass);
    }
    if (*type == "weights") {
        reject_unknown_keys(v, "initial", {"type", "weights"}, c);
        const json* w_v = get_member(v, "initial", "weights", true, c);
        if (!w_v) return std::nullopt;
        auto w = as_number_array(*w_v, "initial.weights", c);
        if (!w || !space) return std::nullopt;
        if (w->size() != space->size()) {
            c.add("initial.weights", "expected " + std::to_string(space->size()) +
                                         " values (one per strategy point), got " + std::to_string(w->size()));
            return std::nullopt;
        }
        for (std::size_t i = 0; i < w->size(); ++i) {
            if ((*w)[i] < 0.0) {
                c.add("initial.weights[" + std::to_string(i) + "]",
                      "initial data must be nonnegative");
                return std::nullopt;
            }
        }
        return DiscreteMeasure::positive(space, std::move(*w));
    }
    if (*type == "density") {
        reject_unknown_keys(v, "initial", {"type", "expression"}, c);
        const json* e_v = get_member(v, "initial", "expression", true, c);
        if (!e_v) return std::nullopt;
        auto text = as_string(*e_v, "initial.expression", c);
        if (!text || !space) return std::nullopt;
        try {
            Expression expr = Expression::parse(*text, space->dim());
            std::vector<double> density(space->size());
            for (std::size_t i = 0; i < space->size(); ++i) {
                double d = expr.eval(space->points()[i]);
                if (!std::isfinite(d) || d < 0.0) {
                    c.add("initial.expression", "density must be finite and nonnegative; got " +
                                                    std::to_string(d) + " at point " + std::to_string(i));
                    return std::nullopt;
                }
                density[i] = d;
            }
            return DiscreteMeasure::from_density(space, density);
        } catch (const std::exception& e) {
            c.add("initial.expression", e.what());
            return std::nullopt;
        }
    }

    c.add("initial.type", "unknown type '" + *type + "'; expected dirac, weights, or density");
    return std::nullopt;
}

// Relative test for "a divides b"; both already validated positive.
bool divides(double a, double b) {
    double ratio = b / a;
    return std::abs(ratio - std::llround(ratio)) <= 1e-9 * std::max(1.0, std::abs(ratio));
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    Collector c;
    if (!doc.is_object()) {
        c.add("(top level)", "expected a JSON object");
        c.throw_all();
    }
    reject_unknown_keys(doc, "",
                        {"space", "rates", "kernel", "initial", "scheme", "dt", "T", "picard",
                         "outputs", "seed"},
                        c);

    SpacePtr space;
    if (const json* v = get_member(doc, "", "space", true, c)) space = build_space(*v, c);

    std::optional<double> truncation_override;
    std::optional<VitalRates> rates;
    if (const json* v = get_member(doc, "", "rates", true, c))
        rates = build_rates(*v, space.get(), c, truncation_override);

    std::optional<MutationKernel> kernel;
    if (const json* v = get_member(doc, "", "kernel", true, c)) kernel = build_kernel(*v, space, c);

    std::optional<DiscreteMeasure> initial;
    if (const json* v = get_member(doc, "", "initial", true, c)) initial = build_initial(*v, space, c);

    Scheme scheme = Scheme::picard;
    if (const json* v = get_member(doc, "", "scheme", true, c)) {
        auto s = as_string(*v, "scheme", c);
        if (s) {
            if (*s == "picard")
                scheme = Scheme::picard;
            else if (*s == "rk4")
                scheme = Scheme::rk4;
            else
                c.add("scheme", "unknown scheme '" + *s + "'; expected picard or rk4");
        }
    }

    std::optional<double> dt;
    if (const json* v = get_member(doc, "", "dt", true, c)) {
        dt = as_number(*v, "dt", c);
        if (dt && !(*dt > 0.0)) {
            c.add("dt", "must be positive");
            dt.reset();
        }
    }

    std::optional<double> T;
    if (const json* v = get_member(doc, "", "T", true, c)) {
        T = as_number(*v, "T", c);
        if (T && *T < 0.0) {
            c.add("T", "must be nonnegative");
            T.reset();
        }
    }

    PicardSpec picard;
    if (doc.contains("picard")) {
        const json& p = doc.at("picard");
        if (!p.is_object()) {
            c.add("picard", "expected an object");
        } else {
            reject_unknown_keys(p, "picard", {"tol", "max_iter"}, c);
            if (p.contains("tol")) {
                auto tol = as_number(p.at("tol"), "picard.tol", c);
                if (tol) {
                    if (!(*tol > 0.0))
                        c.add("picard.tol", "must be positive");
                    else
                        picard.tol = *tol;
                }
            }
            if (p.contains("max_iter")) {
                auto mi = as_count(p.at("max_iter"), "picard.max_iter", c);
                if (mi) {
                    if (*mi < 1)
                        c.add("picard.max_iter", "must be at least 1");
                    else
                        picard.max_iter = *mi;
                }
            }
        }
    }

    OutputSpec outputs;
    std::optional<double> cadence;
    if (const json* v = get_member(doc, "", "outputs", true, c)) {
        if (!v->is_object()) {
            c.add("outputs", "expected an object");
        } else {
            reject_unknown_keys(*v, "outputs", {"cadence", "directory", "target_index"}, c);
            if (const json* cv = get_member(*v, "outputs", "cadence", true, c)) {
                cadence = as_number(*cv, "outputs.cadence", c);
                if (cadence && !(*cadence > 0.0)) {
                    c.add("outputs.cadence", "must be positive");
                    cadence.reset();
                }
            }
            if (const json* dv = get_member(*v, "outputs", "directory", true, c)) {
                auto dir = as_string(*dv, "outputs.directory", c);
                if (dir) {
                    if (dir->empty())
                        c.add("outputs.directory", "must be nonempty");
                    else
                        outputs.directory = *dir;
                }
            }
            if (v->contains("target_index")) {
                auto idx = as_count(v->at("target_index"), "outputs.target_index", c);
                if (idx && space && *idx >= space->size())
                    c.add("outputs.target_index", "index " + std::to_string(*idx) +
                                                      " out of range; space has " +
                                                      std::to_string(space->size()) + " point(s)");
                else if (idx)
                    outputs.target_index = *idx;
            }
        }
    }

    std::uint64_t seed = 0;
    if (doc.contains("seed")) {
        const json& sv = doc.at("seed");
        if (sv.is_number_unsigned())
            seed = sv.get<std::uint64_t>();
        else if (sv.is_number_integer() && sv.get<long long>() >= 0)
            seed = static_cast<std::uint64_t>(sv.get<long long>());
        else
            c.add("seed", "expected a nonnegative integer");
    }

    if (dt && T && *T > 0.0 && !divides(*dt, *T)) c.add("dt", "must divide T");
    if (dt && cadence && !divides(*dt, *cadence)) c.add("dt", "must divide outputs.cadence");
    if (cadence && T && *T > 0.0 && !divides(*cadence, *T))
        c.add("outputs.cadence", "must divide T");

    if (!c.errors.empty()) c.throw_all();
    if (!space || !rates || !kernel || !initial || !dt || !T || !cadence)
        throw InternalError("config validation reported no errors but left parts unbuilt");
    outputs.cadence = *cadence;

    return ExperimentConfig{std::move(space),
                            std::move(*rates),
                            truncation_override,
                            std::move(*kernel),
                            std::move(*initial),
                            scheme,
                            *dt,
                            *T,
                            picard,
                            outputs,
                            seed,
                            doc.dump(2)};
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace mveg
