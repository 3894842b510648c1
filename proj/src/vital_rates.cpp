#include "mveg/vital_rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mveg/errors.hpp"

namespace mveg {

namespace {

constexpr double kMonotoneTol = 1e-12;

void require_rate_vector(const std::string& name, const std::vector<double>& v,
                         std::size_t expected) {
    if (v.size() != expected) {
        throw DimensionError("parameter '" + name + "' has " + std::to_string(v.size()) +
                             " entries, expected " + std::to_string(expected));
    }
    for (double x : v) {
        if (!std::isfinite(x)) throw ConfigError("parameter '" + name + "' must be finite");
        if (x < 0.0) throw ConfigError("parameter '" + name + "' must be nonnegative");
    }
}

}  // namespace

std::string family_name(RateFamily f) {
    switch (f) {
        case RateFamily::logistic_paper: return "logistic_paper";
        case RateFamily::logistic_a2: return "logistic_a2";
        case RateFamily::ricker: return "ricker";
        case RateFamily::beverton_holt: return "beverton_holt";
        case RateFamily::custom: return "custom";
    }
    throw InternalError("unknown rate family");
}

VitalRates::VitalRates(RateFamily family, Rate birth, Rate death, std::size_t strategies,
                       bool a1_compliant, bool a2_compliant,
                       std::map<std::string, std::vector<double>> params)
    : family_(family),
      birth_(std::move(birth)),
      death_(std::move(death)),
      strategies_(strategies),
      a1_(a1_compliant),
      a2_(a2_compliant),
      params_(std::move(params)) {
    if (strategies_ == 0) throw ConfigError("vital rates need at least one strategy");
    if (!birth_ || !death_) throw ConfigError("vital rates need both birth and death callables");
}

double VitalRates::birth(double X, std::size_t i) const {
    if (i >= strategies_) throw DimensionError("strategy index out of range in birth rate");
    return birth_(X, i);
}

double VitalRates::death(double X, std::size_t i) const {
    if (i >= strategies_) throw DimensionError("strategy index out of range in death rate");
    return death_(X, i);
}

const std::vector<double>& VitalRates::param(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) {
        throw ConfigError("rate family " + family_name(family_) + " has no parameter '" + name +
                          "'");
    }
    return it->second;
}

VitalRates make_logistic_paper(const std::vector<double>& q1, const std::vector<double>& q2) {
    if (q1.empty()) throw ConfigError("logistic_paper needs at least one strategy");
    require_rate_vector("q1", q1, q1.size());
    require_rate_vector("q2", q2, q1.size());
    auto birth = [q1](double, std::size_t i) { return q1[i]; };
    auto death = [q2](double X, std::size_t i) { return q2[i] * X; };
    return VitalRates(RateFamily::logistic_paper, birth, death, q1.size(),
                      /*a1_compliant=*/true, /*a2_compliant=*/false,
                      {{"q1", q1}, {"q2", q2}});
}

VitalRates make_logistic_a2(const std::vector<double>& q1, const std::vector<double>& q2,
                            double w0) {
    if (q1.empty()) throw ConfigError("logistic_a2 needs at least one strategy");
    require_rate_vector("q1", q1, q1.size());
    require_rate_vector("q2", q2, q1.size());
    if (!std::isfinite(w0) || w0 <= 0.0) {
        throw ConfigError("logistic_a2 needs a positive mortality floor w0");
    }
    auto birth = [q1](double, std::size_t i) { return q1[i]; };
    auto death = [q2, w0](double X, std::size_t i) { return w0 + q2[i] * X; };
    return VitalRates(RateFamily::logistic_a2, birth, death, q1.size(),
                      /*a1_compliant=*/true, /*a2_compliant=*/true,
                      {{"q1", q1}, {"q2", q2}, {"w0", {w0}}});
}

VitalRates make_ricker(const std::vector<double>& b, const std::vector<double>& c, double w0,
                       const std::vector<double>& d1) {
    if (b.empty()) throw ConfigError("ricker needs at least one strategy");
    require_rate_vector("b", b, b.size());
    require_rate_vector("c", c, b.size());
    require_rate_vector("d1", d1, b.size());
    if (!std::isfinite(w0) || w0 <= 0.0) {
        throw ConfigError("ricker needs a positive mortality floor w0");
    }
    auto birth = [b, c](double X, std::size_t i) { return b[i] * std::exp(-c[i] * X); };
    auto death = [w0, d1](double X, std::size_t i) { return w0 + d1[i] * X; };
    return VitalRates(RateFamily::ricker, birth, death, b.size(),
                      /*a1_compliant=*/true, /*a2_compliant=*/true,
                      {{"b", b}, {"c", c}, {"w0", {w0}}, {"d1", d1}});
}

VitalRates make_beverton_holt(const std::vector<double>& b, const std::vector<double>& c,
                              double w0, const std::vector<double>& d1) {
    if (b.empty()) throw ConfigError("beverton_holt needs at least one strategy");
    require_rate_vector("b", b, b.size());
    require_rate_vector("c", c, b.size());
    require_rate_vector("d1", d1, b.size());
    if (!std::isfinite(w0) || w0 <= 0.0) {
        throw ConfigError("beverton_holt needs a positive mortality floor w0");
    }
    auto birth = [b, c](double X, std::size_t i) { return b[i] / (1.0 + c[i] * X); };
    auto death = [w0, d1](double X, std::size_t i) { return w0 + d1[i] * X; };
    return VitalRates(RateFamily::beverton_holt, birth, death, b.size(),
                      /*a1_compliant=*/true, /*a2_compliant=*/true,
                      {{"b", b}, {"c", c}, {"w0", {w0}}, {"d1", d1}});
}

VitalRates make_custom(VitalRates::Rate birth, VitalRates::Rate death, std::size_t strategies,
                       bool a1_compliant, bool a2_compliant) {
    return VitalRates(RateFamily::custom, std::move(birth), std::move(death), strategies,
                      a1_compliant, a2_compliant, {});
}

VitalRates truncate(const VitalRates& r, double N) {
    if (!std::isfinite(N) || N <= 0.0) {
        throw ConfigError("truncation level must be positive and finite");
    }
    auto clamp_arg = [N](double X) { return std::clamp(X, 0.0, N); };
    auto birth = [inner = r.birth_, clamp_arg](double X, std::size_t i) {
        return inner(clamp_arg(X), i);
    };
    auto death = [inner = r.death_, clamp_arg](double X, std::size_t i) {
        return inner(clamp_arg(X), i);
    };
    VitalRates out(r.family_, birth, death, r.strategies_, r.a1_, r.a2_, r.params_);
    out.truncation_N_ = N;
    return out;
}

AssumptionReport check_assumptions(const VitalRates& r, const std::vector<double>& x_grid) {
    if (x_grid.size() < 2) throw ConfigError("assumption check needs at least two grid points");
    std::vector<double> grid = x_grid;
    std::sort(grid.begin(), grid.end());
    for (double x : grid) {
        if (!std::isfinite(x) || x < 0.0) {
            throw ConfigError("assumption check grid must be nonnegative and finite");
        }
    }

    AssumptionReport report;
    report.varpi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.strategies(); ++i) {
        report.varpi = std::min(report.varpi, r.death(0.0, i));
    }
    if (!(report.varpi > 0.0)) report.a2_ok = false;

    for (std::size_t i = 0; i < r.strategies(); ++i) {
        for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
            const double lo = grid[k];
            const double hi = grid[k + 1];
            if (hi <= lo) continue;
            const double slack = kMonotoneTol * (1.0 + std::abs(lo) + std::abs(hi));
            if (report.a1_ok && r.birth(hi, i) > r.birth(lo, i) + slack) {
                report.a1_ok = false;
                report.a1_witness = AssumptionWitness{i, lo, hi};
            }
            if (report.a2_ok && r.death(hi, i) < r.death(lo, i) - slack) {
                report.a2_ok = false;
                report.a2_witness = AssumptionWitness{i, lo, hi};
            }
            if (!report.a1_ok && !report.a2_ok) break;
        }
    }
    return report;
}

double sampled_lipschitz_in_x(const VitalRates& r, double N, std::size_t samples) {
    if (!(N > 0.0) || !std::isfinite(N)) {
        throw ConfigError("Lipschitz sampling needs a positive finite range");
    }
    if (samples < 2) throw ConfigError("Lipschitz sampling needs at least two samples");
    const double dx = N / static_cast<double>(samples - 1);
    double best = 0.0;
    for (std::size_t i = 0; i < r.strategies(); ++i) {
        double prev_b = r.birth(0.0, i);
        double prev_d = r.death(0.0, i);
        for (std::size_t k = 1; k < samples; ++k) {
            const double x = dx * static_cast<double>(k);
            const double b = r.birth(x, i);
            const double d = r.death(x, i);
            best = std::max(best, std::abs(b - prev_b) / dx);
            best = std::max(best, std::abs(d - prev_d) / dx);
            prev_b = b;
            prev_d = d;
        }
    }
    return best;
}

}  // namespace mveg
