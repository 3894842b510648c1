#include "mveg/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mveg/errors.hpp"

namespace mveg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double basic_reproduction_number(const VitalRates& rates, std::size_t i) {
    const double b0 = rates.birth(0.0, i);
    const double d0 = rates.death(0.0, i);
    if (d0 > 0.0) return b0 / d0;
    if (b0 > 0.0) return kInf;
    return 0.0;  // no births and no deaths at zero density: treat as subcritical
}

}  // namespace

double reproduction_number(const VitalRates& rates, double s, std::size_t i) {
    if (!std::isfinite(s) || s < 0.0) {
        throw ConfigError("reproduction number needs a nonnegative density");
    }
    const double d = rates.death(s, i);
    if (d <= 0.0) {
        throw NumericsError("reproduction number undefined: D(" + std::to_string(s) +
                            ", strategy " + std::to_string(i) + ") = 0");
    }
    return rates.birth(s, i) / d;
}

std::optional<double> carrying_capacity(const VitalRates& rates, std::size_t i, double s_max,
                                        double tol) {
    if (i >= rates.strategies()) throw DimensionError("strategy index out of range");
    if (!(s_max > 0.0) || !std::isfinite(s_max)) {
        throw ConfigError("carrying capacity needs a positive finite bracket");
    }
    if (!(tol > 0.0)) throw ConfigError("carrying capacity needs a positive tolerance");

    const double r0 = basic_reproduction_number(rates, i);
    if (r0 < 1.0 - tol) return std::nullopt;
    if (std::abs(r0 - 1.0) <= tol) return 0.0;

    auto excess = [&](double s) { return rates.birth(s, i) - rates.death(s, i); };
    if (excess(s_max) >= 0.0) {
        throw NumericsError("reproduction number stays at or above 1 on [0, " +
                            std::to_string(s_max) + "] for strategy " + std::to_string(i) +
                            "; increase s_max");
    }

    double lo = 0.0;
    double hi = s_max;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) >= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double k = 0.5 * (lo + hi);
    const double d = rates.death(k, i);
    if (d <= 0.0 || std::abs(rates.birth(k, i) / d - 1.0) >= tol) {
        throw NumericsError("bisection for strategy " + std::to_string(i) +
                            " did not reach the reproduction-number tolerance");
    }
    return k;
}

AsymptoticProfile profile(const VitalRates& rates, const StrategySpace& space,
                          const CapacityOptions& opts) {
    const std::size_t m = rates.strategies();
    if (m != space.size()) {
        throw DimensionError("rates cover " + std::to_string(m) + " strategies but the space has " +
                             std::to_string(space.size()) + " points");
    }

    AsymptoticProfile out;
    out.r0.resize(m);
    out.capacity.resize(m);
    out.varpi = kInf;
    for (std::size_t i = 0; i < m; ++i) out.varpi = std::min(out.varpi, rates.death(0.0, i));

    if (rates.family() == RateFamily::logistic_paper) {
        // Mortality vanishes at zero density, so R0 is the +infinity limit and
        // the capacity is the closed-form crossing q1/q2 of B = D.
        const auto& q1 = rates.param("q1");
        const auto& q2 = rates.param("q2");
        for (std::size_t i = 0; i < m; ++i) {
            if (q1[i] > 0.0) {
                if (q2[i] <= 0.0) {
                    throw NumericsError("strategy " + std::to_string(i) +
                                        " has births but no density-dependent mortality; no "
                                        "carrying capacity exists");
                }
                out.r0[i] = kInf;
                out.capacity[i] = q1[i] / q2[i];
            } else {
                out.r0[i] = 0.0;
                out.capacity[i] = std::nullopt;
            }
        }
    } else {
        double s_max = 0.0;
        if (opts.s_max.has_value()) {
            s_max = *opts.s_max;
        } else {
            if (!(out.varpi > 0.0)) {
                throw ConfigError(
                    "rates have no mortality floor at zero density; provide s_max explicitly");
            }
            double max_b0 = 0.0;
            for (std::size_t i = 0; i < m; ++i) max_b0 = std::max(max_b0, rates.birth(0.0, i));
            s_max = 10.0 * max_b0 / out.varpi;
        }
        if (!(s_max > 0.0)) {
            throw ConfigError("carrying-capacity bracket must be positive; got s_max = " +
                              std::to_string(s_max));
        }
        out.s_max = s_max;
        for (std::size_t i = 0; i < m; ++i) {
            out.r0[i] = basic_reproduction_number(rates, i);
            out.capacity[i] = carrying_capacity(rates, i, s_max, opts.tol);
        }
    }

    for (std::size_t i = 0; i < m; ++i) {
        if (!out.capacity[i].has_value()) continue;
        const double k = *out.capacity[i];
        if (!out.k_diamond.has_value() || k > *out.k_diamond) {
            out.k_diamond = k;
            out.fittest = i;
        }
        if (!out.k_floor.has_value() || k < *out.k_floor) out.k_floor = k;
    }
    return out;
}

DissipativityReport dissipativity_check(const Trajectory& traj, const AsymptoticProfile& prof,
                                        double burn_in, double slack, double derivative_tol) {
    if (!std::isfinite(burn_in) || burn_in < 0.0) {
        throw ConfigError("dissipativity check needs a nonnegative burn-in");
    }
    if (slack < 0.0) throw ConfigError("dissipativity check needs nonnegative slack");
    if (traj.times().back() <= burn_in && traj.size() > 1) {
        throw ConfigError("trajectory ends at t = " + std::to_string(traj.times().back()) +
                          ", before the burn-in " + std::to_string(burn_in));
    }

    DissipativityReport report;
    if (!prof.k_diamond.has_value()) return report;
    report.applicable = true;
    const double kd = *prof.k_diamond;
    report.bound = kd + slack;

    const std::vector<double> masses = traj.masses();
    const auto& times = traj.times();
    const std::size_t n = masses.size();

    report.sup_after_burn_in = -kInf;
    for (std::size_t k = 0; k < n; ++k) {
        if (times[k] >= burn_in) {
            report.sup_after_burn_in = std::max(report.sup_after_burn_in, masses[k]);
        }
    }
    report.eventually_bounded = report.sup_after_burn_in <= report.bound;

    report.worst_derivative_above = -kInf;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (masses[k] > kd) {
            ++report.samples_above;
            const double deriv = (masses[k + 1] - masses[k]) / (times[k + 1] - times[k]);
            report.worst_derivative_above = std::max(report.worst_derivative_above, deriv);
        }
    }
    report.monotone_above_bound =
        report.samples_above == 0 || report.worst_derivative_above <= derivative_tol;

    report.final_mass = masses.back();
    report.final_derivative =
        n >= 2 ? (masses[n - 1] - masses[n - 2]) / (times[n - 1] - times[n - 2]) : 0.0;
    return report;
}

}  // namespace mveg
