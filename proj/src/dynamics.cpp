#include "mveg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mveg/errors.hpp"

namespace mveg {

namespace {

void require_compatible(std::size_t m, const MutationKernel& gamma, const VitalRates& rates) {
    if (gamma.size() != m) {
        throw DimensionError("kernel is on " + std::to_string(gamma.size()) +
                             " points but the state has " + std::to_string(m));
    }
    if (rates.strategies() != m) {
        throw DimensionError("rates cover " + std::to_string(rates.strategies()) +
                             " strategies but the state has " + std::to_string(m));
    }
}

std::vector<double> field_raw(const std::vector<double>& w, const MutationKernel& gamma,
                              const VitalRates& rates) {
    const std::size_t m = w.size();
    double X = 0.0;
    for (double wi : w) X += wi;
    std::vector<double> scaled(m);
    for (std::size_t j = 0; j < m; ++j) scaled[j] = rates.birth(X, j) * w[j];
    std::vector<double> v = push_through(gamma, scaled);
    for (std::size_t i = 0; i < m; ++i) v[i] -= rates.death(X, i) * w[i];
    return v;
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

Trajectory::Trajectory(std::vector<double> times, std::vector<DiscreteMeasure> states,
                       MutationKernel gamma, VitalRates rates)
    : times_(std::move(times)),
      states_(std::move(states)),
      gamma_(std::move(gamma)),
      rates_(std::move(rates)) {
    if (times_.empty() || times_.size() != states_.size()) {
        throw DimensionError("trajectory needs matching, nonempty time and state lists");
    }
    for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
        if (!(times_[k] < times_[k + 1])) {
            throw ConfigError("trajectory times must be strictly increasing");
        }
    }
    for (const auto& s : states_) {
        if (s.size() != gamma_.size()) {
            throw DimensionError("trajectory state size does not match its kernel");
        }
    }
}

std::vector<double> Trajectory::masses() const {
    std::vector<double> out(states_.size());
    for (std::size_t k = 0; k < states_.size(); ++k) out[k] = states_[k].total_mass();
    return out;
}

DiscreteMeasure vector_field(const DiscreteMeasure& mu, const MutationKernel& gamma,
                             const VitalRates& rates) {
    require_compatible(mu.size(), gamma, rates);
    return DiscreteMeasure(mu.space(), field_raw(mu.weights(), gamma, rates));
}

DiscreteMeasure vector_field_truncated(const DiscreteMeasure& mu, const MutationKernel& gamma,
                                       const VitalRates& rates, double N) {
    return vector_field(mu, gamma, truncate(rates, N));
}

GameState step_picard(const GameState& state, const MutationKernel& gamma,
                      const VitalRates& rates, double dt, double tol, std::size_t max_iter,
                      PicardReport* report) {
    const std::size_t m = state.mu.size();
    require_compatible(m, gamma, rates);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("picard step needs a positive dt");
    if (!(tol > 0.0)) throw ConfigError("picard step needs a positive tolerance");
    if (max_iter == 0) throw ConfigError("picard step needs max_iter >= 1");
    if (state.mu.min_weight() < 0.0) {
        throw ConfigError(
            "the integral-representation step is defined on nonnegative weights; use rk4 for "
            "signed data");
    }

    constexpr std::size_t kSub = 8;
    constexpr std::size_t kNodes = kSub + 1;
    const double h = dt / static_cast<double>(kSub);
    const std::vector<double>& u = state.mu.weights();

    std::vector<std::vector<double>> prev(kNodes, u);
    std::vector<std::vector<double>> next(kNodes, u);
    std::vector<std::vector<double>> dvals(kNodes, std::vector<double>(m));
    std::vector<std::vector<double>> births(kNodes);
    std::vector<std::vector<double>> acc(kNodes, std::vector<double>(m, 0.0));
    std::vector<double> scaled(m);

    double delta = std::numeric_limits<double>::infinity();
    std::size_t worst_node = kNodes - 1;
    std::size_t iters = 0;
    bool converged = false;

    while (iters < max_iter) {
        ++iters;
        for (std::size_t k = 0; k < kNodes; ++k) {
            double X = 0.0;
            for (double w : prev[k]) X += w;
            for (std::size_t i = 0; i < m; ++i) dvals[k][i] = rates.death(X, i);
            for (std::size_t j = 0; j < m; ++j) scaled[j] = rates.birth(X, j) * prev[k][j];
            births[k] = push_through(gamma, scaled);
        }
        for (std::size_t k = 1; k < kNodes; ++k) {
            for (std::size_t i = 0; i < m; ++i) {
                acc[k][i] = acc[k - 1][i] + 0.5 * h * (dvals[k - 1][i] + dvals[k][i]);
            }
        }

        delta = 0.0;
        worst_node = 0;
        for (std::size_t k = 1; k < kNodes; ++k) {
            double node_delta = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double value = std::exp(-acc[k][i]) * u[i];
                for (std::size_t l = 0; l <= k; ++l) {
                    const double theta = (l == 0 || l == k) ? 0.5 * h : h;
                    value += theta * std::exp(acc[l][i] - acc[k][i]) * births[l][i];
                }
                node_delta += std::abs(value - prev[k][i]);
                next[k][i] = value;
            }
            if (node_delta > delta) {
                delta = node_delta;
                worst_node = k;
            }
            if (!all_finite(next[k])) {
                throw StepFailure("picard iterate became non-finite; reduce dt", state.t);
            }
        }
        if (delta < tol) {
            converged = true;
            break;
        }
        for (std::size_t k = 1; k < kNodes; ++k) prev[k] = next[k];
    }
    if (!converged) {
        throw StepFailure("picard iteration did not converge in " + std::to_string(max_iter) +
                              " sweeps; reduce dt",
                          state.t);
    }

    // The loop's total-variation metric dominates the flat norm, so this LP
    // can only fail if the solver itself misbehaves; it certifies the step in
    // the norm the convergence claim is actually stated in.
    std::vector<double> diff(m);
    for (std::size_t i = 0; i < m; ++i) diff[i] = next[worst_node][i] - prev[worst_node][i];
    const double flat_check = flat_norm(DiscreteMeasure(state.mu.space(), std::move(diff)));
    if (!(flat_check < tol)) {
        throw StepFailure("picard step failed its flat-norm convergence check", state.t);
    }

    std::vector<double> result = next[kNodes - 1];
    double min_w = result.empty() ? 0.0 : *std::min_element(result.begin(), result.end());
    if (report != nullptr) {
        report->node_times.resize(kNodes);
        for (std::size_t k = 0; k < kNodes; ++k) {
            report->node_times[k] = state.t + h * static_cast<double>(k);
        }
        report->input_nodes = prev;
        report->iterations = iters;
        report->last_delta = delta;
        report->flat_check = flat_check;
    }
    return GameState{DiscreteMeasure(state.mu.space(), std::move(result), min_w >= 0.0),
                     state.t + dt};
}

GameState step_rk4(const GameState& state, const MutationKernel& gamma, const VitalRates& rates,
                   double dt) {
    const std::size_t m = state.mu.size();
    require_compatible(m, gamma, rates);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("rk4 step needs a positive dt");

    const std::vector<double>& w = state.mu.weights();
    auto shifted = [&](const std::vector<double>& v, double c) {
        std::vector<double> out(m);
        for (std::size_t i = 0; i < m; ++i) out[i] = w[i] + c * v[i];
        return out;
    };
    std::vector<double> k1 = field_raw(w, gamma, rates);
    std::vector<double> k2 = field_raw(shifted(k1, 0.5 * dt), gamma, rates);
    std::vector<double> k3 = field_raw(shifted(k2, 0.5 * dt), gamma, rates);
    std::vector<double> k4 = field_raw(shifted(k3, dt), gamma, rates);

    std::vector<double> result(m);
    for (std::size_t i = 0; i < m; ++i) {
        result[i] = w[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (!all_finite(result)) {
        throw StepFailure("rk4 step produced non-finite weights; reduce dt", state.t);
    }
    double min_w = result.empty() ? 0.0 : *std::min_element(result.begin(), result.end());
    return GameState{DiscreteMeasure(state.mu.space(), std::move(result), min_w >= 0.0),
                     state.t + dt};
}

Trajectory evolve(const DiscreteMeasure& u, const MutationKernel& gamma, const VitalRates& rates,
                  double T, Scheme scheme, double dt, const EvolveOptions& opts) {
    require_compatible(u.size(), gamma, rates);
    if (!std::isfinite(T) || T < 0.0) throw ConfigError("evolve needs a horizon T >= 0");
    if (T == 0.0) return Trajectory({0.0}, {u}, gamma, rates);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("evolve needs a positive dt");

    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    if (steps < 1 ||
        std::abs(static_cast<double>(steps) * dt - T) > 1e-9 * std::max(1.0, std::abs(T))) {
        throw ConfigError("dt must divide the horizon T to within 1e-9 relative");
    }

    std::vector<double> times;
    std::vector<DiscreteMeasure> states;
    times.reserve(steps + 1);
    states.reserve(steps + 1);
    times.push_back(0.0);
    states.push_back(u);

    GameState cur{u, 0.0};
    for (std::size_t k = 1; k <= steps; ++k) {
        cur = scheme == Scheme::picard
                  ? step_picard(cur, gamma, rates, dt, opts.picard_tol, opts.picard_max_iter)
                  : step_rk4(cur, gamma, rates, dt);
        cur.t = dt * static_cast<double>(k);
        times.push_back(cur.t);
        states.push_back(cur.mu);
    }
    return Trajectory(std::move(times), std::move(states), gamma, rates);
}

double constraint_residual(const Trajectory& traj, const BLFunction& g, double t) {
    if (g.size() != traj.gamma().size()) {
        throw DimensionError("test function size does not match the trajectory's space");
    }
    const auto& times = traj.times();
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(times.begin(), times.end(), t - tol);
    if (it == times.end() || std::abs(*it - t) > tol) {
        throw ConfigError("constraint residual needs t to be a sample time of the trajectory");
    }
    const auto k = static_cast<std::size_t>(it - times.begin());
    if (k == 0 || k + 1 >= times.size()) {
        throw ConfigError("constraint residual needs an interior sample time");
    }

    const double span = times[k + 1] - times[k - 1];
    const double ddt = (pair(traj.state(k + 1), g) - pair(traj.state(k - 1), g)) / span;
    const double field = pair(vector_field(traj.state(k), traj.gamma(), traj.rates()), g);
    return std::abs(ddt - field);
}

}  // namespace mveg
