#pragma once

#include <cstddef>
#include <vector>

#include "mveg/bl_space.hpp"
#include "mveg/vital_rates.hpp"

namespace mveg {

struct GameState {
    DiscreteMeasure mu;
    double t = 0.0;
};

// One sampled orbit of the semiflow. The kernel and rates ride along because
// they are the frozen second coordinate of the state: residuals and
// diagnostics must be evaluated with exactly the pair that generated the
// samples.
class Trajectory {
public:
    Trajectory(std::vector<double> times, std::vector<DiscreteMeasure> states,
               MutationKernel gamma, VitalRates rates);

    std::size_t size() const { return times_.size(); }
    double time(std::size_t k) const { return times_.at(k); }
    const std::vector<double>& times() const { return times_; }
    const DiscreteMeasure& state(std::size_t k) const { return states_.at(k); }
    const MutationKernel& gamma() const { return gamma_; }
    const VitalRates& rates() const { return rates_; }
    SpacePtr space() const { return states_.front().space(); }

    std::vector<double> masses() const;

private:
    std::vector<double> times_;
    std::vector<DiscreteMeasure> states_;
    MutationKernel gamma_;
    VitalRates rates_;
};

// Right-hand side in weight coordinates: with X the current total signed
// mass, v_i = sum_j C_ij B(X, j) w_j - D(X, i) w_i. Truncation is the
// caller's business: pass rates wrapped by truncate() for the clamped field.
DiscreteMeasure vector_field(const DiscreteMeasure& mu, const MutationKernel& gamma,
                             const VitalRates& rates);

DiscreteMeasure vector_field_truncated(const DiscreteMeasure& mu, const MutationKernel& gamma,
                                       const VitalRates& rates, double N);

// Internals of one integral-representation step, exposed so tests can replay
// the final operator application independently. input_nodes holds the iterate
// the last application consumed; the step result is that application's value
// at the last node.
struct PicardReport {
    std::vector<double> node_times;
    std::vector<std::vector<double>> input_nodes;
    std::size_t iterations = 0;
    double last_delta = 0.0;
    double flat_check = 0.0;
};

// Fixed-point step for the mild form on [t, t+dt]: per-strategy death factors
// exp(-integral of D) and the kernel-pushed birth integral are both formed by
// trapezoidal quadrature on 8 sub-intervals, and the operator is iterated
// until successive node values differ by less than tol. The iteration loop
// measures differences in the total-variation norm of the weight vector,
// which dominates the flat norm on a fixed space; one flat-norm LP check on
// the worst node certifies the converged step in the real metric. Weights
// stay nonnegative exactly: every term is a nonnegative combination.
GameState step_picard(const GameState& state, const MutationKernel& gamma,
                      const VitalRates& rates, double dt, double tol = 1e-10,
                      std::size_t max_iter = 50, PicardReport* report = nullptr);

// Classical 4-stage explicit step on the weight-vector ODE. No positivity
// guarantee; the output is flagged positive only when it happens to be.
GameState step_rk4(const GameState& state, const MutationKernel& gamma, const VitalRates& rates,
                   double dt);

enum class Scheme { picard, rk4 };

struct EvolveOptions {
    double picard_tol = 1e-10;
    std::size_t picard_max_iter = 50;
};

// Samples the orbit at every multiple of dt up to T. dt must divide T.
// T = 0 returns the initial state alone: the time-zero semiflow axiom is an
// exact copy, not an integration.
Trajectory evolve(const DiscreteMeasure& u, const MutationKernel& gamma, const VitalRates& rates,
                  double T, Scheme scheme, double dt, const EvolveOptions& opts = {});

// |d/dt mu(t)[g] - F(mu(t))[g]| with a central difference at an interior
// sample time: the runnable form of the constraint equation.
double constraint_residual(const Trajectory& traj, const BLFunction& g, double t);

}  // namespace mveg
