#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mveg/dynamics.hpp"
#include "mveg/strategy_space.hpp"
#include "mveg/vital_rates.hpp"

namespace mveg {

struct AsymptoticProfile {
    // Basic reproduction number per strategy; +infinity encodes a strategy
    // whose mortality vanishes at zero density while its birth rate does not.
    std::vector<double> r0;
    // Carrying capacity per strategy; empty when r0 < 1 (no positive value is
    // defined there).
    std::vector<std::optional<double>> capacity;
    std::optional<double> k_diamond;  // max of the defined capacities
    std::optional<double> k_floor;    // min of the defined capacities
    std::optional<std::size_t> fittest;  // argmax capacity, lowest index on ties
    double varpi = 0.0;               // min over strategies of D(0, i)
    double s_max = 0.0;               // bisection bracket used; 0 for closed-form families
};

// B(s,i)/D(s,i). Zero mortality at s is a domain error: callers that need
// the logistic family without a mortality floor go through profile(), which
// carries the closed-form limit.
double reproduction_number(const VitalRates& rates, double s, std::size_t i);

// Root of R(., i) = 1 on [0, s_max] by bisection on the sign of B - D.
// Returns nothing when r0 < 1, zero when r0 is within tol of 1, and the
// bracketed root otherwise; refuses brackets that do not contain a sign
// change.
std::optional<double> carrying_capacity(const VitalRates& rates, std::size_t i, double s_max,
                                        double tol = 1e-9);

struct CapacityOptions {
    std::optional<double> s_max;  // default: 10 * max_i B(0,i) / varpi
    double tol = 1e-9;
};

AsymptoticProfile profile(const VitalRates& rates, const StrategySpace& space,
                          const CapacityOptions& opts = {});

struct DissipativityReport {
    bool applicable = false;  // false when the profile defines no capacity bound
    double bound = 0.0;       // k_diamond + slack
    double sup_after_burn_in = 0.0;
    bool eventually_bounded = false;
    std::size_t samples_above = 0;  // samples with mass above k_diamond
    double worst_derivative_above = 0.0;
    bool monotone_above_bound = false;  // mass > k_diamond implies derivative <= tol
    double final_mass = 0.0;
    double final_derivative = 0.0;

    bool pass() const { return applicable && eventually_bounded && monotone_above_bound; }
};

// Finite-horizon stand-in for the eventual-boundedness statement: sup of the
// total mass over [burn_in, T] against k_diamond + slack, plus the
// monotonicity consequence that mass strictly above k_diamond must not be
// growing (forward differences, within derivative_tol).
DissipativityReport dissipativity_check(const Trajectory& traj, const AsymptoticProfile& prof,
                                        double burn_in, double slack,
                                        double derivative_tol = 1e-6);

}  // namespace mveg
