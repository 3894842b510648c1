#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mveg {

enum class RateFamily { logistic_paper, logistic_a2, ricker, beverton_holt, custom };

std::string family_name(RateFamily f);

// Density-dependent per-capita birth and death rates B(X, q_i), D(X, q_i).
// a1/a2 flags record whether the family satisfies the standing monotonicity
// assumptions (birth nonincreasing in X; death nondecreasing with a positive
// floor at X = 0); families that violate them are allowed but tagged so the
// asymptotic diagnostics can special-case them.
class VitalRates {
public:
    using Rate = std::function<double(double, std::size_t)>;

    VitalRates(RateFamily family, Rate birth, Rate death, std::size_t strategies,
               bool a1_compliant, bool a2_compliant,
               std::map<std::string, std::vector<double>> params);

    double birth(double X, std::size_t i) const;
    double death(double X, std::size_t i) const;

    RateFamily family() const { return family_; }
    std::size_t strategies() const { return strategies_; }
    bool a1_compliant() const { return a1_; }
    bool a2_compliant() const { return a2_; }
    std::optional<double> truncation() const { return truncation_N_; }
    const std::map<std::string, std::vector<double>>& params() const { return params_; }
    const std::vector<double>& param(const std::string& name) const;

private:
    friend VitalRates truncate(const VitalRates& r, double N);

    RateFamily family_;
    Rate birth_;
    Rate death_;
    std::size_t strategies_;
    bool a1_;
    bool a2_;
    std::optional<double> truncation_N_;
    std::map<std::string, std::vector<double>> params_;
};

// B(X,q) = q1, D(X,q) = q2 X. The death floor at X = 0 is zero, so the
// family is tagged as violating the positive-mortality assumption.
VitalRates make_logistic_paper(const std::vector<double>& q1, const std::vector<double>& q2);

// B(X,q) = q1, D(X,q) = w0 + q2 X with w0 > 0: the compliant variant.
VitalRates make_logistic_a2(const std::vector<double>& q1, const std::vector<double>& q2,
                            double w0);

// B(X,q) = b e^{-c X}, D(X,q) = w0 + d1 X.
VitalRates make_ricker(const std::vector<double>& b, const std::vector<double>& c, double w0,
                       const std::vector<double>& d1);

// B(X,q) = b / (1 + c X), D(X,q) = w0 + d1 X.
VitalRates make_beverton_holt(const std::vector<double>& b, const std::vector<double>& c,
                              double w0, const std::vector<double>& d1);

VitalRates make_custom(VitalRates::Rate birth, VitalRates::Rate death, std::size_t strategies,
                       bool a1_compliant, bool a2_compliant);

// Clamps the density argument to [0, N]; the result is constant outside and
// therefore globally bounded and Lipschitz in X.
VitalRates truncate(const VitalRates& r, double N);

struct AssumptionWitness {
    std::size_t strategy = 0;
    double x_lo = 0.0;
    double x_hi = 0.0;
};

struct AssumptionReport {
    bool a1_ok = true;
    bool a2_ok = true;
    double varpi = 0.0;  // min over strategies of D(0, i)
    std::optional<AssumptionWitness> a1_witness;
    std::optional<AssumptionWitness> a2_witness;
};

// Samples both monotonicity assumptions on x_grid per strategy and reports
// the death floor; the grid is the caller's declaration of where compliance
// is claimed.
AssumptionReport check_assumptions(const VitalRates& r, const std::vector<double>& x_grid);

// Max finite-difference slope of both rates in X over [0, N], by dense
// sampling; a certified-by-sampling Lipschitz scale for the truncated rates.
double sampled_lipschitz_in_x(const VitalRates& r, double N, std::size_t samples = 400);

}  // namespace mveg
