#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mveg/strategy_space.hpp"

namespace mveg {

// Test function g: one real value per strategy point.
class BLFunction {
public:
    BLFunction(SpacePtr space, std::vector<double> values);

    static BLFunction constant(SpacePtr space, double value);
    static BLFunction coordinate(SpacePtr space, std::size_t axis);

    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    const SpacePtr& space() const { return space_; }

private:
    SpacePtr space_;
    std::vector<double> values_;
};

struct BlNorms {
    double sup = 0.0;
    double lip = 0.0;
    double bl = 0.0;
};

// Signed measure: one weight per strategy point. `flagged_positive` records
// that the weights were validated nonnegative at construction; operations
// propagate the flag only when positivity is guaranteed.
class DiscreteMeasure {
public:
    DiscreteMeasure(SpacePtr space, std::vector<double> weights, bool flag_positive = false);

    static DiscreteMeasure zero(SpacePtr space);
    static DiscreteMeasure dirac(SpacePtr space, std::size_t index, double mass = 1.0);
    static DiscreteMeasure positive(SpacePtr space, std::vector<double> weights);
    // weights[i] = density value at point i times quad_weights[i]
    static DiscreteMeasure from_density(SpacePtr space, const std::vector<double>& density);

    const std::vector<double>& weights() const { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::size_t size() const { return weights_.size(); }
    const SpacePtr& space() const { return space_; }
    bool flagged_positive() const { return positive_; }

    double total_mass() const;
    double min_weight() const;
    double tv_norm() const;  // sum of |weights|, an upper bound on the flat norm

private:
    SpacePtr space_;
    std::vector<double> weights_;
    bool positive_;
};

DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b);
DiscreteMeasure operator-(const DiscreteMeasure& a, const DiscreteMeasure& b);
DiscreteMeasure operator*(double c, const DiscreteMeasure& mu);

// Offspring-type distributions, one probability column per parent strategy:
// entry(i, j) is the mass a parent at point j places on point i, so column j
// is the measure gamma(q_j) and a bullet push is a plain matrix-vector
// product over parent index j. Stored column-major.
class MutationKernel {
public:
    // Validates every column: entries >= 0, sum within kColumnSumTol of 1.
    static MutationKernel checked(SpacePtr space, std::vector<double> column_major);
    // Skips validation. Exists so negative-control tests can inject a broken
    // kernel; regular code paths construct through checked().
    static MutationKernel unchecked(SpacePtr space, std::vector<double> column_major);

    double entry(std::size_t to_i, std::size_t from_j) const {
        return data_[from_j * m_ + to_i];
    }
    const double* column(std::size_t j) const { return data_.data() + j * m_; }
    DiscreteMeasure column_measure(std::size_t j) const;
    std::size_t size() const { return m_; }
    const SpacePtr& space() const { return space_; }

    // Certified upper bound on the flat-norm Lipschitz constant of
    // q |-> gamma(q). Constructors seed it with the total-variation bound;
    // certify_kernel_lip tightens it to the exact value.
    double lip_bound() const { return lip_bound_; }
    void set_lip_bound(double b) { lip_bound_ = b; }

private:
    MutationKernel(SpacePtr space, std::vector<double> column_major);

    SpacePtr space_;
    std::size_t m_;
    std::vector<double> data_;  // column-major m x m
    double lip_bound_;
};

inline constexpr double kColumnSumTol = 1e-9;

BlNorms bl_norms(const BLFunction& g);

double pair(const DiscreteMeasure& mu, const BLFunction& g);

// Exact dual-BL (flat) norm by linear programming: maximize sum w_i g_i over
// g with sup norm <= s, Lipschitz constant <= L, s + L <= 1. One dense LP
// with m+2 variables and all-pairs Lipschitz constraints.
double flat_norm(const DiscreteMeasure& mu);

double flat_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// (gamma . mu)[g] = mu[gamma(.)[g]]; discretely the stochastic-matrix push
// v_i = sum_j entry(i,j) w_j.
DiscreteMeasure bullet(const MutationKernel& gamma, const DiscreteMeasure& mu);

// (f . mu)[g] = mu[f g]; pointwise reweighting v_i = f_i w_i.
DiscreteMeasure function_bullet(const BLFunction& f, const DiscreteMeasure& mu);

// sup over parents of flat_norm(gamma1(q) - gamma2(q)).
double kernel_sup_norm_dist(const MutationKernel& g1, const MutationKernel& g2);

// Exact flat-norm Lipschitz constant max_{j != k} |gamma(q_j) - gamma(q_k)| / d(j,k),
// stored back into the kernel as its certified bound.
double certify_kernel_lip(MutationKernel& gamma);

// q |-> delta_q: identity columns. Bullet with this kernel is the identity.
MutationKernel make_pure_selection(const SpacePtr& space);

// Column j proportional to exp(-d(i,j)^2 / bandwidth^2) * quad_weights[i].
MutationKernel make_smoothed_kernel(const SpacePtr& space, double bandwidth);

// Raw-vector bullet push used by the dynamics inner loops.
std::vector<double> push_through(const MutationKernel& gamma, const std::vector<double>& w);

}  // namespace mveg
