#include "mveg/bl_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mveg/errors.hpp"
#include "mveg/simplex.hpp"

namespace mveg {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": sizes " << a << " and " << b << " do not match";
        throw DimensionError(os.str());
    }
}

}  // namespace

BLFunction::BLFunction(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
    if (!space_) throw DimensionError("test function needs a strategy space");
    require_same_size(values_.size(), space_->size(), "test function values");
}

BLFunction BLFunction::constant(SpacePtr space, double value) {
    if (!space) throw DimensionError("test function needs a strategy space");
    const std::size_t m = space->size();
    return BLFunction(std::move(space), std::vector<double>(m, value));
}

BLFunction BLFunction::coordinate(SpacePtr space, std::size_t axis) {
    if (!space) throw DimensionError("test function needs a strategy space");
    if (axis >= space->dim()) throw DimensionError("coordinate axis out of range");
    std::vector<double> v(space->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = space->coord(i, axis);
    return BLFunction(std::move(space), std::move(v));
}

DiscreteMeasure::DiscreteMeasure(SpacePtr space, std::vector<double> weights, bool flag_positive)
    : space_(std::move(space)), weights_(std::move(weights)), positive_(flag_positive) {
    if (!space_) throw DimensionError("measure needs a strategy space");
    require_same_size(weights_.size(), space_->size(), "measure weights");
    if (positive_) {
        for (double w : weights_) {
            if (w < 0.0) throw DimensionError("measure flagged positive has a negative weight");
        }
    }
}

DiscreteMeasure DiscreteMeasure::zero(SpacePtr space) {
    if (!space) throw DimensionError("measure needs a strategy space");
    const std::size_t m = space->size();
    return DiscreteMeasure(std::move(space), std::vector<double>(m, 0.0), true);
}

DiscreteMeasure DiscreteMeasure::dirac(SpacePtr space, std::size_t index, double mass) {
    if (!space) throw DimensionError("measure needs a strategy space");
    if (index >= space->size()) throw DimensionError("dirac index out of range");
    std::vector<double> w(space->size(), 0.0);
    w[index] = mass;
    return DiscreteMeasure(std::move(space), std::move(w), mass >= 0.0);
}

DiscreteMeasure DiscreteMeasure::positive(SpacePtr space, std::vector<double> weights) {
    return DiscreteMeasure(std::move(space), std::move(weights), true);
}

DiscreteMeasure DiscreteMeasure::from_density(SpacePtr space, const std::vector<double>& density) {
    if (!space) throw DimensionError("measure needs a strategy space");
    require_same_size(density.size(), space->size(), "density samples");
    std::vector<double> w(density.size());
    bool nonneg = true;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = density[i] * space->quad_weights()[i];
        nonneg = nonneg && w[i] >= 0.0;
    }
    return DiscreteMeasure(std::move(space), std::move(w), nonneg);
}

double DiscreteMeasure::total_mass() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

double DiscreteMeasure::min_weight() const {
    double s = weights_.empty() ? 0.0 : weights_[0];
    for (double w : weights_) s = std::min(s, w);
    return s;
}

double DiscreteMeasure::tv_norm() const {
    double s = 0.0;
    for (double w : weights_) s += std::abs(w);
    return s;
}

DiscreteMeasure operator+(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    require_same_size(a.size(), b.size(), "measure sum");
    std::vector<double> w(a.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = a[i] + b[i];
    return DiscreteMeasure(a.space(), std::move(w), a.flagged_positive() && b.flagged_positive());
}

DiscreteMeasure operator-(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    require_same_size(a.size(), b.size(), "measure difference");
    std::vector<double> w(a.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = a[i] - b[i];
    return DiscreteMeasure(a.space(), std::move(w), false);
}

DiscreteMeasure operator*(double c, const DiscreteMeasure& mu) {
    std::vector<double> w(mu.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = c * mu[i];
    return DiscreteMeasure(mu.space(), std::move(w), mu.flagged_positive() && c >= 0.0);
}

MutationKernel::MutationKernel(SpacePtr space, std::vector<double> column_major)
    : space_(std::move(space)), m_(space_ ? space_->size() : 0), data_(std::move(column_major)) {
    if (!space_) throw DimensionError("kernel needs a strategy space");
    require_same_size(data_.size(), m_ * m_, "kernel matrix");
    // Total-variation bound on the column Lipschitz ratio: flat norm never
    // exceeds the sum of absolute weights, so this certifies the invariant.
    double bound = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
        for (std::size_t k = j + 1; k < m_; ++k) {
            double tv = 0.0;
            const double* cj = column(j);
            const double* ck = column(k);
            for (std::size_t i = 0; i < m_; ++i) tv += std::abs(cj[i] - ck[i]);
            const double d = space_->dist(j, k);
            if (d > 0.0) bound = std::max(bound, tv / d);
        }
    }
    lip_bound_ = bound;
}

MutationKernel MutationKernel::checked(SpacePtr space, std::vector<double> column_major) {
    MutationKernel k(std::move(space), std::move(column_major));
    for (std::size_t j = 0; j < k.m_; ++j) {
        double sum = 0.0;
        const double* cj = k.column(j);
        for (std::size_t i = 0; i < k.m_; ++i) {
            if (cj[i] < 0.0) {
                std::ostringstream os;
                os << "kernel column " << j << " has negative entry at row " << i;
                throw ConfigError(os.str());
            }
            sum += cj[i];
        }
        if (std::abs(sum - 1.0) > kColumnSumTol) {
            std::ostringstream os;
            os << "kernel column " << j << " sums to " << sum << ", expected 1";
            throw ConfigError(os.str());
        }
    }
    return k;
}

MutationKernel MutationKernel::unchecked(SpacePtr space, std::vector<double> column_major) {
    return MutationKernel(std::move(space), std::move(column_major));
}

DiscreteMeasure MutationKernel::column_measure(std::size_t j) const {
    if (j >= m_) throw DimensionError("kernel column index out of range");
    std::vector<double> w(column(j), column(j) + m_);
    return DiscreteMeasure(space_, std::move(w), false);
}

BlNorms bl_norms(const BLFunction& g) {
    BlNorms out;
    const std::size_t m = g.size();
    for (std::size_t i = 0; i < m; ++i) out.sup = std::max(out.sup, std::abs(g[i]));
    const StrategySpace& S = *g.space();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            out.lip = std::max(out.lip, std::abs(g[i] - g[j]) / S.dist(i, j));
        }
    }
    out.bl = out.sup + out.lip;
    return out;
}

double pair(const DiscreteMeasure& mu, const BLFunction& g) {
    require_same_size(mu.size(), g.size(), "measure-function pairing");
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu[i] * g[i];
    return s;
}

double flat_norm(const DiscreteMeasure& mu) {
    const std::size_t m = mu.size();
    const StrategySpace& S = *mu.space();

    // Variables x = (h_1..h_m, s, L) with h_i = g_i + s >= 0, so every
    // variable is nonnegative and the origin is feasible (all rhs >= 0).
    const std::size_t n = m + 2;
    const std::size_t rows = m + m * (m - 1) + 1;
    std::vector<double> A(rows * n, 0.0);
    std::vector<double> b(rows, 0.0);
    std::vector<double> c(n, 0.0);

    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        c[i] = mu[i];
        total += mu[i];
    }
    c[m] = -total;  // objective is sum w_i (h_i - s)

    std::size_t r = 0;
    for (std::size_t i = 0; i < m; ++i, ++r) {  // h_i <= 2 s
        A[r * n + i] = 1.0;
        A[r * n + m] = -2.0;
    }
    for (std::size_t i = 0; i < m; ++i) {  // |h_i - h_j| <= L d(i,j)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = S.dist(i, j);
            A[r * n + i] = 1.0;
            A[r * n + j] = -1.0;
            A[r * n + m + 1] = -d;
            ++r;
            A[r * n + i] = -1.0;
            A[r * n + j] = 1.0;
            A[r * n + m + 1] = -d;
            ++r;
        }
    }
    A[r * n + m] = 1.0;  // s + L <= 1
    A[r * n + m + 1] = 1.0;
    b[r] = 1.0;
    ++r;

    const LpResult res = solve_lp(rows, n, A, b, c);
    if (res.status != LpStatus::optimal) {
        throw InternalError("flat-norm program failed to reach an optimum");
    }
    return std::max(0.0, res.value);
}

double flat_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    return flat_norm(mu - nu);
}

std::vector<double> push_through(const MutationKernel& gamma, const std::vector<double>& w) {
    const std::size_t m = gamma.size();
    require_same_size(w.size(), m, "kernel push");
    std::vector<double> v(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const double wj = w[j];
        if (wj == 0.0) continue;
        const double* cj = gamma.column(j);
        for (std::size_t i = 0; i < m; ++i) v[i] += cj[i] * wj;
    }
    return v;
}

DiscreteMeasure bullet(const MutationKernel& gamma, const DiscreteMeasure& mu) {
    require_same_size(gamma.size(), mu.size(), "bullet");
    return DiscreteMeasure(mu.space(), push_through(gamma, mu.weights()), false);
}

DiscreteMeasure function_bullet(const BLFunction& f, const DiscreteMeasure& mu) {
    require_same_size(f.size(), mu.size(), "function bullet");
    std::vector<double> v(mu.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i] * mu[i];
    return DiscreteMeasure(mu.space(), std::move(v), false);
}

double kernel_sup_norm_dist(const MutationKernel& g1, const MutationKernel& g2) {
    require_same_size(g1.size(), g2.size(), "kernel distance");
    double best = 0.0;
    for (std::size_t j = 0; j < g1.size(); ++j) {
        best = std::max(best, flat_norm(g1.column_measure(j) - g2.column_measure(j)));
    }
    return best;
}

double certify_kernel_lip(MutationKernel& gamma) {
    const std::size_t m = gamma.size();
    const StrategySpace& S = *gamma.space();
    double best = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = j + 1; k < m; ++k) {
            const double d = S.dist(j, k);
            const double fn = flat_norm(gamma.column_measure(j) - gamma.column_measure(k));
            best = std::max(best, fn / d);
        }
    }
    gamma.set_lip_bound(best);
    return best;
}

MutationKernel make_pure_selection(const SpacePtr& space) {
    if (!space) throw DimensionError("kernel needs a strategy space");
    const std::size_t m = space->size();
    std::vector<double> data(m * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) data[j * m + j] = 1.0;
    return MutationKernel::checked(space, std::move(data));
}

MutationKernel make_smoothed_kernel(const SpacePtr& space, double bandwidth) {
    if (!space) throw DimensionError("kernel needs a strategy space");
    if (!(bandwidth > 0.0)) throw ConfigError("kernel bandwidth must be positive");
    const std::size_t m = space->size();
    std::vector<double> data(m * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = space->dist(i, j) / bandwidth;
            const double v = std::exp(-d * d) * space->quad_weights()[i];
            data[j * m + i] = v;
            sum += v;
        }
        for (std::size_t i = 0; i < m; ++i) data[j * m + i] /= sum;
    }
    return MutationKernel::checked(space, std::move(data));
}

}  // namespace mveg
