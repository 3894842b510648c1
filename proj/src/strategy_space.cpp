#include "mveg/strategy_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mveg/errors.hpp"

namespace mveg {

namespace {

// The metric is stored densely, so point counts beyond a few thousand would
// exhaust memory long before the dynamics become interesting.
constexpr std::size_t kMaxPoints = 4096;

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

std::string point_str(const std::vector<double>& p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k) os << ", ";
        os << p[k];
    }
    os << ")";
    return os.str();
}

}  // namespace

StrategySpace::StrategySpace(std::vector<std::vector<double>> points,
                             std::vector<double> dist_row_major,
                             std::vector<double> quad_weights)
    : points_(std::move(points)),
      dist_(std::move(dist_row_major)),
      quad_weights_(std::move(quad_weights)),
      size_(points_.size()) {
    if (size_ == 0) throw DimensionError("strategy space must contain at least one point");
    const std::size_t d = points_[0].size();
    for (const auto& p : points_) {
        if (p.size() != d) throw DimensionError("strategy points have mixed dimensions");
    }
    if (dist_.size() != size_ * size_) {
        throw DimensionError("distance matrix size does not match point count");
    }
    if (quad_weights_.size() != size_) {
        throw DimensionError("quad weight count does not match point count");
    }
    for (double w : quad_weights_) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw DimensionError("quad weights must be finite and positive");
        }
    }
}

double StrategySpace::max_pairwise_dist() const {
    double best = 0.0;
    for (std::size_t i = 0; i < size_; ++i)
        for (std::size_t j = i + 1; j < size_; ++j) best = std::max(best, dist(i, j));
    return best;
}

double StrategySpace::min_pairwise_dist() const {
    if (size_ < 2) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < size_; ++i)
        for (std::size_t j = i + 1; j < size_; ++j) best = std::min(best, dist(i, j));
    return best;
}

SpacePtr build_grid(const std::vector<double>& lo, const std::vector<double>& hi,
                    const std::vector<std::size_t>& counts) {
    const std::size_t d = lo.size();
    if (d == 0) throw DimensionError("grid needs at least one axis");
    if (hi.size() != d || counts.size() != d) {
        throw DimensionError("grid axis arrays must have equal length");
    }
    std::size_t m = 1;
    for (std::size_t k = 0; k < d; ++k) {
        if (counts[k] == 0) throw DimensionError("grid axis count must be positive");
        if (!(hi[k] >= lo[k])) throw DimensionError("grid axis has hi < lo");
        if (counts[k] > 1 && hi[k] == lo[k]) {
            throw DimensionError("grid axis with multiple points needs hi > lo");
        }
        if (m * counts[k] > kMaxPoints) {
            throw DimensionError("grid exceeds the dense-metric point budget");
        }
        m *= counts[k];
    }

    std::vector<std::vector<double>> pts(m, std::vector<double>(d));
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            pts[i][k] = counts[k] == 1
                            ? lo[k]
                            : lo[k] + (hi[k] - lo[k]) * static_cast<double>(idx[k]) /
                                          static_cast<double>(counts[k] - 1);
        }
        // advance lexicographic index, last axis fastest
        for (std::size_t k = d; k-- > 0;) {
            if (++idx[k] < counts[k]) break;
            idx[k] = 0;
        }
    }

    std::vector<double> dist(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double dij = euclidean(pts[i], pts[j]);
            dist[i * m + j] = dij;
            dist[j * m + i] = dij;
        }

    double cell = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
        if (hi[k] > lo[k]) cell *= (hi[k] - lo[k]) / static_cast<double>(counts[k]);
    }
    std::vector<double> qw(m, cell);

    return std::make_shared<StrategySpace>(std::move(pts), std::move(dist), std::move(qw));
}

SpacePtr build_explicit(const std::vector<std::vector<double>>& points, MetricChoice metric,
                        const std::vector<double>& dist_row_major,
                        const std::vector<double>& quad_weights, bool validate) {
    const std::size_t m = points.size();
    if (m == 0) throw DimensionError("strategy space must contain at least one point");
    if (m > kMaxPoints) throw DimensionError("point list exceeds the dense-metric point budget");

    std::vector<double> dist;
    if (metric == MetricChoice::euclidean) {
        if (!dist_row_major.empty()) {
            throw DimensionError("euclidean metric does not take an explicit matrix");
        }
        dist.assign(m * m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                if (points[i].size() != points[j].size()) {
                    throw DimensionError("strategy points have mixed dimensions");
                }
                const double dij = euclidean(points[i], points[j]);
                dist[i * m + j] = dij;
                dist[j * m + i] = dij;
            }
    } else {
        if (dist_row_major.size() != m * m) {
            throw DimensionError("explicit distance matrix must be m x m");
        }
        dist = dist_row_major;
    }

    std::vector<double> qw = quad_weights;
    if (qw.empty()) qw.assign(m, 1.0);

    auto space = std::make_shared<StrategySpace>(std::vector<std::vector<double>>(points),
                                                 std::move(dist), std::move(qw));
    if (validate) {
        const MetricCheck check = validate_metric(*space);
        if (!check.pass()) {
            throw DimensionError("distance matrix is not a metric: " + check.detail);
        }
    }
    return space;
}

MetricCheck validate_metric(const StrategySpace& space) {
    MetricCheck out;
    const std::size_t m = space.size();
    std::ostringstream detail;

    for (std::size_t i = 0; i < m && out.zero_diagonal; ++i) {
        if (space.dist(i, i) != 0.0) {
            out.zero_diagonal = false;
            detail << "d(" << i << "," << i << ") = " << space.dist(i, i) << " != 0";
        }
    }
    for (std::size_t i = 0; i < m && out.symmetric && out.nonnegative; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double dij = space.dist(i, j);
            if (!std::isfinite(dij) || dij < 0.0) {
                out.nonnegative = false;
                detail << "d(" << i << "," << j << ") = " << dij << " is negative or non-finite";
                break;
            }
            if (dij != space.dist(j, i)) {
                out.symmetric = false;
                detail << "d(" << i << "," << j << ") != d(" << j << "," << i << ")";
                break;
            }
        }
    }
    for (std::size_t i = 0; i < m && out.distinct_points; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if (space.dist(i, j) == 0.0) {
                out.distinct_points = false;
                detail << "d(" << i << "," << j << ") = 0 for distinct points "
                       << point_str(space.points()[i]) << " and " << point_str(space.points()[j]);
                break;
            }
        }
    }
    if (out.symmetric && out.nonnegative) {
        for (std::size_t i = 0; i < m && out.triangle; ++i) {
            for (std::size_t j = 0; j < m && out.triangle; ++j) {
                for (std::size_t k = 0; k < m; ++k) {
                    if (space.dist(i, j) > space.dist(i, k) + space.dist(k, j) + kTriangleTol) {
                        out.triangle = false;
                        detail << "triangle fails: d(" << i << "," << j << ") = "
                               << space.dist(i, j) << " > d(" << i << "," << k << ") + d(" << k
                               << "," << j << ") = " << space.dist(i, k) + space.dist(k, j);
                        break;
                    }
                }
            }
        }
    }
    out.detail = detail.str();
    return out;
}

}  // namespace mveg
