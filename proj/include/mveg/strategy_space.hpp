#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace mveg {

// Finite metric space of strategies. Points carry real coordinates, the
// metric is stored as a dense matrix, and quad_weights hold the cell volume
// used when sampling a density into a measure. Immutable once built.
class StrategySpace {
public:
    StrategySpace(std::vector<std::vector<double>> points,
                  std::vector<double> dist_row_major,
                  std::vector<double> quad_weights);

    std::size_t size() const { return points_.size(); }
    std::size_t dim() const { return points_.empty() ? 0 : points_[0].size(); }

    const std::vector<std::vector<double>>& points() const { return points_; }
    double coord(std::size_t i, std::size_t k) const { return points_[i][k]; }

    double dist(std::size_t i, std::size_t j) const { return dist_[i * size_ + j]; }
    const std::vector<double>& dist_matrix() const { return dist_; }

    const std::vector<double>& quad_weights() const { return quad_weights_; }

    double max_pairwise_dist() const;
    double min_pairwise_dist() const;

private:
    std::vector<std::vector<double>> points_;
    std::vector<double> dist_;  // row-major m x m
    std::vector<double> quad_weights_;
    std::size_t size_;
};

using SpacePtr = std::shared_ptr<const StrategySpace>;

enum class MetricChoice { euclidean, explicit_matrix };

struct MetricCheck {
    bool symmetric = true;
    bool nonnegative = true;
    bool zero_diagonal = true;
    bool distinct_points = true;
    bool triangle = true;
    std::string detail;  // first counterexample, empty if clean
    bool pass() const {
        return symmetric && nonnegative && zero_diagonal && distinct_points && triangle;
    }
};

// Regular rectangular lattice with counts[k] points per axis (endpoints
// included), Euclidean metric, uniform cell-volume quad weights. Points are
// ordered lexicographically by lattice index, first axis slowest.
SpacePtr build_grid(const std::vector<double>& lo, const std::vector<double>& hi,
                    const std::vector<std::size_t>& counts);

// Space from an explicit point list. With MetricChoice::explicit_matrix the
// caller supplies the full m x m matrix (row-major); it is validated and
// rejected on failure, never repaired. Set validate=false to skip the O(m^3)
// triangle scan on large spaces.
SpacePtr build_explicit(const std::vector<std::vector<double>>& points,
                        MetricChoice metric,
                        const std::vector<double>& dist_row_major = {},
                        const std::vector<double>& quad_weights = {},
                        bool validate = true);

// Reports pass/fail per metric invariant with the first counterexample.
MetricCheck validate_metric(const StrategySpace& space);

// Absolute tolerance for the triangle-inequality scan.
inline constexpr double kTriangleTol = 1e-12;

}  // namespace mveg
