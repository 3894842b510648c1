#pragma once

#include <cstddef>
#include <vector>

#include "mveg/bl_space.hpp"

namespace mveg {

// Brute-force flat norm for measures supported on at most three points,
// independent of the LP route: the outer search runs over the split of the
// norm budget between sup norm s and Lipschitz budget L = 1 - s (a concave
// piecewise-linear value function, located by scan plus golden-section),
// and the inner problem is solved exactly by enumerating the vertices of
// the small polytope {|g_i| <= s, |g_i - g_j| <= L d_ij}.
//
// Restricting attention to the support is exact: a Lipschitz function on
// the support extends to the whole space with the same constant, and
// clamping to [-s, s] preserves it.
double flat_norm_bruteforce(const DiscreteMeasure& mu);

// Same computation on raw support data: weights w (length k <= 3) and the
// k x k row-major distance matrix between the support points.
double flat_norm_bruteforce_support(const std::vector<double>& w,
                                    const std::vector<double>& dist);

inline constexpr std::size_t kOracleMaxSupport = 3;

}  // namespace mveg
