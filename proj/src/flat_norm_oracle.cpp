#include "mveg/flat_norm_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "mveg/errors.hpp"

namespace mveg {

namespace {

constexpr double kFeasTol = 1e-11;
constexpr double kSingularTol = 1e-12;

struct SmallPolytope {
    std::size_t k = 0;
    // rows of a g <= rhs, row-major width k
    std::vector<double> a;
    std::vector<double> rhs;

    void add(const std::array<double, 3>& row, double r) {
        for (std::size_t c = 0; c < k; ++c) a.push_back(row[c]);
        rhs.push_back(r);
    }
};

// Gaussian elimination with partial pivoting on a k x k system; returns
// false when the chosen constraint normals are not independent.
bool solve_square(std::size_t k, std::array<double, 9> M, std::array<double, 3> r,
                  std::array<double, 3>& g) {
    std::array<std::size_t, 3> perm = {0, 1, 2};
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t best = col;
        for (std::size_t row = col + 1; row < k; ++row) {
            if (std::abs(M[perm[row] * 3 + col]) > std::abs(M[perm[best] * 3 + col])) best = row;
        }
        std::swap(perm[col], perm[best]);
        const double piv = M[perm[col] * 3 + col];
        if (std::abs(piv) < kSingularTol) return false;
        for (std::size_t row = col + 1; row < k; ++row) {
            const double f = M[perm[row] * 3 + col] / piv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < k; ++c) M[perm[row] * 3 + c] -= f * M[perm[col] * 3 + c];
            r[perm[row]] -= f * r[perm[col]];
        }
    }
    for (std::size_t col = k; col-- > 0;) {
        double v = r[perm[col]];
        for (std::size_t c = col + 1; c < k; ++c) v -= M[perm[col] * 3 + c] * g[c];
        g[col] = v / M[perm[col] * 3 + col];
    }
    return true;
}

// Exact inner maximum of sum w_i g_i over {|g_i| <= s, |g_i - g_j| <= L d_ij}
// by enumerating all vertices (k active constraints out of the full list).
double inner_max(const std::vector<double>& w, const std::vector<double>& dist, double s,
                 double L) {
    const std::size_t k = w.size();
    SmallPolytope P;
    P.k = k;
    for (std::size_t i = 0; i < k; ++i) {
        std::array<double, 3> row = {0.0, 0.0, 0.0};
        row[i] = 1.0;
        P.add(row, s);
        row[i] = -1.0;
        P.add(row, s);
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double bound = L * dist[i * k + j];
            std::array<double, 3> row = {0.0, 0.0, 0.0};
            row[i] = 1.0;
            row[j] = -1.0;
            P.add(row, bound);
            row[i] = -1.0;
            row[j] = 1.0;
            P.add(row, bound);
        }
    }

    const std::size_t n = P.rhs.size();
    double best = 0.0;  // g = 0 is always feasible
    std::array<std::size_t, 3> pick = {0, 0, 0};
    const auto consider = [&]() {
        std::array<double, 9> M{};
        std::array<double, 3> r{};
        for (std::size_t t = 0; t < k; ++t) {
            for (std::size_t c = 0; c < k; ++c) M[t * 3 + c] = P.a[pick[t] * k + c];
            r[t] = P.rhs[pick[t]];
        }
        std::array<double, 3> g{};
        if (!solve_square(k, M, r, g)) return;
        for (std::size_t row = 0; row < n; ++row) {
            double lhs = 0.0;
            for (std::size_t c = 0; c < k; ++c) lhs += P.a[row * k + c] * g[c];
            if (lhs > P.rhs[row] + kFeasTol) return;
        }
        double obj = 0.0;
        for (std::size_t c = 0; c < k; ++c) obj += w[c] * g[c];
        best = std::max(best, obj);
    };

    if (k == 1) {
        for (pick[0] = 0; pick[0] < n; ++pick[0]) consider();
    } else if (k == 2) {
        for (pick[0] = 0; pick[0] < n; ++pick[0])
            for (pick[1] = pick[0] + 1; pick[1] < n; ++pick[1]) consider();
    } else {
        for (pick[0] = 0; pick[0] < n; ++pick[0])
            for (pick[1] = pick[0] + 1; pick[1] < n; ++pick[1])
                for (pick[2] = pick[1] + 1; pick[2] < n; ++pick[2]) consider();
    }
    return best;
}

}  // namespace

double flat_norm_bruteforce_support(const std::vector<double>& w,
                                    const std::vector<double>& dist) {
    const std::size_t k = w.size();
    if (k == 0) return 0.0;
    if (k > kOracleMaxSupport) {
        throw DimensionError("brute-force oracle handles at most three support points");
    }
    if (dist.size() != k * k) throw DimensionError("oracle distance matrix must be k x k");

    // The optimum uses the whole budget, so restrict to L = 1 - s and search
    // over s in [0,1]: the value function is concave piecewise linear.
    const auto value = [&](double s) { return inner_max(w, dist, s, 1.0 - s); };

    double best = 0.0;
    double best_s = 0.0;
    const std::size_t grid = 1024;
    for (std::size_t t = 0; t <= grid; ++t) {
        const double s = static_cast<double>(t) / static_cast<double>(grid);
        const double v = value(s);
        if (v > best) {
            best = v;
            best_s = s;
        }
    }

    double a = std::max(0.0, best_s - 1.0 / static_cast<double>(grid));
    double b = std::min(1.0, best_s + 1.0 / static_cast<double>(grid));
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = value(c);
    double fd = value(d);
    best = std::max({best, fc, fd});
    for (int iter = 0; iter < 96; ++iter) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = value(c);
            best = std::max(best, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = value(d);
            best = std::max(best, fd);
        }
    }
    return best;
}

double flat_norm_bruteforce(const DiscreteMeasure& mu) {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] != 0.0) support.push_back(i);
    }
    if (support.size() > kOracleMaxSupport) {
        throw DimensionError("brute-force oracle handles at most three support points");
    }
    const std::size_t k = support.size();
    std::vector<double> w(k);
    std::vector<double> dist(k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        w[a] = mu[support[a]];
        for (std::size_t b = 0; b < k; ++b) {
            dist[a * k + b] = mu.space()->dist(support[a], support[b]);
        }
    }
    return flat_norm_bruteforce_support(w, dist);
}

}  // namespace mveg
