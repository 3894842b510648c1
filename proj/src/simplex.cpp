#include "mveg/simplex.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "mveg/errors.hpp"

namespace mveg {

namespace {

constexpr double kEps = 1e-10;
constexpr double kAcceptTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense dictionary tableau. Rows 0..m-1 hold constraints, row m the real
// objective, row m+1 the phase-one objective. Column n is the artificial
// variable (id -1), column n+1 the working right-hand side used by every
// ratio test, column n+2 a shadow right-hand side updated by the same
// pivots. The norm programs this library builds are massively degenerate
// (almost every rhs is zero) and cycle under textbook pivoting, so the
// working rhs may carry a tiny tie-breaking perturbation; the shadow column
// carries the caller's exact rhs, and the solution is read from it at the
// final basis, where it is checked for feasibility. The perturbation then
// steers the pivot path but never enters the reported optimum.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols, const std::vector<double>& A,
            const std::vector<double>& b_work, const std::vector<double>& b_exact)
        : m_(static_cast<int>(rows)),
          n_(static_cast<int>(cols)),
          stride_(static_cast<std::size_t>(n_) + 3),
          data_(static_cast<std::size_t>(m_ + 2) * stride_, 0.0),
          nonbasic_(cols + 1),
          basic_(rows) {
        for (int i = 0; i < m_; ++i) {
            double* r = row(i);
            for (int j = 0; j < n_; ++j) {
                r[j] = A[static_cast<std::size_t>(i) * cols + static_cast<std::size_t>(j)];
            }
            r[n_] = -1.0;
            r[n_ + 1] = b_work[static_cast<std::size_t>(i)];
            r[n_ + 2] = b_exact[static_cast<std::size_t>(i)];
            basic_[static_cast<std::size_t>(i)] = n_ + i;
        }
        double* obj = row(m_);
        for (int j = 0; j < n_; ++j) {
            obj[j] = -c_placeholder_;  // overwritten below
            nonbasic_[static_cast<std::size_t>(j)] = j;
        }
        nonbasic_[static_cast<std::size_t>(n_)] = -1;
        row(m_ + 1)[n_] = 1.0;
    }

    void set_objective(const std::vector<double>& c) {
        double* obj = row(m_);
        for (int j = 0; j < n_; ++j) obj[j] = -c[static_cast<std::size_t>(j)];
    }

    struct Outcome {
        LpStatus status = LpStatus::optimal;
        double exact_value = 0.0;
        std::vector<double> x;
        bool exact_feasible = true;
    };

    Outcome run() {
        Outcome out;
        int r = 0;
        for (int i = 1; i < m_; ++i) {
            if (row(i)[n_ + 1] < row(r)[n_ + 1]) r = i;
        }
        if (m_ > 0 && row(r)[n_ + 1] < -kEps) {
            pivot(r, n_);
            if (!optimize(2) || row(m_ + 1)[n_ + 1] < -kEps) {
                out.status = LpStatus::infeasible;
                return out;
            }
            for (int i = 0; i < m_; ++i) {
                if (basic_[static_cast<std::size_t>(i)] != -1) continue;
                int s = -1;
                for (int j = 0; j <= n_; ++j) s = better_entering(i, j, s);
                if (s >= 0 && std::abs(row(i)[s]) > kEps) pivot(i, s);
            }
        }
        const bool bounded = optimize(1);
        if (!bounded) {
            out.status = LpStatus::unbounded;
            out.exact_value = kInf;
            return out;
        }
        out.x.assign(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < m_; ++i) {
            const int id = basic_[static_cast<std::size_t>(i)];
            const double v = row(i)[n_ + 2];
            if (id >= 0 && id < n_) out.x[static_cast<std::size_t>(id)] = v;
            if (v < -kAcceptTol) out.exact_feasible = false;
        }
        out.exact_value = row(m_)[n_ + 2];
        return out;
    }

private:
    static constexpr double c_placeholder_ = 0.0;

    double* row(int i) { return data_.data() + static_cast<std::size_t>(i) * stride_; }

    int better_entering(int obj_row, int j, int s) const {
        const double* r = data_.data() + static_cast<std::size_t>(obj_row) * stride_;
        if (s == -1) return j;
        const double vj = r[j];
        const double vs = r[s];
        if (vj < vs) return j;
        if (vj == vs && nonbasic_[static_cast<std::size_t>(j)] <
                            nonbasic_[static_cast<std::size_t>(s)]) {
            return j;
        }
        return s;
    }

    void pivot(int r, int s) {
        const int width = n_ + 3;
        double* pr = row(r);
        const double inv = 1.0 / pr[s];
        for (int i = 0; i < m_ + 2; ++i) {
            if (i == r) continue;
            double* ri = row(i);
            if (std::abs(ri[s]) <= kEps) continue;
            const double factor = ri[s] * inv;
            for (int j = 0; j < width; ++j) ri[j] -= pr[j] * factor;
            ri[s] = pr[s] * factor;
        }
        for (int j = 0; j < width; ++j) {
            if (j != s) pr[j] *= inv;
        }
        for (int i = 0; i < m_ + 2; ++i) {
            if (i != r) row(i)[s] *= -inv;
        }
        pr[s] = inv;
        std::swap(basic_[static_cast<std::size_t>(r)], nonbasic_[static_cast<std::size_t>(s)]);
    }

    // phase 1 optimizes the real objective, phase 2 the artificial one.
    // Returns false when the objective is unbounded along the chosen column.
    // Entering rule: most negative coefficient while the objective makes
    // progress; after a stalled stretch (a degenerate plateau) it switches
    // to smallest-variable-id, which cannot cycle, and switches back once
    // the objective strictly improves.
    bool optimize(int phase) {
        const int obj_row = m_ + phase - 1;
        const long hard_cap = 1000000L + 1000L * (m_ + n_);
        const long stall_limit = 25 + (m_ + n_) / 4;
        long stalled = 0;
        double best_obj = row(obj_row)[n_ + 1];
        for (long iter = 0; iter < hard_cap; ++iter) {
            const bool by_id = stalled >= stall_limit;
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                const int id = nonbasic_[static_cast<std::size_t>(j)];
                if (id == -phase) continue;
                if (by_id) {
                    if (row(obj_row)[j] < -kEps &&
                        (s == -1 || id < nonbasic_[static_cast<std::size_t>(s)])) {
                        s = j;
                    }
                } else {
                    s = better_entering(obj_row, j, s);
                }
            }
            if (s == -1 || row(obj_row)[s] >= -kEps) return true;
            int r = -1;
            for (int i = 0; i < m_; ++i) {
                const double* ri = row(i);
                if (ri[s] <= kEps) continue;
                if (r == -1) {
                    r = i;
                    continue;
                }
                const double ratio_i = ri[n_ + 1] / ri[s];
                const double ratio_r = row(r)[n_ + 1] / row(r)[s];
                if (ratio_i < ratio_r ||
                    (ratio_i == ratio_r && basic_[static_cast<std::size_t>(i)] <
                                               basic_[static_cast<std::size_t>(r)])) {
                    r = i;
                }
            }
            if (r == -1) return false;
            pivot(r, s);
            const double obj = row(obj_row)[n_ + 1];
            if (obj > best_obj + kEps * (1.0 + std::abs(best_obj))) {
                best_obj = obj;
                stalled = 0;
            } else {
                ++stalled;
            }
        }
        throw NumericsError("simplex exceeded its pivot budget");
    }

    int m_;
    int n_;
    std::size_t stride_;
    std::vector<double> data_;
    std::vector<int> nonbasic_;
    std::vector<int> basic_;
};

}  // namespace

LpResult solve_lp(std::size_t rows, std::size_t cols, const std::vector<double>& A,
                  const std::vector<double>& b, const std::vector<double>& c) {
    if (cols == 0) throw DimensionError("linear program needs at least one variable");
    if (A.size() != rows * cols) throw DimensionError("constraint matrix has wrong size");
    if (b.size() != rows) throw DimensionError("rhs length does not match constraint count");
    if (c.size() != cols) throw DimensionError("objective length does not match variable count");
    for (double v : A) {
        if (!std::isfinite(v)) throw NumericsError("constraint matrix has non-finite entry");
    }
    for (double v : b) {
        if (!std::isfinite(v)) throw NumericsError("rhs has non-finite entry");
    }
    for (double v : c) {
        if (!std::isfinite(v)) throw NumericsError("objective has non-finite entry");
    }

    bool nonneg_rhs = true;
    for (double v : b) nonneg_rhs = nonneg_rhs && v >= 0.0;

    const auto attempt = [&](const std::vector<double>& b_work) {
        Tableau tab(rows, cols, A, b_work, b);
        tab.set_objective(c);
        return tab.run();
    };

    // With a nonnegative rhs the origin is feasible and any degeneracy comes
    // from tied (mostly zero) rhs entries; solve with a strictly increasing
    // perturbation first, falling back to smaller ones if the basis it finds
    // is not feasible for the exact rhs.
    if (nonneg_rhs && rows > 0) {
        for (const double scale : {3e-8, 1e-11}) {
            std::vector<double> b_work(b);
            for (std::size_t i = 0; i < rows; ++i) {
                b_work[i] += scale * static_cast<double>(i + 1) / static_cast<double>(rows);
            }
            Tableau::Outcome out = attempt(b_work);
            if (out.status == LpStatus::unbounded) {
                // a feasible improving ray does not depend on the rhs
                return LpResult{LpStatus::unbounded, kInf, std::move(out.x)};
            }
            if (out.status == LpStatus::optimal && out.exact_feasible) {
                return LpResult{LpStatus::optimal, out.exact_value, std::move(out.x)};
            }
        }
    }

    Tableau::Outcome out = attempt(b);
    LpResult res;
    res.status = out.status;
    res.value = out.status == LpStatus::unbounded ? kInf : out.exact_value;
    res.x = std::move(out.x);
    return res;
}

}  // namespace mveg
