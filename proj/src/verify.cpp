#include "mveg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <sstream>
#include <vector>

#include "mveg/asymptotics.hpp"
#include "mveg/bl_space.hpp"
#include "mveg/dynamics.hpp"
#include "mveg/errors.hpp"
#include "mveg/flat_norm_oracle.hpp"
#include "mveg/rng.hpp"
#include "mveg/strategy_space.hpp"
#include "mveg/vital_rates.hpp"

namespace mveg {

namespace {

constexpr double kMarginTol = 1e-9;

class Reporter {
public:
    explicit Reporter(std::ostream& out) : out_(out) {}

    void check(bool ok, const std::string& text) {
        out_ << (ok ? "  [ok]   " : "  [FAIL] ") << text << "\n";
        all_ok_ = all_ok_ && ok;
    }

    bool all_ok() const { return all_ok_; }

private:
    std::ostream& out_;
    bool all_ok_ = true;
};

std::string sci(double v) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << v;
    return s.str();
}

SpacePtr random_space(Rng& rng, std::size_t max_points, std::size_t max_dim) {
    for (;;) {
        std::size_t m = 1 + rng.index(max_points);
        std::size_t d = 1 + rng.index(max_dim);
        std::vector<std::vector<double>> pts(m, std::vector<double>(d));
        for (auto& p : pts)
            for (auto& x : p) x = rng.uniform(0.0, 2.0);
        bool separated = true;
        for (std::size_t i = 0; i < m && separated; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    double diff = pts[i][k] - pts[j][k];
                    s += diff * diff;
                }
                if (std::sqrt(s) < 1e-2) {
                    separated = false;
                    break;
                }
            }
        if (separated) return build_explicit(pts, MetricChoice::euclidean);
    }
}

DiscreteMeasure random_positive(Rng& rng, const SpacePtr& space, double lo = 0.1, double hi = 2.0) {
    std::vector<double> w(space->size());
    for (auto& x : w) x = rng.uniform(lo, hi);
    return DiscreteMeasure::positive(space, std::move(w));
}

DiscreteMeasure random_signed(Rng& rng, const SpacePtr& space, double a = 2.0) {
    std::vector<double> w(space->size());
    for (auto& x : w) x = rng.symmetric(a);
    return DiscreteMeasure(space, std::move(w));
}

MutationKernel random_stochastic_kernel(Rng& rng, const SpacePtr& space) {
    const std::size_t m = space->size();
    std::vector<double> data(m * m);
    for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            data[j * m + i] = std::exp(rng.symmetric(1.0));
            sum += data[j * m + i];
        }
        for (std::size_t i = 0; i < m; ++i) data[j * m + i] /= sum;
    }
    return MutationKernel::checked(space, std::move(data));
}

BLFunction random_function(Rng& rng, const SpacePtr& space, double a = 1.5) {
    std::vector<double> vals(space->size());
    for (auto& v : vals) v = rng.symmetric(a);
    return BLFunction(space, std::move(vals));
}

MutationKernel mix_kernels(const MutationKernel& a, const MutationKernel& b, double eps) {
    const std::size_t m = a.size();
    std::vector<double> data(m * m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < m; ++i)
            data[j * m + i] = (1.0 - eps) * a.entry(i, j) + eps * b.entry(i, j);
    return MutationKernel::checked(a.space(), std::move(data));
}

// Sampled sup/Lipschitz bounds for one rate over [0, N] x Q. The Lipschitz
// figure adds the X-secant maximum and the cross-strategy quotient maximum,
// an upper bound for the joint constant, which is the safe direction for
// checking an upper-bound inequality.
struct RateNorms {
    double sup_at_zero = 0.0;
    double sup = 0.0;
    double lip = 0.0;
    double bl = 0.0;
};

RateNorms sampled_rate_norms(const VitalRates& rates, bool birth, double N,
                             const StrategySpace& space, std::size_t samples = 400) {
    RateNorms out;
    const std::size_t m = rates.strategies();
    auto value = [&](double X, std::size_t i) {
        return birth ? rates.birth(X, i) : rates.death(X, i);
    };
    for (std::size_t i = 0; i < m; ++i) out.sup_at_zero = std::max(out.sup_at_zero, std::abs(value(0.0, i)));

    double lip_x = 0.0;
    double lip_q = 0.0;
    double prev_x = 0.0;
    std::vector<double> prev(m, 0.0);
    for (std::size_t s = 0; s <= samples; ++s) {
        double X = N * static_cast<double>(s) / static_cast<double>(samples);
        std::vector<double> cur(m);
        for (std::size_t i = 0; i < m; ++i) {
            cur[i] = value(X, i);
            out.sup = std::max(out.sup, std::abs(cur[i]));
        }
        if (s > 0) {
            double h = X - prev_x;
            for (std::size_t i = 0; i < m; ++i)
                lip_x = std::max(lip_x, std::abs(cur[i] - prev[i]) / h);
        }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                lip_q = std::max(lip_q, std::abs(cur[i] - cur[j]) / space.dist(i, j));
        prev = cur;
        prev_x = X;
    }
    out.lip = lip_x + lip_q;
    out.bl = out.sup + out.lip;
    return out;
}

bool suite_oracle(std::uint64_t seed, std::ostream& out) {
    Reporter r(out);
    Rng rng(seed ^ 0x6f7261636c65ULL);

    double worst_gap = 0.0;
    const std::size_t signed_reps = 60;
    for (std::size_t rep = 0; rep < signed_reps; ++rep) {
        SpacePtr space = random_space(rng, 3, 2);
        DiscreteMeasure mu = random_signed(rng, space);
        worst_gap = std::max(worst_gap, std::abs(flat_norm(mu) - flat_norm_bruteforce(mu)));
    }
    r.check(worst_gap <= kMarginTol, "lp vs bruteforce on " + std::to_string(signed_reps) +
                                         " signed instances: worst gap " + sci(worst_gap));

    double worst_id = 0.0;
    const std::size_t positive_reps = 60;
    for (std::size_t rep = 0; rep < positive_reps; ++rep) {
        SpacePtr space = random_space(rng, 5, 2);
        DiscreteMeasure mu = random_positive(rng, space);
        worst_id = std::max(worst_id, std::abs(flat_norm(mu) - mu.total_mass()));
    }
    r.check(worst_id <= kMarginTol, "positive-measure norm = total mass on " +
                                        std::to_string(positive_reps) + " instances: worst gap " +
                                        sci(worst_id));
    return r.all_ok();
}

bool suite_norms(std::uint64_t seed, std::ostream& out) {
    Reporter r(out);
    Rng rng(seed ^ 0x6e6f726d73ULL);

    const std::size_t reps = 40;
    double worst_positive = -1e300;
    double worst_mass = 0.0;
    double worst_signed = -1e300;
    double worst_function = -1e300;
    double worst_triangle = -1e300;
    double worst_scale = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        SpacePtr space = random_space(rng, 5, 2);
        MutationKernel gamma = random_stochastic_kernel(rng, space);
        double lip = certify_kernel_lip(gamma);

        DiscreteMeasure pos = random_positive(rng, space);
        double pushed = flat_norm(bullet(gamma, pos));
        worst_positive = std::max(worst_positive, pushed - flat_norm(pos));
        worst_mass = std::max(worst_mass, std::abs(pushed - pos.total_mass()));

        DiscreteMeasure sgn = random_signed(rng, space);
        worst_signed =
            std::max(worst_signed, flat_norm(bullet(gamma, sgn)) - (1.0 + lip) * flat_norm(sgn));

        BLFunction f = random_function(rng, space);
        worst_function =
            std::max(worst_function, flat_norm(function_bullet(f, sgn)) - bl_norms(f).bl * flat_norm(sgn));

        DiscreteMeasure sgn2 = random_signed(rng, space);
        worst_triangle =
            std::max(worst_triangle, flat_norm(sgn + sgn2) - (flat_norm(sgn) + flat_norm(sgn2)));
        double cc = rng.symmetric(3.0);
        worst_scale = std::max(worst_scale, std::abs(flat_norm(cc * sgn) - std::abs(cc) * flat_norm(sgn)));
    }
    r.check(worst_positive <= kMarginTol,
            "positive push, norm(kernel.mu) <= norm(mu): worst margin " + sci(worst_positive));
    r.check(worst_mass <= kMarginTol, "positive push keeps norm = mass: worst gap " + sci(worst_mass));
    r.check(worst_signed <= kMarginTol,
            "signed push, norm <= (1+Lip(kernel)) norm(mu): worst margin " + sci(worst_signed));
    r.check(worst_function <= kMarginTol,
            "function push, norm <= bl(f) norm(mu): worst margin " + sci(worst_function));
    r.check(worst_triangle <= kMarginTol, "triangle inequality: worst margin " + sci(worst_triangle));
    r.check(worst_scale <= kMarginTol, "absolute homogeneity: worst gap " + sci(worst_scale));
    out << "  (" << reps << " seeded instances per check)\n";
    return r.all_ok();
}

bool suite_bullet(std::uint64_t seed, std::ostream& out) {
    Reporter r(out);
    Rng rng(seed ^ 0x62756c6c6574ULL);

    const std::size_t reps = 30;
    double worst_bilinear = 0.0;
    double worst_adjoint = 0.0;
    double worst_mass = 0.0;
    double worst_identity = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        SpacePtr space = random_space(rng, 5, 2);
        MutationKernel gamma = random_stochastic_kernel(rng, space);
        DiscreteMeasure mu = random_signed(rng, space);
        DiscreteMeasure nu = random_signed(rng, space);
        double a = rng.symmetric(2.0);
        double b = rng.symmetric(2.0);

        DiscreteMeasure lhs = bullet(gamma, a * mu + b * nu);
        DiscreteMeasure rhs = a * bullet(gamma, mu) + b * bullet(gamma, nu);
        worst_bilinear = std::max(worst_bilinear, (lhs - rhs).tv_norm());

        BLFunction g = random_function(rng, space);
        std::vector<double> applied(space->size());
        for (std::size_t j = 0; j < space->size(); ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < space->size(); ++i) s += gamma.entry(i, j) * g[i];
            applied[j] = s;
        }
        worst_adjoint = std::max(
            worst_adjoint,
            std::abs(pair(bullet(gamma, mu), g) - pair(mu, BLFunction(space, applied))));

        DiscreteMeasure pos = random_positive(rng, space);
        worst_mass = std::max(worst_mass,
                              std::abs(bullet(gamma, pos).total_mass() - pos.total_mass()));

        MutationKernel pure = make_pure_selection(space);
        worst_identity = std::max(worst_identity, (bullet(pure, mu) - mu).tv_norm());
    }
    r.check(worst_bilinear <= 1e-12, "bilinearity in the measure argument: worst gap " + sci(worst_bilinear));
    r.check(worst_adjoint <= 1e-12,
            "adjoint identity (kernel.mu)[g] = mu[kernel applied to g]: worst gap " + sci(worst_adjoint));
    r.check(worst_mass <= 1e-12, "stochastic push preserves mass: worst gap " + sci(worst_mass));
    r.check(worst_identity <= 0.0, "pure selection is the identity: worst gap " + sci(worst_identity));
    out << "  (" << reps << " seeded instances per check)\n";
    return r.all_ok();
}

bool suite_positivity(std::uint64_t seed, std::ostream& out) {
    Reporter r(out);
    Rng rng(seed ^ 0x706f736974ULL);

    double global_min = 1e300;
    bool flags_ok = true;
    const std::size_t runs = 5;
    for (std::size_t rep = 0; rep < runs; ++rep) {
        SpacePtr space = random_space(rng, 4, 2);
        std::size_t m = space->size();
        std::vector<double> q1(m), q2(m);
        for (auto& v : q1) v = rng.uniform(0.5, 2.5);
        for (auto& v : q2) v = rng.uniform(0.5, 1.5);
        VitalRates rates = make_logistic_a2(q1, q2, rng.uniform(0.5, 1.5));
        AsymptoticProfile prof = profile(rates, *space);
        VitalRates rates_run =
            prof.k_diamond ? truncate(rates, std::ceil(*prof.k_diamond) + 1.0) : rates;
        MutationKernel gamma = m > 1 ? make_smoothed_kernel(space, rng.uniform(0.2, 1.0))
                                     : make_pure_selection(space);
        DiscreteMeasure u = random_positive(rng, space);

        Trajectory traj = evolve(u, gamma, rates_run, 1.0, Scheme::picard, 0.05);
        for (std::size_t k = 0; k < traj.size(); ++k) {
            global_min = std::min(global_min, traj.state(k).min_weight());
            flags_ok = flags_ok && traj.state(k).flagged_positive();
        }
    }
    r.check(global_min >= 0.0, "min weight across " + std::to_string(runs) +
                                   " picard runs: " + sci(global_min) + " (exact bar: >= 0)");
    r.check(flags_ok, "positivity flag propagated through every sample");
    return r.all_ok();
}

bool suite_semiflow(std::uint64_t seed, std::ostream& out) {
    Reporter r(out);
    Rng rng(seed ^ 0x73656d69ULL);

    const double dt = 0.05;
    const double tol_bar = 10.0 * 1e-10;
    double worst_comp = 0.0;
    bool identity_exact = true;
    const std::size_t cases = 5;
    for (std::size_t rep = 0; rep < cases; ++rep) {
        SpacePtr space = random_space(rng, 4, 2);
        std::size_t m = space->size();
        std::vector<double> q1(m), q2(m);
        for (auto& v : q1) v = rng.uniform(0.5, 2.5);
        for (auto& v : q2) v = rng.uniform(0.5, 1.5);
        VitalRates rates = truncate(make_logistic_a2(q1, q2, 1.0), 4.0);
        MutationKernel gamma = m > 1 ? make_smoothed_kernel(space, rng.uniform(0.3, 1.0))
                                     : make_pure_selection(space);
        DiscreteMeasure u = random_positive(rng, space);

        double t = dt * static_cast<double>(1 + rng.index(8));
        double s = dt * static_cast<double>(1 + rng.index(8));

        Trajectory whole = evolve(u, gamma, rates, t + s, Scheme::picard, dt);
        Trajectory first = evolve(u, gamma, rates, s, Scheme::picard, dt);
        Trajectory second = evolve(first.state(first.size() - 1), gamma, rates, t, Scheme::picard, dt);
        worst_comp = std::max(
            worst_comp, flat_distance(whole.state(whole.size() - 1), second.state(second.size() - 1)));

        Trajectory at_zero = evolve(u, gamma, rates, 0.0, Scheme::picard, dt);
        const auto& w0 = at_zero.state(0).weights();
        identity_exact = identity_exact && w0.size() == u.weights().size() &&
                         std::memcmp(w0.data(), u.weights().data(), w0.size() * sizeof(double)) == 0;
    }
    r.check(worst_comp < tol_bar, "composition phi(t+s) vs phi(t) after phi(s), " +
                                      std::to_string(cases) + " cases: worst flat gap " +
                                      sci(worst_comp) + " (bar " + sci(tol_bar) + ")");
    r.check(identity_exact, "phi(0) returns the initial weights bit for bit");
    return r.all_ok();
}

bool suite_lipschitz(std::uint64_t seed, std::ostream& out) {
    Reporter r(out);
    Rng rng(seed ^ 0x6c6970ULL);

    SpacePtr space = build_explicit({{0.0}, {0.5}, {1.2}}, MetricChoice::euclidean);
    VitalRates rates = make_logistic_a2({2.0, 1.8, 1.5}, {1.0, 1.0, 1.0}, 1.0);
    const double N = 2.0;
    VitalRates rates_n = truncate(rates, N);
    MutationKernel gamma = make_smoothed_kernel(space, 0.5);
    MutationKernel alt = make_pure_selection(space);
    DiscreteMeasure u = DiscreteMeasure::positive(space, {0.5, 0.3, 0.2});
    DiscreteMeasure bump = DiscreteMeasure::positive(space, {0.3, 0.4, 0.3});

    const double T = 1.0;
    const double dt = 0.01;
    Trajectory base = evolve(u, gamma, rates_n, T, Scheme::picard, dt);
    const DiscreteMeasure& base_end = base.state(base.size() - 1);

    std::vector<double> ratios;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        DiscreteMeasure u_eps = u + eps * bump;
        MutationKernel gamma_eps = mix_kernels(gamma, alt, eps);
        double d_in = flat_distance(u_eps, u) + kernel_sup_norm_dist(gamma_eps, gamma);
        Trajectory pert = evolve(u_eps, gamma_eps, rates_n, T, Scheme::picard, dt);
        double d_out = flat_distance(pert.state(pert.size() - 1), base_end) +
                       kernel_sup_norm_dist(gamma_eps, gamma);
        ratios.push_back(d_out / d_in);
    }
    double spread = *std::max_element(ratios.begin(), ratios.end()) /
                    *std::min_element(ratios.begin(), ratios.end());
    r.check(spread < 3.0, "response/perturbation ratio over eps in {1e-1,1e-2,1e-3}: ratios " +
                              sci(ratios[0]) + ", " + sci(ratios[1]) + ", " + sci(ratios[2]) +
                              "; spread factor " + sci(spread) + " (bar 3)");

    RateNorms bn = sampled_rate_norms(rates_n, true, N, *space);
    RateNorms dn = sampled_rate_norms(rates_n, false, N, *space);
    double worst_field = -1e300;
    const std::size_t pairs = 20;
    for (std::size_t rep = 0; rep < pairs; ++rep) {
        DiscreteMeasure zeta = random_positive(rng, space, 0.0, 0.6);
        DiscreteMeasure beta = random_positive(rng, space, 0.0, 0.6);
        MutationKernel g1 = random_stochastic_kernel(rng, space);
        MutationKernel g2 = random_stochastic_kernel(rng, space);
        double lip_lambda = certify_kernel_lip(g2);

        double lhs = flat_norm(vector_field_truncated(zeta, g1, rates, N) -
                               vector_field_truncated(beta, g2, rates, N));
        double norm_zeta = flat_norm(zeta);
        double b_gamma = bn.sup_at_zero * norm_zeta;
        double b_mu = bn.lip * norm_zeta + bn.bl * (1.0 + lip_lambda) + norm_zeta * dn.bl + dn.bl;
        double rhs = b_gamma * kernel_sup_norm_dist(g1, g2) + b_mu * flat_distance(zeta, beta);
        worst_field = std::max(worst_field, lhs - rhs);
    }
    r.check(worst_field <= kMarginTol,
            "field difference within the certified Lipschitz bound on " + std::to_string(pairs) +
                " pairs: worst margin " + sci(worst_field));
    return r.all_ok();
}

bool suite_dissipativity(std::uint64_t seed, std::ostream& out) {
    Reporter r(out);
    (void)seed;

    SpacePtr space = build_explicit({{0.0}, {1.0}}, MetricChoice::euclidean);
    VitalRates rates = make_logistic_a2({2.0, 1.5}, {1.0, 1.0}, 1.0);
    AsymptoticProfile prof = profile(rates, *space);
    VitalRates rates_n = truncate(rates, std::ceil(*prof.k_diamond) + 1.0);
    MutationKernel gamma = make_pure_selection(space);
    DiscreteMeasure u = DiscreteMeasure::positive(space, {1.5, 1.5});

    const double T = 20.0 / prof.varpi;
    Trajectory traj = evolve(u, gamma, rates_n, T, Scheme::picard, 0.02);
    DissipativityReport rep = dissipativity_check(traj, prof, 0.75 * T, 0.01, 1e-6);
    r.check(rep.pass(), "supercritical game settles under k_diamond: sup after burn-in " +
                            sci(rep.sup_after_burn_in) + " vs bound " + sci(rep.bound) +
                            ", worst derivative above " + sci(rep.worst_derivative_above));

    VitalRates sub = make_logistic_a2({0.5, 0.6}, {1.0, 1.0}, 1.0);
    AsymptoticProfile sub_prof = profile(sub, *space);
    Trajectory decay = evolve(u, gamma, sub, 20.0, Scheme::picard, 0.02);
    double final_mass = decay.state(decay.size() - 1).total_mass();
    r.check(!sub_prof.k_diamond && final_mass < 1e-3,
            "subcritical game defines no capacity and decays: final mass " + sci(final_mass));
    return r.all_ok();
}

bool suite_masslaw(std::uint64_t seed, std::ostream& out) {
    Reporter r(out);
    Rng rng(seed ^ 0x6d617373ULL);

    SpacePtr space = build_explicit({{0.0}, {0.6}, {1.3}}, MetricChoice::euclidean);
    VitalRates rates = truncate(make_logistic_a2({2.0, 1.7, 1.4}, {1.0, 1.0, 1.0}, 1.0), 2.0);
    MutationKernel gamma = make_smoothed_kernel(space, 0.6);
    DiscreteMeasure u = DiscreteMeasure::positive(space, {0.4, 0.3, 0.3});
    BLFunction one = BLFunction::constant(space, 1.0);

    Trajectory coarse = evolve(u, gamma, rates, 0.5, Scheme::picard, 0.02);
    Trajectory fine = evolve(u, gamma, rates, 0.5, Scheme::picard, 0.01);
    double r_coarse = constraint_residual(coarse, one, 0.26);
    double r_fine = constraint_residual(fine, one, 0.26);
    double ratio = r_coarse / r_fine;
    r.check(ratio > 2.5 && ratio < 6.0, "mass-law residual shrinks ~4x under dt halving: ratio " +
                                            sci(ratio) + " (window [2.5, 6])");

    // Negative control: a kernel whose columns sum to 0.9 leaks mass; the
    // mass-law detector must catch it.
    double detector_good = 0.0;
    double detector_broken = 0.0;
    {
        std::size_t m = space->size();
        std::vector<double> broken_data(m * m, 0.9 / static_cast<double>(m));
        MutationKernel broken = MutationKernel::unchecked(space, broken_data);
        DiscreteMeasure mu = random_positive(rng, space);
        double expected = 0.0;
        double X = mu.total_mass();
        for (std::size_t i = 0; i < m; ++i)
            expected += mu[i] * (rates.birth(X, i) - rates.death(X, i));
        detector_good = std::abs(pair(vector_field(mu, gamma, rates), one) - expected);
        detector_broken = std::abs(pair(vector_field(mu, broken, rates), one) - expected);
    }
    r.check(detector_good <= 1e-12,
            "mass law holds for a stochastic kernel: gap " + sci(detector_good));
    r.check(detector_broken > 1e-3, "detector fires on a kernel with column sums 0.9: gap " +
                                        sci(detector_broken));
    return r.all_ok();
}

struct SuiteEntry {
    const char* name;
    bool (*fn)(std::uint64_t, std::ostream&);
};

constexpr SuiteEntry kSuites[] = {
    {"oracle", suite_oracle},           {"norms", suite_norms},
    {"bullet", suite_bullet},           {"positivity", suite_positivity},
    {"semiflow", suite_semiflow},       {"lipschitz", suite_lipschitz},
    {"dissipativity", suite_dissipativity}, {"masslaw", suite_masslaw},
};

}  // namespace

bool run_verify(const std::string& suite, std::uint64_t seed, std::ostream& out) {
    bool found = false;
    bool all_ok = true;
    for (const SuiteEntry& entry : kSuites) {
        if (suite != "all" && suite != entry.name) continue;
        found = true;
        out << "suite " << entry.name << " (seed " << seed << ")\n";
        bool ok = entry.fn(seed, out);
        out << "suite " << entry.name << ": " << (ok ? "PASS" : "FAIL") << "\n";
        all_ok = all_ok && ok;
    }
    if (!found) {
        std::string names;
        for (const SuiteEntry& entry : kSuites) {
            if (!names.empty()) names += ", ";
            names += entry.name;
        }
        throw ConfigError("unknown verify suite '" + suite + "'; expected all, " + names);
    }
    out << (all_ok ? "verify: PASS" : "verify: FAIL") << "\n";
    return all_ok;
}

}  // namespace mveg
