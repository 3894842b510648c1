#include "mveg/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "mveg/bl_space.hpp"
#include "mveg/errors.hpp"
#include "mveg/strategy_space.hpp"
#include "mveg/vital_rates.hpp"

using namespace mveg;

namespace {

Trajectory synthetic_masses(const std::vector<double>& masses) {
    auto space = build_grid({0.0}, {0.0}, {1});
    std::vector<double> times;
    std::vector<DiscreteMeasure> states;
    for (std::size_t k = 0; k < masses.size(); ++k) {
        times.push_back(static_cast<double>(k));
        states.push_back(DiscreteMeasure(space, {masses[k]}));
    }
    return Trajectory(times, states, make_pure_selection(space),
                      make_logistic_a2({2.0}, {1.0}, 1.0));
}

}  // namespace

TEST_CASE("reproduction numbers follow B over D") {
    auto a2 = make_logistic_a2({2.0}, {1.0}, 1.0);
    CHECK(reproduction_number(a2, 1.0, 0) == doctest::Approx(1.0));
    CHECK(reproduction_number(a2, 0.0, 0) == doctest::Approx(2.0));

    auto ricker = make_ricker({2.0}, {1.0}, 1.0, {0.0});
    CHECK(reproduction_number(ricker, std::log(2.0), 0) == doctest::Approx(1.0).epsilon(1e-15));

    auto paper = make_logistic_paper({1.0}, {1.0});
    CHECK_THROWS_AS(reproduction_number(paper, 0.0, 0), NumericsError);
    CHECK(reproduction_number(paper, 2.0, 0) == doctest::Approx(0.5));
}

TEST_CASE("carrying capacities come out of the bisection") {
    auto a2 = make_logistic_a2({2.0}, {1.0}, 1.0);
    auto k = carrying_capacity(a2, 0, 20.0);
    REQUIRE(k.has_value());
    CHECK(*k == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(reproduction_number(a2, *k, 0) - 1.0) < 1e-9);

    auto ricker = make_ricker({2.0}, {1.0}, 1.0, {0.0});
    auto kr = carrying_capacity(ricker, 0, 20.0);
    REQUIRE(kr.has_value());
    CHECK(*kr == doctest::Approx(0.6931471805599453).epsilon(1e-9));

    auto bh = make_beverton_holt({2.0}, {1.0}, 1.0, {0.0});
    auto kb = carrying_capacity(bh, 0, 20.0);
    REQUIRE(kb.has_value());
    CHECK(*kb == doctest::Approx(1.0).epsilon(1e-9));

    auto subcritical = make_logistic_a2({0.5}, {1.0}, 1.0);
    CHECK_FALSE(carrying_capacity(subcritical, 0, 20.0).has_value());

    auto critical = make_logistic_a2({1.0}, {1.0}, 1.0);
    auto kc = carrying_capacity(critical, 0, 20.0);
    REQUIRE(kc.has_value());
    CHECK(*kc == 0.0);

    auto flat = make_logistic_a2({2.0}, {1e-7}, 1.0);
    CHECK_THROWS_AS(carrying_capacity(flat, 0, 10.0), NumericsError);
}

TEST_CASE("profiles aggregate capacities over the space") {
    auto two = build_grid({0.0}, {1.0}, {2});
    auto rates = make_logistic_a2({2.0, 3.0}, {1.0, 1.0}, 1.0);
    auto prof = profile(rates, *two);
    REQUIRE(prof.capacity[0].has_value());
    REQUIRE(prof.capacity[1].has_value());
    CHECK(*prof.capacity[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*prof.capacity[1] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(*prof.k_diamond == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(*prof.k_floor == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(prof.fittest == 1);
    CHECK(prof.varpi == doctest::Approx(1.0));
    // default bracket: 10 * max birth at zero / varpi
    CHECK(prof.s_max == doctest::Approx(30.0));

    auto uniform = profile(make_logistic_a2({2.0, 2.0}, {1.0, 1.0}, 1.0), *two);
    CHECK(*uniform.k_diamond == doctest::Approx(*uniform.k_floor));
    CHECK(uniform.fittest == 0);  // tie falls to the lowest index

    auto dying = profile(make_logistic_a2({0.5, 0.25}, {1.0, 1.0}, 1.0), *two);
    CHECK_FALSE(dying.k_diamond.has_value());
    CHECK_FALSE(dying.fittest.has_value());
    CHECK_FALSE(dying.capacity[0].has_value());
}

TEST_CASE("paper logistic grid profile peaks at the corner") {
    auto grid = build_grid({0.5, 0.5}, {1.5, 1.5}, {5, 5});
    const std::size_t m = grid->size();
    std::vector<double> q1(m), q2(m);
    for (std::size_t i = 0; i < m; ++i) {
        q1[i] = grid->coord(i, 0);
        q2[i] = grid->coord(i, 1);
    }
    auto rates = make_logistic_paper(q1, q2);
    auto prof = profile(rates, *grid);

    // independent exhaustive scan of the closed-form capacities
    double best = 0.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double k = q1[i] / q2[i];
        if (k > best) {
            best = k;
            best_i = i;
        }
    }
    CHECK(best == doctest::Approx(3.0));
    CHECK(grid->coord(best_i, 0) == doctest::Approx(1.5));
    CHECK(grid->coord(best_i, 1) == doctest::Approx(0.5));

    CHECK(*prof.k_diamond == doctest::Approx(3.0));
    CHECK(prof.fittest == best_i);
    CHECK(prof.r0[best_i] == std::numeric_limits<double>::infinity());
    CHECK(prof.varpi == 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        REQUIRE(prof.capacity[i].has_value());
        CHECK(*prof.capacity[i] == doctest::Approx(q1[i] / q2[i]).epsilon(1e-12));
    }
}

TEST_CASE("profile without a mortality floor needs an explicit bracket") {
    auto two = build_grid({0.0}, {1.0}, {2});
    auto no_floor = make_custom([](double, std::size_t) { return 2.0; },
                                [](double X, std::size_t) { return X; }, 2, true, false);
    CHECK_THROWS_AS(profile(no_floor, *two), ConfigError);
    CapacityOptions opts;
    opts.s_max = 50.0;
    auto prof = profile(no_floor, *two, opts);
    CHECK(*prof.k_diamond == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("dissipativity reports bound the tail and its growth") {
    auto prof = profile(make_logistic_a2({2.0}, {1.0}, 1.0),
                        *build_grid({0.0}, {0.0}, {1}));
    REQUIRE(prof.k_diamond.has_value());
    CHECK(*prof.k_diamond == doctest::Approx(1.0).epsilon(1e-9));

    auto settling = synthetic_masses({3.0, 2.0, 1.2, 0.9, 0.95});
    auto report = dissipativity_check(settling, prof, 2.0, 0.25);
    CHECK(report.applicable);
    CHECK(report.sup_after_burn_in == doctest::Approx(1.2));
    CHECK(report.eventually_bounded);
    CHECK(report.samples_above == 3);
    CHECK(report.worst_derivative_above == doctest::Approx(-0.3));
    CHECK(report.monotone_above_bound);
    CHECK(report.final_mass == doctest::Approx(0.95));
    CHECK(report.final_derivative == doctest::Approx(0.05));
    CHECK(report.pass());

    auto exploding = synthetic_masses({3.0, 3.5, 4.0, 4.5, 5.0});
    auto bad = dissipativity_check(exploding, prof, 2.0, 0.25);
    CHECK_FALSE(bad.eventually_bounded);
    CHECK_FALSE(bad.monotone_above_bound);
    CHECK_FALSE(bad.pass());

    AsymptoticProfile empty;
    auto na = dissipativity_check(settling, empty, 2.0, 0.25);
    CHECK_FALSE(na.applicable);
    CHECK_FALSE(na.pass());

    CHECK_THROWS_AS(dissipativity_check(settling, prof, 99.0, 0.25), ConfigError);
}
