#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dres/oracles.hpp"
#include "dres/tariff.hpp"

using namespace dres;

TEST_CASE("grid_bruteforce_opg: single consumer takes the whole budget") {
    const Population pop = Population::homogeneous({1.0}, 1.5, 0.8);
    const auto res = oracles::grid_bruteforce_opg(2.0, pop, {0.01, 10.0});
    CHECK(res.x[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(res.chi_used <= 2.0 + 1e-9);
}

TEST_CASE("grid_bruteforce_opg: zero budget, zero allocation") {
    const Population pop = Population::homogeneous({1.0, 2.0}, 1.5, 0.8);
    const auto res = oracles::grid_bruteforce_opg(0.0, pop, {0.01, 10.0});
    for (double v : res.x) CHECK(v == 0.0);
    CHECK(res.objective == 0.0);
    CHECK_THROWS_AS(oracles::grid_bruteforce_opg(-1.0, pop, {0.01, 10.0}),
                    std::domain_error);
}

TEST_CASE("grid_bruteforce_opg: never exceeds the budget") {
    const Population pop = Population::homogeneous({0.7, 1.1, 1.9}, 1.5, 0.8);
    for (double chi : {0.333, 1.777, 3.21}) {
        const auto res = oracles::grid_bruteforce_opg(chi, pop, {0.01, 10.0});
        double s = 0.0;
        for (double v : res.x) s += v;
        CHECK(s <= chi + 1e-12);
    }
}

TEST_CASE("grid guard rejects oversized instances") {
    const Population pop =
        Population::homogeneous({1.0, 1.0, 1.0, 1.0, 1.0}, 1.5, 0.8);
    CHECK_THROWS_AS(oracles::grid_bruteforce_opg(5.0, pop, {0.001, 10.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(oracles::grid_bruteforce_opg(1.0, pop, {0.0, 10.0}),
                    std::invalid_argument);
}

TEST_CASE("grid_bruteforce_ee: homogeneous K=2 ties with the symmetric optimum") {
    const Population pop = Population::homogeneous({1.0, 1.0}, 1.5, 0.8);
    const auto res = oracles::grid_bruteforce_ee(pop, {0.01, 3.0});
    CHECK(res.e_star > 0.0);
    // With identical consumers the single-active and symmetric allocations
    // have exactly equal ratios; the lexicographic tie-break returns the
    // single-active one, so certify the symmetric point attains e_star.
    const double x1 = std::max(res.x[0], res.x[1]);
    const double sym = 2.0 * eval_utility(x1, pop.sorted()[0]) / (2.0 * x1);
    CHECK(sym == doctest::Approx(res.e_star).epsilon(1e-12));
}

TEST_CASE("grid_bruteforce_ee: refinement only improves the coarse value") {
    const Population pop = Population::homogeneous({1.0, 1.7}, 1.5, 0.8);
    const auto coarse = oracles::grid_bruteforce_ee(pop, {0.05, 3.0}, 0);
    const auto fine = oracles::grid_bruteforce_ee(pop, {0.05, 3.0}, 2);
    CHECK(fine.e_star >= coarse.e_star - 1e-15);
}

TEST_CASE("bruteforce_best_response: flat-price sanity") {
    const ConsumerProfile prof{1.0, 1.5, 0.8, {}, 0.0};
    const Population pop = Population::homogeneous({1.0}, 1.5, 0.8);
    CHECK(oracles::bruteforce_best_response(constant_rtp_tariff(50.0, pop), 0,
                                            prof, {1e-3, 6.0}) == 0.0);
    CHECK(oracles::bruteforce_best_response(constant_rtp_tariff(0.8, pop), 0,
                                            prof, {1e-3, 6.0}) ==
          doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("bruteforce_best_response: matches the analytic responder") {
    std::mt19937_64 rng(401);
    // Prices at or above alpha keep the optimal response within the grid
    // bound (the gain-branch surplus is (p/alpha)^{1/(alpha-1)} <= 1).
    std::uniform_real_distribution<double> ur(0.8, 2.5), uq(0.8, 2.0);
    for (int t = 0; t < 100; ++t) {
        const ConsumerProfile prof{ur(rng), 1.5, 0.8, {}, 0.0};
        IbrTariff tariff;
        tariff.p = uq(rng);
        tariff.q = tariff.p * 0.9; // q slightly below p, IBR-shaped
        tariff.thresholds = {prof.r * 0.8};
        const double a = best_response(tariff, 0, prof);
        const double b =
            oracles::bruteforce_best_response(tariff, 0, prof, {1e-4, 8.0});
        CHECK(std::abs(a - b) <= 2e-4);
    }
}

TEST_CASE("finite_difference_marginal: agrees with the analytic derivative") {
    const ConsumerProfile prof{1.0, 1.5, 0.8, {}, 0.0};
    CHECK(oracles::finite_difference_marginal(2.0, prof, 1e-6) ==
          doctest::Approx(0.8).epsilon(1e-6));
    CHECK(oracles::finite_difference_marginal(0.5, prof, 1e-6) ==
          doctest::Approx(marginal_benefit(0.5, prof)).epsilon(1e-6));
    CHECK(oracles::finite_difference_marginal(0.5, prof, 1e-6) > 0.0);
    CHECK_THROWS_AS(oracles::finite_difference_marginal(1.0 + 1e-9, prof, 1e-6),
                    std::domain_error);
    CHECK_THROWS_AS(oracles::finite_difference_marginal(1e-9, prof, 1e-6),
                    std::domain_error);
}
