#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dres/allocation.hpp"
#include "dres/oracles.hpp"
#include "dres/tariff.hpp"

using namespace dres;

namespace {

const std::vector<double> kDefaultR{1.0, 1.5, 2.0, 2.5, 3.0};

Population default_pop() { return Population::homogeneous(kDefaultR, 1.5, 0.8); }
CostModel default_cost() { return CostModel::quadratic(0.05, 0.5, 0.0); }

} // namespace

TEST_CASE("welfare: closed forms at boundary budgets") {
    const auto pop = default_pop();
    const auto cost = default_cost();
    CHECK(welfare(0.0, pop, cost) == doctest::Approx(0.0).epsilon(1e-12));
    double expect = 0.0;
    for (double r : kDefaultR) expect += 1.5 * std::pow(r, 0.8);
    expect -= 0.05 * 100.0 + 0.5 * 10.0;
    CHECK(welfare(10.0, pop, cost) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(2.9208060464).epsilon(1e-9));
}

TEST_CASE("welfare: continuous across interval boundaries") {
    const auto pop = default_pop();
    const auto cost = default_cost();
    double cum = 0.0;
    for (double r : kDefaultR) {
        cum += r;
        CHECK(welfare(cum - 1e-6, pop, cost) ==
              doctest::Approx(welfare(cum + 1e-6, pop, cost)).epsilon(1e-4));
    }
}

TEST_CASE("find_chi_star: matches a dense grid scan on default parameters") {
    const auto pop = default_pop();
    const auto cost = default_cost();
    const auto opt = find_chi_star(pop, cost);

    // Independent oracle: dense scan at 1e-4 over [0, chi_cap].
    const double mc = cost.derivative(pop.total_reference());
    const double cap =
        pop.total_reference() + 5.0 * std::pow(mc / 0.8, 1.0 / (0.8 - 1.0));
    double best_chi = 0.0, best_w = -HUGE_VAL;
    const int n = static_cast<int>(cap / 1e-4);
    for (int i = 0; i <= n; ++i) {
        const double chi = cap * i / n;
        const double w = welfare(chi, pop, cost);
        if (w > best_w) {
            best_w = w;
            best_chi = chi;
        }
    }
    CHECK(std::abs(opt.chi_star - best_chi) <= 1e-3);
    CHECK(welfare(opt.chi_star, pop, cost) >= best_w - 1e-9);

    // Local optimality probes and the active-set bracket for J*.
    CHECK(welfare(opt.chi_star, pop, cost) >=
          welfare(opt.chi_star - 1e-3, pop, cost) - 1e-12);
    CHECK(welfare(opt.chi_star, pop, cost) >=
          welfare(opt.chi_star + 1e-3, pop, cost) - 1e-12);
    double cum = 0.0;
    for (std::size_t i = 0; i < opt.j_star; ++i) cum += kDefaultR[i];
    CHECK(cum <= opt.chi_star);
}

TEST_CASE("find_chi_star: prohibitive linear cost drives chi to zero") {
    const auto pop = default_pop();
    const auto cost = CostModel::linear(10.0, 0.0);
    const auto opt = find_chi_star(pop, cost);
    CHECK(opt.chi_star <= 1e-6);
    CHECK(opt.j_star == 0);
}

TEST_CASE("find_chi_star: rejects decreasing cost") {
    const auto cost = CostModel::custom([](double x) { return -x; },
                                        [](double) { return -1.0; });
    CHECK_THROWS_AS(find_chi_star(default_pop(), cost), std::invalid_argument);
}

TEST_CASE("marginal_price_p: closed-form and derivative consistency") {
    const auto pop = default_pop();
    // Surplus s=1 per active consumer: chi = sum r + K*1.
    CHECK(marginal_price_p(15.0, pop) == doctest::Approx(0.8).epsilon(1e-9));
    // s=32 => p = 0.8 * 32^{-0.2} = 0.4.
    CHECK(marginal_price_p(10.0 + 5.0 * 32.0, pop) ==
          doctest::Approx(0.4).epsilon(1e-9));

    const auto opt = find_chi_star(pop, default_cost());
    const double p = marginal_price_p(opt.chi_star, pop);
    const auto res = solve_opg(opt.chi_star, pop);
    for (std::size_t pos = 0; pos < opt.j_star; ++pos) {
        const std::size_t i = pop.input_index()[pos];
        CHECK(marginal_benefit(res.x[i], pop.sorted()[pos]) ==
              doctest::Approx(p).epsilon(1e-9));
    }
    CHECK_THROWS_AS(marginal_price_p(0.5, pop), degenerate_tariff_error);
}

TEST_CASE("design_ibr: schedule continuity and window placement") {
    const auto pop = default_pop();
    const auto t = design_ibr(pop, default_cost());
    CHECK(t.p > 0.0);
    CHECK(t.q > 0.0);
    CHECK(t.delta <= 0.0);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(t.thresholds[i] < kDefaultR[i]);
        const double thr = t.thresholds[i];
        CHECK(t.q * thr ==
              doctest::Approx((t.q - t.p) * thr + t.p * thr).epsilon(1e-12));
        // Nondecreasing payment.
        double prev = -1.0;
        for (int k = 0; k <= 100; ++k) {
            const double x = 6.0 * k / 100.0;
            const double pay = t.price(i, x);
            CHECK(pay >= prev - 1e-12);
            prev = pay;
        }
        CHECK(t.price(i, 0.0) == 0.0);
    }
}

TEST_CASE("design_ibr: best responses reconstruct the welfare optimum") {
    const auto pop = default_pop();
    const auto cost = default_cost();
    const auto t = design_ibr(pop, cost);
    const auto rep = verify_reconstruction(t, pop, cost);

    std::size_t matches = 0;
    for (bool f : rep.match) matches += f ? 1 : 0;
    CHECK(matches >= pop.size() - 1); // all i != J*+1 must match
    for (std::size_t pos = 0; pos < pop.size(); ++pos) {
        const std::size_t i = pop.input_index()[pos];
        if (pos + 1 == t.j_star + 1) continue;
        CHECK(rep.match[i]);
    }
    // The surplus bound holds at default parameters, so reconstruction is
    // perfect.
    CHECK(rep.surplus_condition);
    CHECK(rep.perfect);

    // Cross-check each best response against the brute-force oracle.
    for (std::size_t pos = 0; pos < pop.size(); ++pos) {
        const std::size_t i = pop.input_index()[pos];
        const double br = best_response(t, i, pop.sorted()[pos]);
        const double oracle = oracles::bruteforce_best_response(
            t, i, pop.sorted()[pos], {1e-4, 8.0});
        CHECK(std::abs(br - oracle) <= 2e-4);
    }
}

TEST_CASE("design_ibr: participation preferences at the window midpoint") {
    const auto pop = default_pop();
    const auto t = design_ibr(pop, default_cost());
    REQUIRE(t.j_star >= 1);
    // Consumer J* strictly prefers its intended consumption to dropping out.
    const std::size_t jpos = t.j_star - 1;
    const std::size_t ji = pop.input_index()[jpos];
    const auto res = solve_opg(t.chi_star, pop);
    const double intended = res.x[ji];
    CHECK(eval_utility(intended, pop.sorted()[jpos]) -
              t.price(ji, intended) >
          0.0);
    // A consumer beyond the active set prefers zero.
    if (t.j_star + 1 < pop.size()) {
        const std::size_t kpos = t.j_star + 1;
        const std::size_t ki = pop.input_index()[kpos];
        CHECK(best_response(t, ki, pop.sorted()[kpos]) == 0.0);
    }
}

TEST_CASE("best_response: closed-form candidates") {
    const ConsumerProfile prof{1.0, 1.5, 0.8, {}, 0.0};
    const Population pop = Population::homogeneous({1.0}, 1.5, 0.8);
    {
        const auto t = constant_rtp_tariff(100.0, pop);
        CHECK(best_response(t, 0, prof) == 0.0);
    }
    {
        const auto t = constant_rtp_tariff(0.8, pop); // p = alpha
        CHECK(best_response(t, 0, prof) == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(oracles::bruteforce_best_response(t, 0, prof, {1e-4, 6.0}) ==
              doctest::Approx(2.0).epsilon(1e-3));
    }
    CHECK_THROWS_AS(constant_rtp_tariff(0.0, pop), std::invalid_argument);
}

TEST_CASE("property: random instances reconstruct all but the marginal "
          "consumer") {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> ur(0.5, 3.0), ua(0.6, 0.9);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t K = 2 + trial % 3;
        std::vector<double> r(K);
        for (double& v : r) v = ur(rng);
        const double alpha = ua(rng);
        const Population pop = Population::homogeneous(r, 1.5, alpha);
        const auto cost = default_cost();
        IbrTariff t;
        try {
            t = design_ibr(pop, cost);
        } catch (const degenerate_tariff_error&) {
            continue;
        }
        const auto rep = verify_reconstruction(t, pop, cost);
        std::size_t matches = 0;
        for (bool f : rep.match) matches += f ? 1 : 0;
        CHECK(matches >= K - 1);
        if (rep.quadratic_guarantee) CHECK(rep.perfect);
    }
}

TEST_CASE("property: realized IBR welfare dominates the flat baseline") {
    std::mt19937_64 rng(203);
    std::uniform_real_distribution<double> ur(1.0, 3.0);
    const auto cost = default_cost();
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> r(5);
        for (double& v : r) v = ur(rng);
        const Population pop = Population::homogeneous(r, 1.5, 0.8);
        IbrTariff ibr;
        try {
            ibr = design_ibr(pop, cost);
        } catch (const degenerate_tariff_error&) {
            continue;
        }
        const auto flat = constant_rtp_tariff(ibr.p, pop);
        double u_ibr = 0.0, u_flat = 0.0, l_ibr = 0.0, l_flat = 0.0;
        for (std::size_t pos = 0; pos < pop.size(); ++pos) {
            const std::size_t i = pop.input_index()[pos];
            const double xi = best_response(ibr, i, pop.sorted()[pos]);
            const double xf = best_response(flat, i, pop.sorted()[pos]);
            u_ibr += eval_utility(xi, pop.sorted()[pos]);
            u_flat += eval_utility(xf, pop.sorted()[pos]);
            l_ibr += xi;
            l_flat += xf;
        }
        CHECK(u_ibr - cost.value(l_ibr) >= u_flat - cost.value(l_flat) - 1e-9);
    }
}

TEST_CASE("single consumer reconstructs trivially") {
    const Population pop = Population::homogeneous({2.0}, 1.5, 0.8);
    const auto cost = default_cost();
    const auto t = design_ibr(pop, cost);
    const auto rep = verify_reconstruction(t, pop, cost);
    CHECK(rep.perfect);
}

TEST_CASE("WelfareReport invariant: welfare recomputes from its parts") {
    const auto pop = default_pop();
    const auto cost = default_cost();
    const auto t = design_ibr(pop, cost);
    const auto rep = verify_reconstruction(t, pop, cost);
    double u = 0.0;
    for (std::size_t pos = 0; pos < pop.size(); ++pos)
        u += eval_utility(rep.x_star[pop.input_index()[pos]],
                          pop.sorted()[pos]);
    CHECK(rep.welfare ==
          doctest::Approx(u - cost.value(rep.chi_star)).epsilon(1e-9));
}
