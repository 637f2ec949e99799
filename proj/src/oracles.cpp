#include "dres/oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dres::oracles {

namespace {

void check_guard(double points) {
    if (points > 1e7)
        throw std::invalid_argument(
            "GridSpec: instance exceeds the 1e7 grid-point guard");
}

} // namespace

AllocationResult grid_bruteforce_opg(double chi, const Population& pop,
                                     const GridSpec& grid) {
    if (!(grid.resolution > 0.0))
        throw std::invalid_argument("GridSpec: resolution must be > 0");
    if (chi < 0.0)
        throw std::domain_error("grid_bruteforce_opg: negative budget");

    const std::size_t K = pop.size();
    const int n = static_cast<int>(chi / grid.resolution); // floor: never
                                                           // exceed chi
    double pts = 1.0;
    for (std::size_t i = 0; i + 1 < K; ++i) pts *= n + 1;
    check_guard(pts);

    // Utility of every consumer at every grid multiple; the search then
    // only adds table entries.
    std::vector<std::vector<double>> table(K);
    for (std::size_t i = 0; i < K; ++i) {
        table[i].resize(n + 1);
        for (int k = 0; k <= n; ++k)
            table[i][k] =
                eval_utility(k * grid.resolution, pop.sorted()[i]);
    }

    std::vector<int> idx(K, 0), best_idx(K, 0);
    double best = -HUGE_VAL;
    // Nested budget recursion: consumer i takes idx[i] steps, the last
    // consumer takes the remainder.
    auto recurse = [&](auto&& self, std::size_t i, int left,
                       double acc) -> void {
        if (i + 1 == K) {
            idx[i] = left;
            const double v = acc + table[i][left];
            if (v > best) {
                best = v;
                best_idx = idx;
            }
            return;
        }
        for (int k = 0; k <= left; ++k) {
            idx[i] = k;
            self(self, i + 1, left - k, acc + table[i][k]);
        }
    };
    recurse(recurse, 0, n, 0.0);

    AllocationResult res;
    res.objective = best;
    std::vector<double> xs(K);
    for (std::size_t i = 0; i < K; ++i) {
        xs[i] = best_idx[i] * grid.resolution;
        res.chi_used += xs[i];
        if (xs[i] >= pop.sorted()[i].r - grid.resolution) ++res.active_set;
    }
    res.x = pop.to_input_order(xs);
    return res;
}

EeResult grid_bruteforce_ee(const Population& pop, const GridSpec& grid,
                            int refine_passes) {
    if (!(grid.resolution > 0.0))
        throw std::invalid_argument("GridSpec: resolution must be > 0");
    const std::size_t K = pop.size();
    const int n = static_cast<int>(grid.bound / grid.resolution);
    check_guard(std::pow(n + 1.0, static_cast<double>(K)));

    std::vector<double> lo(K), step(K, grid.resolution);
    for (std::size_t i = 0; i < K; ++i) lo[i] = pop.sorted()[i].m;
    std::vector<int> counts(K, n);

    double best = -HUGE_VAL;
    std::vector<double> best_x(K, 0.0);

    auto search = [&]() {
        std::vector<std::vector<double>> table(K);
        for (std::size_t i = 0; i < K; ++i) {
            table[i].resize(counts[i] + 1);
            for (int k = 0; k <= counts[i]; ++k)
                table[i][k] =
                    eval_utility(lo[i] + k * step[i], pop.sorted()[i]);
        }
        std::vector<double> x(K);
        auto recurse = [&](auto&& self, std::size_t i, double u_acc,
                           double x_acc) -> void {
            if (i == K) {
                if (x_acc <= 0.0) return; // undefined ratio at all-zero
                const double v = u_acc / x_acc;
                if (v > best) {
                    best = v;
                    best_x = x;
                }
                return;
            }
            for (int k = 0; k <= counts[i]; ++k) {
                x[i] = lo[i] + k * step[i];
                self(self, i + 1, u_acc + table[i][k], x_acc + x[i]);
            }
        };
        recurse(recurse, 0, 0.0, 0.0);
    };
    search();

    for (int pass = 0; pass < refine_passes; ++pass) {
        const std::vector<double> center = best_x;
        for (std::size_t i = 0; i < K; ++i) {
            const double fine = step[i] / 8.0;
            lo[i] = std::max(center[i] - 2.0 * step[i], pop.sorted()[i].m);
            step[i] = fine;
            counts[i] = 32;
        }
        search();
    }

    EeResult res;
    res.e_star = best;
    res.x = pop.to_input_order(best_x);
    res.iterations = 0;
    res.residual = 0.0;
    res.converged = true;
    return res;
}

double bruteforce_best_response(const IbrTariff& tariff, std::size_t i,
                                const ConsumerProfile& profile,
                                const GridSpec& grid) {
    if (!(grid.resolution > 0.0))
        throw std::invalid_argument("GridSpec: resolution must be > 0");
    const int n = static_cast<int>(grid.bound / grid.resolution);
    check_guard(n + 1.0);
    double best = -HUGE_VAL, best_x = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double x = k * grid.resolution;
        const double v = eval_utility(x, profile) - tariff.price(i, x);
        if (v >= best) { // ties toward larger consumption
            best = v;
            best_x = x;
        }
    }
    return best_x;
}

double finite_difference_marginal(double x, const ConsumerProfile& profile,
                                  double h) {
    if (!(h > 0.0))
        throw std::invalid_argument("finite_difference_marginal: h must be "
                                    "> 0");
    if (std::abs(x - profile.r) <= 10.0 * h)
        throw std::domain_error(
            "finite_difference_marginal: point too close to the kink");
    if (x - h <= 0.0)
        throw std::domain_error(
            "finite_difference_marginal: stencil leaves the domain");
    return (eval_utility(x + h, profile) - eval_utility(x - h, profile)) /
           (2.0 * h);
}

} // namespace dres::oracles
