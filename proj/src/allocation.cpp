#include "dres/allocation.hpp"

#include <algorithm>
#include <cmath>

namespace dres {

namespace {

double sum_utility(const std::vector<double>& x_sorted,
                   const Population& pop) {
    double s = 0.0;
    for (std::size_t i = 0; i < x_sorted.size(); ++i)
        s += eval_utility(x_sorted[i], pop.sorted()[i]);
    return s;
}

AllocationResult finish(std::vector<double> x_sorted, std::size_t J,
                        bool used_opb, const Population& pop) {
    AllocationResult res;
    res.objective = sum_utility(x_sorted, pop);
    res.active_set = J;
    res.used_opb = used_opb;
    for (double v : x_sorted) res.chi_used += v;
    res.x = pop.to_input_order(x_sorted);
    return res;
}

} // namespace

SubproblemSolution solve_subproblem_a(double C1, double r, double a1,
                                      double lambda, double alpha) {
    if (C1 < 0.0)
        throw std::domain_error("solve_subproblem_a: negative budget");
    if (a1 > lambda)
        throw regime_error(
            "solve_subproblem_a: a1 > lambda, use solve_subproblem_b");
    const double thr = r * std::pow(lambda / a1, 1.0 / (alpha - 1.0));
    if (C1 <= thr) return {C1, 0.0, Branch::AllToX};
    if (C1 <= r) {
        const double x =
            (r - C1) / (std::pow(lambda / a1, 1.0 / (1.0 - alpha)) - 1.0);
        return {x, C1 - x, Branch::InteriorLoss};
    }
    const double A = std::pow(a1, 1.0 / (1.0 - alpha));
    const double x = (C1 - r) * A / (1.0 + A);
    return {x, r + (C1 - r) / (1.0 + A), Branch::InteriorGain};
}

double gamma1_root(double a2, double lambda, double alpha) {
    if (!(a2 > lambda))
        throw regime_error("gamma1_root: requires a2 > lambda");
    const double A = std::pow(a2, 1.0 / (1.0 - alpha));
    // f(1) = a2 - lambda > 0; f -> -inf since (1+A)^(1-alpha) > a2.
    auto f = [&](double g) {
        return a2 * std::pow(g, alpha) -
               std::pow(g - 1.0, alpha) * std::pow(1.0 + A, 1.0 - alpha) -
               lambda;
    };
    double lo = 1.0, hi = 2.0;
    int guard = 0;
    while (f(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 200)
            throw std::runtime_error(
                "gamma1_root: no sign change found up to gamma = " +
                std::to_string(hi));
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (std::abs(f(mid)) <= 1e-10 && hi - lo < 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

SubproblemSolution solve_subproblem_b(double C2, double r, double a2,
                                      double lambda, double alpha) {
    if (C2 < 0.0)
        throw std::domain_error("solve_subproblem_b: negative budget");
    const double g1 = gamma1_root(a2, lambda, alpha);
    if (C2 < r * g1) return {C2, 0.0, Branch::AllToX};
    const double A = std::pow(a2, 1.0 / (1.0 - alpha));
    const double x = (C2 - r) * A / (1.0 + A);
    return {x, r + (C2 - r) / (1.0 + A), Branch::InteriorGain};
}

AllocationResult solve_opg(double chi, const Population& pop) {
    if (chi < 0.0) throw std::domain_error("solve_opg: negative budget");
    const auto& ps = pop.sorted();
    const std::size_t K = ps.size();
    const double alpha = pop.alpha();
    const double lambda = pop.lambda();

    // Largest J with sum_{i<=J} r_i <= chi (within tolerance).
    std::size_t J = 0;
    double cum = 0.0;
    while (J < K && cum + ps[J].r <= chi + 1e-9) cum += ps[J++].r;

    std::vector<double> x(K, 0.0);
    if (J == 0) {
        x[0] = chi;
        return finish(std::move(x), 0, false, pop);
    }
    const double residual = std::max(chi - cum, 0.0);
    if (J == K) {
        for (std::size_t i = 0; i < K; ++i)
            x[i] = ps[i].r + residual / static_cast<double>(K);
        return finish(std::move(x), K, false, pop);
    }
    const double aJ = std::pow(static_cast<double>(J), 1.0 - alpha);
    SubproblemSolution split;
    bool used_opb = false;
    if (aJ <= lambda) {
        split = solve_subproblem_a(residual, ps[J].r, aJ, lambda, alpha);
    } else {
        split = solve_subproblem_b(residual, ps[J].r, aJ, lambda, alpha);
        used_opb = true;
    }
    for (std::size_t i = 0; i < J; ++i)
        x[i] = ps[i].r + split.x / static_cast<double>(J);
    x[J] = split.y;
    return finish(std::move(x), J, used_opb, pop);
}

AllocationResult allocate_ppa(double chi, const Population& pop) {
    if (chi < 0.0) throw std::domain_error("allocate_ppa: negative budget");
    const double total = pop.total_reference();
    if (!(total > 0.0))
        throw std::domain_error("allocate_ppa: zero total reference");
    std::vector<double> x(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i)
        x[i] = pop.sorted()[i].r / total * chi;
    std::size_t J = 0;
    while (J < pop.size() && x[J] >= pop.sorted()[J].r - 1e-9) ++J;
    return finish(std::move(x), J, false, pop);
}

AllocationResult allocate_upa(double chi, const Population& pop) {
    if (chi < 0.0) throw std::domain_error("allocate_upa: negative budget");
    std::vector<double> x(pop.size(), chi / static_cast<double>(pop.size()));
    std::size_t J = 0;
    while (J < pop.size() && x[J] >= pop.sorted()[J].r - 1e-9) ++J;
    return finish(std::move(x), J, false, pop);
}

} // namespace dres
