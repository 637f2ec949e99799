#include "dres/energy_efficiency.hpp"

#include <cmath>

namespace dres {

namespace {

bool all_minimum_needs_zero(const Population& pop) {
    for (const auto& p : pop.sorted())
        if (p.m > 0.0) return false;
    return true;
}

ConsumerProfile hat_profile(const ConsumerProfile& p) {
    return {p.r - p.m, p.lambda, p.alpha, std::nullopt, 0.0};
}

std::vector<double> x_hat_sorted(double E, const Population& pop) {
    const double alpha = pop.alpha();
    const double lambda = pop.lambda();
    const double surplus = std::pow(E / alpha, 1.0 / (alpha - 1.0));
    const double head = std::pow(E / alpha, alpha / (alpha - 1.0));
    std::vector<double> out(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const double rh = pop.sorted()[i].r - pop.sorted()[i].m;
        const double ratio =
            (lambda * std::pow(rh, alpha) + head) / (rh + surplus);
        out[i] = ratio <= E ? 0.0 : rh + surplus;
    }
    return out;
}

} // namespace

IeePoint individual_ee(const ConsumerProfile& p, IeeStationarity form) {
    const double r = p.r;
    const double alpha = p.alpha;
    const double c = (form == IeeStationarity::LambdaCorrected ? p.lambda
                                                               : 1.0) *
                     std::pow(r, alpha);
    // Stationarity of U(x)/x: x*U'(x) - U(x) = 0 on the gain branch.
    auto f = [&](double x) {
        return x * alpha * std::pow(x - r, alpha - 1.0) -
               std::pow(x - r, alpha) - c;
    };
    // f -> +inf as x -> r+ and f(2r) = r^alpha (2 alpha - 1 - c/r^alpha) < 0.
    double lo = r, hi = 2.0 * r;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * r && std::abs(f(0.5 * (lo + hi))) <= 1e-10)
            break;
    }
    IeePoint pt;
    pt.x_iee = 0.5 * (lo + hi);
    pt.u_iee = eval_utility(pt.x_iee, p) / pt.x_iee;
    return pt;
}

EeResult solve_see(const Population& pop) {
    if (!all_minimum_needs_zero(pop))
        throw std::invalid_argument(
            "solve_see: minimum needs must all be zero (use "
            "solve_see_constrained)");
    const auto pt = individual_ee(pop.sorted().front());
    std::vector<double> xs(pop.size(), 0.0);
    xs.front() = pt.x_iee;
    EeResult res;
    res.e_star = pt.u_iee;
    res.x = pop.to_input_order(xs);
    res.iterations = 0;
    res.residual = 0.0;
    res.converged = true;
    return res;
}

std::vector<double> x_hat(double E, const Population& pop) {
    if (!(E > 0.0)) throw std::domain_error("x_hat: E must be positive");
    return pop.to_input_order(x_hat_sorted(E, pop));
}

double g_function(double E, const Population& pop) {
    double m1 = 0.0, m2 = 0.0;
    for (const auto& p : pop.sorted()) {
        m1 += eval_utility(p.m, p);
        m2 += p.m;
    }
    if (!(m2 > 0.0))
        throw std::domain_error("g_function: total minimum need is zero");
    const auto xh = x_hat_sorted(E, pop);
    double num = m1, den = m2;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        num += eval_utility(xh[i], hat_profile(pop.sorted()[i]));
        den += xh[i];
    }
    return num / den - E;
}

EeResult solve_see_constrained(const Population& pop, double eps,
                               int iter_max) {
    if (!(eps > 0.0))
        throw std::invalid_argument("solve_see_constrained: eps must be > 0");
    if (all_minimum_needs_zero(pop)) return solve_see(pop);

    double m1 = 0.0, m2 = 0.0;
    for (const auto& p : pop.sorted()) {
        m1 += eval_utility(p.m, p);
        m2 += p.m;
    }
    double lo = m1 / m2;
    double hi = individual_ee(pop.sorted().front()).u_iee;
    // g(lo) > 0 and g(hi) < 0 analytically; widen if the instance sits on
    // a boundary.
    int guard = 0;
    while (g_function(hi, pop) > 0.0 && ++guard < 60) hi *= 2.0;

    EeResult res;
    res.converged = false;
    int it = 0;
    double d = 2.0 * eps;
    while (d > eps && it < iter_max) {
        const double mid = 0.5 * (lo + hi);
        if (g_function(mid, pop) <= 0.0)
            hi = mid;
        else
            lo = mid;
        ++it;
        d = std::min(std::abs(g_function(lo, pop)),
                     std::abs(g_function(hi, pop)));
    }
    res.e_star = std::abs(g_function(lo, pop)) <= std::abs(g_function(hi, pop))
                     ? lo
                     : hi;
    res.iterations = it;
    res.residual = std::abs(g_function(res.e_star, pop));
    res.converged = res.residual <= eps;

    const auto xh = x_hat_sorted(res.e_star, pop);
    std::vector<double> xs(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i)
        xs[i] = pop.sorted()[i].m + xh[i];
    res.x = pop.to_input_order(xs);
    return res;
}

} // namespace dres
