#include "dres/tariff.hpp"

#include <algorithm>
#include <cmath>

#include "dres/allocation.hpp"

namespace dres {

namespace {

// Numerator/denominator expression of the q formula evaluated at a given
// reference point; q = indiff(r_{J*}) + delta and the delta window is
// bounded below by indiff(r_{J*+1}) - indiff(r_{J*}).
double indifference_rate(double r, double p, double lambda, double alpha) {
    const double sp = std::pow(p / alpha, 1.0 / (alpha - 1.0));
    const double sq = std::pow(p / (lambda * alpha), 1.0 / (alpha - 1.0));
    const double num = lambda * std::pow(r, alpha) +
                       std::pow(p / alpha, alpha / (alpha - 1.0)) -
                       (sp + sq) * p;
    return num / (r - sq);
}

std::vector<double> sorted_allocation(const AllocationResult& res,
                                      const Population& pop) {
    std::vector<double> xs(res.x.size());
    for (std::size_t pos = 0; pos < xs.size(); ++pos)
        xs[pos] = res.x[pop.input_index()[pos]];
    return xs;
}

} // namespace

CostModel CostModel::quadratic(double a, double b, double c) {
    CostModel m;
    m.value_ = [=](double x) { return a * x * x + b * x + c; };
    m.derivative_ = [=](double x) { return 2.0 * a * x + b; };
    m.quad_a_ = a;
    return m;
}

CostModel CostModel::linear(double a, double b) {
    CostModel m;
    m.value_ = [=](double x) { return a * x + b; };
    m.derivative_ = [=](double) { return a; };
    return m;
}

CostModel CostModel::custom(std::function<double(double)> value,
                            std::function<double(double)> derivative) {
    CostModel m;
    m.value_ = std::move(value);
    m.derivative_ = std::move(derivative);
    return m;
}

void CostModel::validate_increasing(double hi) const {
    const int n = 256;
    for (int i = 0; i <= n; ++i) {
        const double x = hi * static_cast<double>(i) / n;
        if (derivative_(x) < 0.0)
            throw std::invalid_argument(
                "CostModel: cost is not increasing at chi = " +
                std::to_string(x));
    }
}

double welfare(double chi, const Population& pop, const CostModel& cost) {
    return solve_opg(chi, pop).objective - cost.value(chi);
}

ChiStar find_chi_star(const Population& pop, const CostModel& cost) {
    const double total_r = pop.total_reference();
    const std::size_t K = pop.size();
    cost.validate_increasing(total_r + 10.0 * static_cast<double>(K));

    const double mc = cost.derivative(total_r);
    if (!(mc > 0.0))
        throw std::invalid_argument(
            "find_chi_star: marginal cost vanishes at the total reference; "
            "search domain unbounded");
    // Beyond s_max of surplus per consumer the marginal cost exceeds any
    // marginal utility, so the optimum cannot lie past this cap.
    const double s_max = std::pow(mc / pop.alpha(), 1.0 / (pop.alpha() - 1.0));
    const double cap = total_r + static_cast<double>(K) * s_max;

    std::vector<double> bounds{0.0};
    double cum = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        cum += pop.sorted()[i].r;
        if (cum < cap) bounds.push_back(cum);
    }
    bounds.push_back(cap);

    auto W = [&](double chi) { return welfare(chi, pop, cost); };

    double best_chi = 0.0, best_w = W(0.0);
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        const double lo = bounds[b], hi = bounds[b + 1];
        const int n = 1000;
        int best_i = 0;
        double seg_best = -HUGE_VAL;
        for (int i = 0; i <= n; ++i) {
            const double chi = lo + (hi - lo) * static_cast<double>(i) / n;
            const double w = W(chi);
            if (w > seg_best) {
                seg_best = w;
                best_i = i;
            }
        }
        // Golden-section polish between the grid neighbours of the best
        // sample; the welfare has at most one interior maximum per segment.
        double a = lo + (hi - lo) * std::max(best_i - 1, 0) / double(n);
        double d = lo + (hi - lo) * std::min(best_i + 1, n) / double(n);
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double c1 = d - phi * (d - a), c2 = a + phi * (d - a);
        double f1 = W(c1), f2 = W(c2);
        for (int it = 0; it < 80 && d - a > 1e-12; ++it) {
            if (f1 < f2) {
                a = c1;
                c1 = c2;
                f1 = f2;
                c2 = a + phi * (d - a);
                f2 = W(c2);
            } else {
                d = c2;
                c2 = c1;
                f2 = f1;
                c1 = d - phi * (d - a);
                f1 = W(c1);
            }
        }
        const double chi = 0.5 * (a + d);
        const double w = W(chi);
        if (w > best_w) {
            best_w = w;
            best_chi = chi;
        }
        if (seg_best > best_w) {
            best_w = seg_best;
            best_chi = lo + (hi - lo) * best_i / double(n);
        }
    }
    return {best_chi, solve_opg(best_chi, pop).active_set};
}

double marginal_price_p(double chi_star, const Population& pop) {
    const auto res = solve_opg(chi_star, pop);
    if (res.active_set == 0)
        throw degenerate_tariff_error(
            "marginal_price_p: no consumer reaches its reference point");
    const auto xs = sorted_allocation(res, pop);
    const double s = xs[0] - pop.sorted()[0].r;
    if (!(s > 1e-12))
        throw degenerate_tariff_error(
            "marginal_price_p: zero surplus at the welfare optimum");
    for (std::size_t i = 1; i < res.active_set; ++i)
        if (std::abs((xs[i] - pop.sorted()[i].r) - s) > 1e-9)
            throw std::logic_error(
                "marginal_price_p: active surpluses are not equal");
    return pop.alpha() * std::pow(s, pop.alpha() - 1.0);
}

IbrTariff design_ibr(const Population& pop, const CostModel& cost,
                     const DeltaPolicy& policy) {
    const auto opt = find_chi_star(pop, cost);
    if (opt.j_star == 0)
        throw degenerate_tariff_error("design_ibr: welfare optimum has an "
                                      "empty active set");
    const double p = marginal_price_p(opt.chi_star, pop);
    const double lambda = pop.lambda();
    const double alpha = pop.alpha();

    const double base =
        indifference_rate(pop.sorted()[opt.j_star - 1].r, p, lambda, alpha);
    double lower = -base;
    if (opt.j_star < pop.size())
        lower += indifference_rate(pop.sorted()[opt.j_star].r, p, lambda,
                                   alpha);

    IbrTariff t;
    t.p = p;
    t.j_star = opt.j_star;
    t.chi_star = opt.chi_star;
    if (lower >= 0.0) {
        t.delta = 0.0;
        t.delta_window_empty = true;
    } else {
        t.delta = lower * policy.window_fraction;
    }
    t.q = base + t.delta;

    const double kink_off = std::pow(p / (lambda * alpha), 1.0 / (alpha - 1.0));
    std::vector<double> thr_sorted(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i)
        thr_sorted[i] = pop.sorted()[i].r - kink_off;
    t.thresholds = pop.to_input_order(thr_sorted);
    return t;
}

double best_response(const IbrTariff& tariff, std::size_t i,
                     const ConsumerProfile& profile) {
    const double r = profile.r;
    const double lambda = profile.lambda;
    const double alpha = profile.alpha;
    const double thr = tariff.flat ? r : tariff.thresholds[i];

    std::vector<double> cands{0.0, r};
    if (thr > 0.0) cands.push_back(thr);
    // Stationary points of U - price on each linear segment of the tariff.
    auto add_stationary = [&](double rate, double seg_lo, double seg_hi) {
        if (!(rate > 0.0)) return;
        const double gain = r + std::pow(rate / alpha, 1.0 / (alpha - 1.0));
        if (gain >= seg_lo && gain <= seg_hi) cands.push_back(gain);
        const double loss =
            r - std::pow(rate / (lambda * alpha), 1.0 / (alpha - 1.0));
        if (loss >= std::max(seg_lo, 0.0) && loss <= seg_hi)
            cands.push_back(loss);
    };
    if (tariff.flat) {
        add_stationary(tariff.q, 0.0, HUGE_VAL);
    } else {
        add_stationary(tariff.q, 0.0, thr);
        add_stationary(tariff.p, std::max(thr, 0.0), HUGE_VAL);
    }

    double best_v = -HUGE_VAL, best_x = 0.0;
    for (double c : cands) {
        if (c < 0.0) continue;
        const double v = eval_utility(c, profile) - tariff.price(i, c);
        if (v > best_v + 1e-12 ||
            (std::abs(v - best_v) <= 1e-12 && c > best_x)) {
            best_v = std::max(v, best_v);
            best_x = c;
        }
    }
    return best_x;
}

WelfareReport verify_reconstruction(const IbrTariff& tariff,
                                    const Population& pop,
                                    const CostModel& cost) {
    WelfareReport rep;
    rep.chi_star = tariff.chi_star;
    rep.j_star = tariff.j_star;
    rep.p = tariff.p;

    const auto res = solve_opg(tariff.chi_star, pop);
    rep.x_star = res.x;
    rep.welfare = res.objective - cost.value(tariff.chi_star);

    rep.match.resize(pop.size());
    bool all = true;
    for (std::size_t pos = 0; pos < pop.size(); ++pos) {
        const std::size_t i = pop.input_index()[pos];
        const double br = best_response(tariff, i, pop.sorted()[pos]);
        rep.match[i] = std::abs(br - rep.x_star[i]) <= 1e-6;
        all = all && rep.match[i];
    }
    rep.perfect = all;

    double cum = 0.0;
    for (std::size_t i = 0; i < tariff.j_star; ++i) cum += pop.sorted()[i].r;
    const double surplus = tariff.chi_star - cum;
    if (tariff.j_star < pop.size()) {
        const double aJ = std::pow(static_cast<double>(tariff.j_star),
                                   1.0 - pop.alpha());
        const double bound =
            pop.sorted()[tariff.j_star].r *
            std::pow(pop.lambda() / aJ, 1.0 / (pop.alpha() - 1.0));
        rep.surplus_condition = surplus > 0.0 && surplus <= bound;
    } else {
        rep.surplus_condition = surplus > 0.0;
    }

    if (auto a = cost.quadratic_a()) {
        const double rK = pop.sorted().back().r;
        rep.quadratic_guarantee =
            *a <= pop.alpha() * (1.0 - pop.alpha()) *
                      std::pow(rK, pop.alpha() - 2.0);
    }
    return rep;
}

IbrTariff constant_rtp_tariff(double p, const Population& pop) {
    if (!(p > 0.0))
        throw std::invalid_argument("constant_rtp_tariff: price must be > 0");
    IbrTariff t;
    t.q = t.p = p;
    t.flat = true;
    const double kink_off =
        std::pow(p / (pop.lambda() * pop.alpha()), 1.0 / (pop.alpha() - 1.0));
    std::vector<double> thr_sorted(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i)
        thr_sorted[i] = pop.sorted()[i].r - kink_off;
    t.thresholds = pop.to_input_order(thr_sorted);
    return t;
}

} // namespace dres
