#include "dres/utility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dres {

namespace {

// (base)^e with tiny bases flushed to zero so derivative-free evaluations
// near the kink stay finite.
double safe_pow(double base, double e) {
    if (base < 1e-300) return e > 0.0 ? 0.0 : HUGE_VAL;
    return std::pow(base, e);
}

} // namespace

ValidationReport validate_profile(const ConsumerProfile& p) {
    ValidationReport rep;
    if (!(p.alpha > 0.0 && p.alpha < 1.0))
        rep.violations.push_back("alpha outside (0,1)");
    if (!(p.lambda >= 1.0))
        rep.violations.push_back("lambda below 1");
    if (!(p.r > 0.0))
        rep.violations.push_back("reference point not positive");
    if (!(p.m >= 0.0))
        rep.violations.push_back("minimum need negative");
    if (!(p.m < p.r))
        rep.violations.push_back("minimum need >= reference point");
    if (p.x_max && !(*p.x_max > p.r))
        rep.violations.push_back("x_max not above reference point");
    return rep;
}

double eval_utility(double x, const ConsumerProfile& p) {
    if (x < 0.0) throw std::domain_error("eval_utility: negative consumption");
    const double head = p.lambda * safe_pow(p.r, p.alpha);
    if (x < p.r) return -p.lambda * safe_pow(p.r - x, p.alpha) + head;
    return safe_pow(x - p.r, p.alpha) + head;
}

double eval_utility_saturating(double x, const ConsumerProfile& p) {
    if (!p.x_max)
        throw std::invalid_argument(
            "eval_utility_saturating: profile has no x_max");
    return eval_utility(std::min(x, *p.x_max), p);
}

double marginal_benefit(double x, const ConsumerProfile& p) {
    if (x < 0.0)
        throw std::domain_error("marginal_benefit: negative consumption");
    if (x == p.r)
        throw non_differentiable_error(
            "marginal_benefit: utility is non-differentiable at x = r");
    if (x < p.r)
        return p.lambda * p.alpha * std::pow(p.r - x, p.alpha - 1.0);
    return p.alpha * std::pow(x - p.r, p.alpha - 1.0);
}

Population::Population(std::vector<ConsumerProfile> profiles) {
    if (profiles.empty())
        throw std::invalid_argument("Population: needs at least one consumer");
    lambda_ = profiles.front().lambda;
    alpha_ = profiles.front().alpha;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto& p = profiles[i];
        if (p.lambda != lambda_ || p.alpha != alpha_)
            throw std::invalid_argument(
                "Population: lambda and alpha must be shared");
        auto rep = validate_profile(p);
        if (!rep.ok())
            throw std::invalid_argument("Population: profile " +
                                        std::to_string(i) + ": " +
                                        rep.violations.front());
    }
    input_index_.resize(profiles.size());
    std::iota(input_index_.begin(), input_index_.end(), std::size_t{0});
    std::stable_sort(input_index_.begin(), input_index_.end(),
                     [&](std::size_t a, std::size_t b) {
                         return profiles[a].r < profiles[b].r;
                     });
    sorted_.reserve(profiles.size());
    for (std::size_t idx : input_index_) sorted_.push_back(profiles[idx]);
    const double k1 = static_cast<double>(sorted_.size()) - 1.0;
    opa_regime_ = std::pow(std::max(k1, 1.0), 1.0 - alpha_) <= lambda_;
}

Population Population::homogeneous(const std::vector<double>& r, double lambda,
                                   double alpha,
                                   const std::vector<double>& m) {
    if (!m.empty() && m.size() != r.size())
        throw std::invalid_argument(
            "Population: minimum-need vector size mismatch");
    std::vector<ConsumerProfile> ps;
    ps.reserve(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        ps.push_back({r[i], lambda, alpha, std::nullopt,
                      m.empty() ? 0.0 : m[i]});
    return Population(std::move(ps));
}

double Population::total_reference() const {
    double s = 0.0;
    for (const auto& p : sorted_) s += p.r;
    return s;
}

std::vector<double>
Population::to_input_order(const std::vector<double>& sorted_values) const {
    std::vector<double> out(sorted_values.size());
    for (std::size_t pos = 0; pos < sorted_values.size(); ++pos)
        out[input_index_[pos]] = sorted_values[pos];
    return out;
}

} // namespace dres
