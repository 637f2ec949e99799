#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dres {

/// Thrown by marginal_benefit when queried exactly at the reference point,
/// where the utility has a kink and both one-sided derivatives diverge.
class non_differentiable_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// One consumer: prospect-theoretic sigmoid parameters.
///   r      reference point, kW (> 0)
///   lambda loss-aversion coefficient (>= 1)
///   alpha  curvature exponent (0 < alpha < 1)
///   x_max  saturation power, kW, optional (> r when present)
///   m      minimum need, kW (0 <= m < r)
struct ConsumerProfile {
    double r = 1.0;
    double lambda = 1.5;
    double alpha = 0.8;
    std::optional<double> x_max;
    double m = 0.0;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Lists every violated profile invariant; empty report iff valid.
ValidationReport validate_profile(const ConsumerProfile& p);

/// Sigmoid utility without the saturation plateau:
///   -lambda*(r-x)^alpha + lambda*r^alpha   for 0 <= x < r
///   (x-r)^alpha + lambda*r^alpha           for x >= r
/// Continuous at x = r (both branches give lambda*r^alpha).
double eval_utility(double x, const ConsumerProfile& p);

/// Utility with the saturation plateau: constant for x >= x_max.
/// Requires p.x_max to be set.
double eval_utility_saturating(double x, const ConsumerProfile& p);

/// First derivative of eval_utility. Positive everywhere it exists;
/// throws non_differentiable_error at x == r.
double marginal_benefit(double x, const ConsumerProfile& p);

/// Ordered collection of profiles sharing lambda and alpha, stable-sorted
/// ascending by reference point. The original input permutation is retained
/// so results can be reported in input order.
class Population {
public:
    explicit Population(std::vector<ConsumerProfile> profiles);

    /// Convenience: K profiles with common lambda/alpha and optional
    /// minimum needs (empty means all zero).
    static Population homogeneous(const std::vector<double>& r, double lambda,
                                  double alpha,
                                  const std::vector<double>& m = {});

    std::size_t size() const { return sorted_.size(); }
    double lambda() const { return lambda_; }
    double alpha() const { return alpha_; }

    /// Profiles in ascending-r order.
    const std::vector<ConsumerProfile>& sorted() const { return sorted_; }
    /// sorted position -> original input index.
    const std::vector<std::size_t>& input_index() const { return input_index_; }

    /// True when (K-1)^(1-alpha) <= lambda, i.e. the whole OP-G composition
    /// stays in the subproblem-A regime.
    bool opa_regime() const { return opa_regime_; }

    /// Sum of reference points.
    double total_reference() const;

    /// Maps a vector indexed in sorted order back to input order.
    std::vector<double> to_input_order(const std::vector<double>& sorted_values) const;

private:
    std::vector<ConsumerProfile> sorted_;
    std::vector<std::size_t> input_index_;
    double lambda_ = 1.5;
    double alpha_ = 0.8;
    bool opa_regime_ = true;
};

} // namespace dres
