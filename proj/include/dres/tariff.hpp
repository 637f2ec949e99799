#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dres/results.hpp"
#include "dres/utility.hpp"

namespace dres {

/// Thrown when the welfare optimum leaves the active consumers with zero
/// surplus, so the upper marginal price is undefined.
class degenerate_tariff_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Provider cost of supplying a total consumption chi. Must be increasing
/// on the operating range.
class CostModel {
public:
    static CostModel quadratic(double a, double b, double c = 0.0);
    static CostModel linear(double a, double b = 0.0);
    static CostModel custom(std::function<double(double)> value,
                            std::function<double(double)> derivative);

    double value(double chi) const { return value_(chi); }
    double derivative(double chi) const { return derivative_(chi); }

    /// Quadratic leading coefficient, when the model is quadratic.
    std::optional<double> quadratic_a() const { return quad_a_; }

    /// Probes the derivative on a grid over [0, hi]; throws
    /// std::invalid_argument if the cost is not increasing.
    void validate_increasing(double hi) const;

private:
    CostModel() = default;
    std::function<double(double)> value_;
    std::function<double(double)> derivative_;
    std::optional<double> quad_a_;
};

/// Sum-utility at the optimal allocation of chi, minus the supply cost.
double welfare(double chi, const Population& pop, const CostModel& cost);

struct ChiStar {
    double chi_star = 0.0;
    std::size_t j_star = 0;
};

/// Global maximizer of welfare over chi. Scans each interval between
/// cumulative reference sums with a dense grid, then refines the best
/// point by golden section.
ChiStar find_chi_star(const Population& pop, const CostModel& cost);

/// Common marginal utility p = alpha * s^(alpha-1) of the active consumers
/// at the welfare optimum, where s is their shared surplus beyond r_i.
double marginal_price_p(double chi_star, const Population& pop);

/// Policy for placing delta inside its admissible window (lower_bound, 0].
/// delta = lower_bound * fraction; the default is the window midpoint.
struct DeltaPolicy {
    double window_fraction = 0.5;
};

/// Builds the welfare-optimal two-rate tariff: p from the marginal utility
/// at the optimum, q from the indifference expression at r_{J*} shifted by
/// delta, and per-consumer thresholds r_i - (p/(lambda*alpha))^(1/(alpha-1)).
IbrTariff design_ibr(const Population& pop, const CostModel& cost,
                     const DeltaPolicy& policy = {});

/// Consumption maximizing U(x) - price_i(x) over the finite candidate set
/// {0, threshold, r, per-branch stationary points}; ties go to the larger
/// consumption.
double best_response(const IbrTariff& tariff, std::size_t i,
                     const ConsumerProfile& profile);

struct WelfareReport {
    double chi_star = 0.0;
    double welfare = 0.0;
    std::size_t j_star = 0;
    double p = 0.0;
    std::vector<double> x_star;   ///< welfare-optimal consumptions, input order
    std::vector<bool> match;      ///< best response equals x_star per consumer
    bool perfect = false;         ///< all K match
    bool surplus_condition = false; ///< reconstruction condition on chi*-sum r
    bool quadratic_guarantee = false; ///< quadratic a <= alpha(1-alpha)rK^(alpha-2)
};

/// Compares every consumer's best response under the tariff with its
/// welfare-optimal consumption.
WelfareReport verify_reconstruction(const IbrTariff& tariff,
                                    const Population& pop,
                                    const CostModel& cost);

/// Flat-rate baseline: the q == p degenerate case of the block tariff.
IbrTariff constant_rtp_tariff(double p, const Population& pop);

} // namespace dres
