#pragma once

#include <cstddef>
#include <vector>

namespace dres {

/// Outcome of a power allocation over a population. The consumption vector
/// is reported in the original input order of the population.
struct AllocationResult {
    std::vector<double> x;
    std::size_t active_set = 0; ///< consumers whose allocation reached r_i
    double objective = 0.0;     ///< sum of utilities at x
    double chi_used = 0.0;      ///< total allocated power
    bool used_opb = false;      ///< final split solved in the OP-B regime
};

/// Outcome of an energy-efficiency maximization.
struct EeResult {
    double e_star = 0.0; ///< optimal efficiency, utility per kW
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0; ///< |g(e_star)| for root-based solvers
    bool converged = true;
};

/// Two-rate inclining-block tariff. Unit price is q up to the per-consumer
/// threshold and p above it; thresholds are in original input order.
/// A flat tariff is the q == p special case.
struct IbrTariff {
    double q = 0.0;
    double p = 0.0;
    std::vector<double> thresholds;
    double delta = 0.0;
    std::size_t j_star = 0;
    double chi_star = 0.0;
    bool delta_window_empty = false;
    bool flat = false;

    /// Payment of consumer i for consuming x.
    double price(std::size_t i, double x) const {
        const double t = thresholds[i];
        if (flat || x <= t) return q * x;
        return (q - p) * t + p * x;
    }
};

} // namespace dres
