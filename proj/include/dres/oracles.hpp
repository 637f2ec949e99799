#pragma once

#include "dres/results.hpp"
#include "dres/utility.hpp"

// Deliberately slow, deliberately simple brute-force references. These
// certify the closed-form solvers, so they must never call them: the only
// solver-side dependency of this module is the utility evaluation itself.

namespace dres::oracles {

struct GridSpec {
    double resolution = 0.005; ///< kW per step
    double bound = 10.0;       ///< per-variable upper bound, kW
};

/// Exhaustive search of the budget simplex at the given resolution via
/// nested budget recursion (consumer K takes the remainder). Intended for
/// K <= 4. Deterministic; ties keep the lexicographically first point.
AllocationResult grid_bruteforce_opg(double chi, const Population& pop,
                                     const GridSpec& grid);

/// Maximizes (sum U(x_i)) / (sum x_i) over x_i in {m_i, m_i+res, ...,
/// m_i+bound}. Intended for K <= 3. refine_passes > 0 re-searches a small
/// box around the incumbent at 8x finer resolution per pass, still
/// exhaustively.
EeResult grid_bruteforce_ee(const Population& pop, const GridSpec& grid,
                            int refine_passes = 0);

/// Argmax of U(x) - price_i(x) on the grid {0, res, ..., bound};
/// ties go to the larger consumption.
double bruteforce_best_response(const IbrTariff& tariff, std::size_t i,
                                const ConsumerProfile& profile,
                                const GridSpec& grid);

/// Central difference (U(x+h) - U(x-h)) / (2h). Requires |x - r| > 10h
/// and x - h > 0.
double finite_difference_marginal(double x, const ConsumerProfile& profile,
                                  double h);

} // namespace dres::oracles
