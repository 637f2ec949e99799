#pragma once

#include <stdexcept>

#include "dres/results.hpp"
#include "dres/utility.hpp"

namespace dres {

/// Thrown when a subproblem is invoked outside its coefficient regime
/// (OP-A needs a1 <= lambda, OP-B needs a2 > lambda).
class regime_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Branch { AllToX, InteriorLoss, InteriorGain };

/// (x, y) split of a budget between a concave aggregate term a*x^alpha and
/// one fresh sigmoidal consumer. x + y always equals the budget.
struct SubproblemSolution {
    double x = 0.0;
    double y = 0.0;
    Branch branch = Branch::AllToX;
};

/// max a1*x^alpha + U(y; r) s.t. x + y <= C1, for 0 < a1 <= lambda.
/// The three closed-form cases split at C1 = r*(lambda/a1)^(1/(alpha-1))
/// and C1 = r.
SubproblemSolution solve_subproblem_a(double C1, double r, double a1,
                                      double lambda, double alpha);

/// Unique gamma > 1 solving
///   a2*gamma^alpha - (gamma-1)^alpha / (1+a2^(1/(1-alpha)))^(alpha-1) = lambda
/// for a2 > lambda. Residual of the returned root is <= 1e-10.
double gamma1_root(double a2, double lambda, double alpha);

/// max a2*x^alpha + U(y; r) s.t. x + y <= C2, for a2 > lambda. Everything
/// goes to the aggregate below C2 = r*gamma1; interior split above.
SubproblemSolution solve_subproblem_b(double C2, double r, double a2,
                                      double lambda, double alpha);

/// Exact maximizer of the sum-utility over the budget simplex. Consumers
/// fill their reference points in ascending-r order; the residual is split
/// between the filled aggregate and the next consumer by subproblem A
/// (or B when the active-set coefficient J^(1-alpha) exceeds lambda).
AllocationResult solve_opg(double chi, const Population& pop);

/// Proportional baseline: x_i = (r_i / sum r) * chi.
AllocationResult allocate_ppa(double chi, const Population& pop);

/// Uniform baseline: x_i = chi / K.
AllocationResult allocate_upa(double chi, const Population& pop);

} // namespace dres
