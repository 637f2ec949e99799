#pragma once

#include <vector>

#include "dres/results.hpp"
#include "dres/utility.hpp"

namespace dres {

/// Maximizer of U(x)/x for one consumer and the value attained there.
/// Always lies in (r, 2r).
struct IeePoint {
    double x_iee = 0.0;
    double u_iee = 0.0;
};

/// Which stationarity equation individual_ee solves. The Literal form
/// drops lambda from the r^alpha term; differentiating U(x)/x keeps it.
/// LambdaCorrected is the default and is what actually maximizes U/x
/// for lambda > 1 (the two coincide at lambda = 1).
enum class IeeStationarity { LambdaCorrected, Literal };

/// Root of x*alpha*(x-r)^(alpha-1) - (x-r)^alpha - c = 0 on (r, 2r), with
/// c = lambda*r^alpha (corrected) or r^alpha (literal). Residual <= 1e-10.
IeePoint individual_ee(const ConsumerProfile& p,
                       IeeStationarity form = IeeStationarity::LambdaCorrected);

/// Unconstrained sum-efficiency optimum: the smallest-r consumer takes its
/// individual optimum, everyone else gets zero. Requires all minimum needs
/// to be zero.
EeResult solve_see(const Population& pop);

/// Surplus consumptions above the minimum needs at a candidate efficiency
/// level E: either zero or rhat_i + (E/alpha)^(1/(alpha-1)), per the
/// activity threshold. Returned in original input order.
std::vector<double> x_hat(double E, const Population& pop);

/// Fixed-point residual whose unique root is the constrained optimum:
///   g(E) = (M1 + sum U(xhat_i; rhat_i)) / (M2 + sum xhat_i) - E
/// with M1 = sum U(m_i; r_i), M2 = sum m_i.
double g_function(double E, const Population& pop);

/// Bisection on [M1/M2, u_1^IEE] for the root of g. Populations with all
/// minimum needs zero are routed to solve_see. Final consumptions are
/// m_i + xhat_i(E*).
EeResult solve_see_constrained(const Population& pop, double eps = 1e-8,
                               int iter_max = 200);

} // namespace dres
