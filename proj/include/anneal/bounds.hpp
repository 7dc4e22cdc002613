#pragma once

#include <optional>
#include <span>
#include <vector>

#include "anneal/schedule.hpp"

namespace anneal {

// Scales of the optimisation problem a bound is evaluated for: domain
// diameter D, gradient second-moment bound G, smoothness beta, gradient
// noise level sigma, and horizon T.
struct ProblemScales {
    double diameter = 1.0;
    double grad_bound = 1.0;
    double smoothness = 0.0;
    double noise_std = 0.0;
    long steps = 1;
};

enum class SmoothBranch { None, Sublinear, SuffixLimited };

// One evaluated point of a robustness bound at misspecification factor rho.
// bound_main is the leading term, low_order the additive remainder, and
// coefficient the leading term divided by the problem's natural rate scale.
struct BoundReport {
    double rho = 1.0;
    double tau_star = 0.0;
    double infimum_value = 0.0;
    double eta_star = 0.0;
    double rate_opt = 0.0;
    double bound_main = 0.0;
    double low_order = 0.0;
    double coefficient = 0.0;
    double tau0 = 0.0;
    SmoothBranch branch = SmoothBranch::None;
};

// Stepsize scale that optimises the a-priori rate for bounded-gradient
// problems, D / (2 G sqrt(T * mass0 * integral0)), and the rate it achieves.
double tuned_stepsize_lipschitz(const ProblemScales& scales,
                                const TailFunctions& tails);
double tuned_rate_lipschitz(const ProblemScales& scales,
                            const TailFunctions& tails);

// Smooth analogue: min of the stability cap 1 / (2 beta h(0)) and
// D / (sigma sqrt(2 T * mass0 * integral0)); the rate adds the bias and
// noise terms for that choice.
double tuned_stepsize_smooth(const ProblemScales& scales,
                             const TailFunctions& tails);
double tuned_rate_smooth(const ProblemScales& scales,
                         const TailFunctions& tails);

// The suffix trade-off evaluated at v:
//   mass0 / (rho * tail_mass(v)) + rho * tail_integral(v) / integral0.
double infimand(const TailFunctions& tails, double rho, double v);

// Residual of the stationarity condition for the optimal suffix point,
//   mass0 * integral0 / rho^2 - tail_mass(v) * h(v),
// which is non-decreasing in v with at most one sign change.
double stationarity_residual(const TailFunctions& tails, double rho, double v);

// Smallest stationary point of the infimand on [tau_floor, 1), found by
// bracketing the residual's sign change on a 1024-point grid and refining
// with find_root; returns tau_floor when the residual never changes sign.
double solve_optimal_tau(const TailFunctions& tails, double rho,
                         double tau_floor = 0.0);

// Robustness bound for bounded-gradient problems run with stepsize
// rho * eta_star: fills tau_star, the infimum, the leading term
// rate_opt / 2 * infimum, and the additive remainder.  Requires rho >= 1
// and an annealed schedule.
BoundReport lipschitz_bound(const ProblemScales& scales,
                            const TailFunctions& tails, double rho);

// First grid point j/T from which the stepsizes eta * h(j/T) all fit under
// the stability cap 1/(2 beta); nullopt when even the final stepsize does
// not fit.
std::optional<double> compute_tau0(const ProblemScales& scales,
                                   const Schedule& schedule, double eta);

// Smooth-case robustness bound at stepsize rho * eta_star_smooth. The suffix
// infimum is taken over [tau0, 1); branch records whether the schedule decays
// fast enough past tau0 for the sublinear regime (rho^2 >= (1-tau0)^-(2p+1)).
BoundReport smooth_bound(const ProblemScales& scales,
                         const TailFunctions& tails, double rho);

enum class BoundMode { Lipschitz, Smooth };

// Evaluates the bound on each rho in the grid (in parallel; the output order
// matches the input order regardless of thread count).
std::vector<BoundReport> coefficient_curve(const ProblemScales& scales,
                                           const TailFunctions& tails,
                                           std::span<const double> rhos,
                                           BoundMode mode, int threads = 0);

}  // namespace anneal
