#pragma once

#include <functional>

namespace anneal {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = false;
};

// Adaptive Simpson quadrature of f over [a, b]. Subintervals are split until
// the Richardson estimate |S2 - S1| / 15 meets the locally apportioned
// tolerance or max_depth is reached; the returned value includes the
// Richardson correction term. a > b integrates backwards with the usual sign
// flip. Throws std::invalid_argument on non-finite endpoints or tol <= 0.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double tol, int max_depth = 60);

struct RootResult {
    double root = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Bracketed scalar root finder: secant proposals safeguarded by bisection, so
// the bracket always shrinks. Requires f(lo) and f(hi) of opposite sign
// (throws std::invalid_argument otherwise). Stops once |f(root)| <= tol or
// the bracket width falls below tol.
RootResult find_root(const std::function<double(double)>& f, double lo,
                     double hi, double tol, int max_iter = 200);

}  // namespace anneal
