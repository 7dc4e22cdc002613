#include "anneal/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace anneal {
namespace {

struct SimpsonState {
    const std::function<double(double)>& f;
    long evaluations = 0;
    double error_estimate = 0.0;
    bool converged = true;

    double eval(double x) {
        ++evaluations;
        return f(x);
    }

    double recurse(double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth, int max_depth) {
        double m = 0.5 * (a + b);
        double lm = 0.5 * (a + m);
        double rm = 0.5 * (m + b);
        double flm = eval(lm);
        double frm = eval(rm);
        double h = b - a;
        double left = h / 12.0 * (fa + 4.0 * flm + fm);
        double right = h / 12.0 * (fm + 4.0 * frm + fb);
        double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * tol || depth >= max_depth) {
            if (depth >= max_depth && std::abs(delta) > 15.0 * tol)
                converged = false;
            error_estimate += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1,
                       max_depth) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1,
                       max_depth);
    }
};

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double tol, int max_depth) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("integrate: endpoints must be finite");
    if (!(tol > 0.0))
        throw std::invalid_argument("integrate: tol must be positive");
    if (a == b) return {0.0, 0.0, 0, true};
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    SimpsonState state{f};
    double fa = state.eval(a);
    double fb = state.eval(b);
    double m = 0.5 * (a + b);
    double fm = state.eval(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double value =
        state.recurse(a, b, fa, fm, fb, whole, tol, 0, max_depth);
    return {sign * value, state.error_estimate, state.evaluations,
            state.converged};
}

RootResult find_root(const std::function<double(double)>& f, double lo,
                     double hi, double tol, int max_iter) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo >= hi)
        throw std::invalid_argument("find_root: need finite lo < hi");
    if (!(tol > 0.0))
        throw std::invalid_argument("find_root: tol must be positive");
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0.0, 0, true};
    if (fhi == 0.0) return {hi, 0.0, 0, true};
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument(
            "find_root: f(lo) and f(hi) must have opposite signs");

    double x = lo, fx = flo;
    for (int it = 1; it <= max_iter; ++it) {
        // Secant proposal from the current bracket, clipped away from the
        // endpoints; fall back to the midpoint when it is not usable.
        double denom = fhi - flo;
        double cand = denom != 0.0 ? lo - flo * (hi - lo) / denom
                                   : 0.5 * (lo + hi);
        double width = hi - lo;
        if (!(cand > lo + 0.01 * width) || !(cand < hi - 0.01 * width))
            cand = 0.5 * (lo + hi);
        x = cand;
        fx = f(x);
        if (fx == 0.0 || std::abs(fx) <= tol || width <= tol)
            return {x, fx, it, true};
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    return {x, fx, max_iter, false};
}

}  // namespace anneal
