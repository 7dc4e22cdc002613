#include "anneal/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "anneal/numerics.hpp"
#include "anneal/parallel.hpp"

namespace anneal {
namespace {

void check_scales(const ProblemScales& s, bool need_smooth) {
    if (!(s.diameter > 0.0))
        throw std::invalid_argument("ProblemScales: diameter must be > 0");
    if (s.steps < 1)
        throw std::invalid_argument("ProblemScales: steps must be >= 1");
    if (need_smooth) {
        if (!(s.smoothness > 0.0))
            throw std::invalid_argument(
                "ProblemScales: smoothness must be > 0 for the smooth bound");
        if (s.noise_std < 0.0)
            throw std::invalid_argument(
                "ProblemScales: noise_std must be >= 0");
    } else if (!(s.grad_bound > 0.0)) {
        throw std::invalid_argument("ProblemScales: grad_bound must be > 0");
    }
}

void check_annealed(const TailFunctions& tails) {
    if (!tails.schedule().annealed())
        throw std::invalid_argument(
            "bound requires an annealed schedule (finite tail_integral)");
}

void check_rho(double rho) {
    if (!(rho >= 1.0))
        throw std::invalid_argument("rho must be >= 1 (eta was tuned)");
}

constexpr double kTauCeil = 1.0 - 1e-9;
constexpr int kBracketGrid = 1024;

}  // namespace

double tuned_stepsize_lipschitz(const ProblemScales& s,
                                const TailFunctions& tails) {
    check_scales(s, false);
    check_annealed(tails);
    double prod = tails.mass_at_zero() * tails.integral_at_zero();
    return s.diameter /
           (2.0 * s.grad_bound * std::sqrt(double(s.steps) * prod));
}

double tuned_rate_lipschitz(const ProblemScales& s,
                            const TailFunctions& tails) {
    check_scales(s, false);
    check_annealed(tails);
    double ratio = tails.integral_at_zero() / tails.mass_at_zero();
    return 2.0 * s.diameter * s.grad_bound / std::sqrt(double(s.steps)) *
           std::sqrt(ratio);
}

double tuned_stepsize_smooth(const ProblemScales& s,
                             const TailFunctions& tails) {
    check_scales(s, true);
    check_annealed(tails);
    double cap = 1.0 / (2.0 * s.smoothness * tails.schedule().value(0.0));
    if (s.noise_std == 0.0) return cap;
    double prod = tails.mass_at_zero() * tails.integral_at_zero();
    double tuned =
        s.diameter / (s.noise_std * std::sqrt(2.0 * double(s.steps) * prod));
    return std::min(cap, tuned);
}

double tuned_rate_smooth(const ProblemScales& s, const TailFunctions& tails) {
    double eta = tuned_stepsize_smooth(s, tails);
    double bias = s.diameter * s.diameter /
                  (2.0 * eta * double(s.steps) * tails.mass_at_zero());
    double noise =
        eta * s.noise_std * s.noise_std * tails.integral_at_zero();
    return bias + noise;
}

double infimand(const TailFunctions& tails, double rho, double v) {
    check_rho(rho);
    check_annealed(tails);
    double mass = tails.tail_mass(v);
    if (mass <= 0.0)
        throw std::domain_error("infimand: tail_mass vanishes at v");
    return tails.mass_at_zero() / (rho * mass) +
           rho * tails.tail_integral(v) / tails.integral_at_zero();
}

double stationarity_residual(const TailFunctions& tails, double rho,
                             double v) {
    check_rho(rho);
    check_annealed(tails);
    return tails.mass_at_zero() * tails.integral_at_zero() / (rho * rho) -
           tails.tail_mass(v) * tails.schedule().value(v);
}

double solve_optimal_tau(const TailFunctions& tails, double rho,
                         double tau_floor) {
    check_rho(rho);
    check_annealed(tails);
    if (!(tau_floor >= 0.0 && tau_floor < 1.0))
        throw std::invalid_argument(
            "solve_optimal_tau: tau_floor must lie in [0, 1)");
    auto residual = [&](double v) {
        return stationarity_residual(tails, rho, v);
    };
    double lo = tau_floor;
    double flo = residual(lo);
    if (flo >= 0.0) return tau_floor;
    // The residual is non-decreasing and positive near 1; walk a fixed grid
    // to the first sign change and refine inside that cell.
    double hi = kTauCeil;
    double step = (hi - lo) / kBracketGrid;
    double a = lo, fa = flo;
    for (int i = 1; i <= kBracketGrid; ++i) {
        double b = i == kBracketGrid ? hi : lo + i * step;
        double fb = residual(b);
        if (fb >= 0.0) {
            if (fb == 0.0) return b;
            auto r = find_root(residual, a, b, 1e-14);
            return r.root;
        }
        a = b;
        fa = fb;
    }
    (void)fa;
    return tau_floor;
}

namespace {

BoundReport bound_at(const ProblemScales& s, const TailFunctions& tails,
                     double rho, double tau_floor, BoundMode mode) {
    BoundReport rep;
    rep.rho = rho;
    rep.tau_star = solve_optimal_tau(tails, rho, tau_floor);
    rep.infimum_value = infimand(tails, rho, rep.tau_star);
    double p = tails.schedule().decay_degree();
    if (mode == BoundMode::Lipschitz) {
        rep.eta_star = tuned_stepsize_lipschitz(s, tails);
        rep.rate_opt = tuned_rate_lipschitz(s, tails);
        rep.bound_main = 0.5 * rep.rate_opt * rep.infimum_value;
        rep.low_order = 8.0 * p * rho * rep.eta_star * s.grad_bound *
                        s.grad_bound / double(s.steps);
        rep.coefficient = rep.bound_main /
                          (s.diameter * s.grad_bound /
                           std::sqrt(double(s.steps)));
    } else {
        rep.eta_star = tuned_stepsize_smooth(s, tails);
        rep.rate_opt = tuned_rate_smooth(s, tails);
        rep.bound_main = rep.rate_opt * rep.infimum_value;
        rep.low_order = 4.0 * p * rho * rep.eta_star * s.noise_std *
                        s.noise_std / double(s.steps);
        double scale =
            s.noise_std > 0.0
                ? s.diameter * s.noise_std / std::sqrt(double(s.steps))
                : s.smoothness * s.diameter * s.diameter / double(s.steps);
        rep.coefficient = rep.bound_main / scale;
    }
    return rep;
}

}  // namespace

BoundReport lipschitz_bound(const ProblemScales& s, const TailFunctions& tails,
                            double rho) {
    check_scales(s, false);
    check_rho(rho);
    return bound_at(s, tails, rho, 0.0, BoundMode::Lipschitz);
}

std::optional<double> compute_tau0(const ProblemScales& s,
                                   const Schedule& schedule, double eta) {
    check_scales(s, true);
    if (!(eta > 0.0))
        throw std::invalid_argument("compute_tau0: eta must be > 0");
    double cap = 1.0 / (2.0 * s.smoothness);
    long T = s.steps;
    // Smallest grid point j/T whose whole stepsize suffix fits under the cap;
    // h is non-increasing, so the first fitting j works for every later step.
    for (long j = 0; j < T; ++j) {
        if (eta * schedule.value(double(j) / double(T)) <= cap)
            return double(j) / double(T);
    }
    return std::nullopt;
}

BoundReport smooth_bound(const ProblemScales& s, const TailFunctions& tails,
                         double rho) {
    check_scales(s, true);
    check_rho(rho);
    double eta_star = tuned_stepsize_smooth(s, tails);
    auto tau0 = compute_tau0(s, tails.schedule(), rho * eta_star);
    if (!tau0)
        throw std::domain_error(
            "smooth_bound: no suffix of the schedule fits under the "
            "stability cap 1/(2 beta)");
    BoundReport rep = bound_at(s, tails, rho, *tau0, BoundMode::Smooth);
    rep.tau0 = *tau0;
    double p = tails.schedule().decay_degree();
    rep.branch = rho * rho >= std::pow(1.0 - *tau0, -(2.0 * p + 1.0))
                     ? SmoothBranch::Sublinear
                     : SmoothBranch::SuffixLimited;
    return rep;
}

std::vector<BoundReport> coefficient_curve(const ProblemScales& s,
                                           const TailFunctions& tails,
                                           std::span<const double> rhos,
                                           BoundMode mode, int threads) {
    check_scales(s, mode == BoundMode::Smooth);
    for (double rho : rhos) check_rho(rho);
    check_annealed(tails);
    std::vector<BoundReport> out(rhos.size());
    parallel_for(static_cast<long>(rhos.size()), threads, [&](long i) {
        out[i] = mode == BoundMode::Lipschitz
                     ? lipschitz_bound(s, tails, rhos[i])
                     : smooth_bound(s, tails, rhos[i]);
    });
    return out;
}

}  // namespace anneal
