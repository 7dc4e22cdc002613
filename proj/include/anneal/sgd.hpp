#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "anneal/schedule.hpp"

namespace anneal {

struct Ball {
    std::vector<double> center;
    double radius = 1.0;
};

struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
};

using Domain = std::variant<Ball, Box>;

// Throws std::invalid_argument for empty/mismatched extents, radius <= 0 or
// box sides with lo > hi.
void validate(const Domain& domain);
std::size_t dimension(const Domain& domain);

// Euclidean projection onto the domain, in place; `project` returns a copy.
void project_in_place(const Domain& domain, std::span<double> x);
std::vector<double> project(const Domain& domain,
                            std::span<const double> x);

// A concrete stepsize sequence: eta scaled by the schedule profile over a
// horizon of `steps`. Continuous schedules are sampled at (t-1)/steps; the
// inverse-sqrt kind uses eta / sqrt(t).
struct StepsizePlan {
    double eta = 1.0;
    Schedule schedule = Schedule::constant();
    long steps = 1;
};

// Stepsize for step t (1-based, t in [1, steps]).
double stepsize_at(const StepsizePlan& plan, long t);

// First-order stochastic problem: the objective is the deterministic target
// the run is scored on, gradient() draws one stochastic (sub)gradient.
class StochasticProblem {
  public:
    virtual ~StochasticProblem() = default;
    virtual std::size_t dim() const = 0;
    virtual const Domain& domain() const = 0;
    virtual double objective(std::span<const double> x) const = 0;
    virtual void gradient(std::span<const double> x, std::mt19937_64& rng,
                          std::span<double> out) const = 0;
};

struct SgdOptions {
    double poly_average_gamma = 8.0;
    // When set, objective(x_t) is recorded for every visited iterate.
    bool record_objectives = false;
};

// Result of one projected-SGD run. Averages are over the visited iterates
// x_1..x_T; last_iterate is x_{T+1}. Deterministic given (problem, plan,
// x1, seed).
struct SgdRun {
    std::uint64_t seed = 0;
    long steps = 0;
    std::vector<double> stepsizes;
    std::vector<double> last_iterate;
    std::vector<double> uniform_average;
    std::vector<double> polynomial_average;
    std::vector<double> objectives;  // only with record_objectives
};

SgdRun run_sgd(const StochasticProblem& problem, const StepsizePlan& plan,
               std::span<const double> x1, std::uint64_t seed,
               const SgdOptions& options = {});

// Deterministic last-iterate suboptimality bound for a G-bounded-gradient
// problem over a diameter-D domain, for the suffix starting at from_step:
//   D^2 / (2 S_k) + 2 G^2 sum_{t=k}^T eta_t^2 / S_t,  S_t = sum_{s=t}^T eta_s.
double discrete_last_iterate_bound_lipschitz(const StepsizePlan& plan,
                                             double diameter,
                                             double grad_bound,
                                             long from_step = 1);

// Smooth-noise analogue, valid when every stepsize fits under 1/(2 beta)
// (throws std::invalid_argument naming the first violating step otherwise):
//   D^2 / (2 S_1) + sigma^2 sum_t eta_t^2 / S_t.
double discrete_last_iterate_bound_smooth(const StepsizePlan& plan,
                                          double diameter, double noise_std,
                                          double smoothness);

// Normalised suffix weights v_t = eta_T / S_t for t in [1, T], with
// v_0 = v_1 prepended; non-decreasing and v_T = 1.
std::vector<double> v_weights(const StepsizePlan& plan);

// Both sides of the discrete-to-continuous suffix comparison: lhs is the
// discrete sum c1 / S_k + c2 sum_{t=k}^T eta_t^2 / S_t, rhs the continuous
// surrogate c1 / (eta T tail_mass(tau)) + c2 eta I(tau, 1 - 1/T)
// + 4 eta c2 p / T, for any tau in [(k-1)/T, k/T).
struct SuffixComparison {
    double lhs = 0.0;
    double rhs = 0.0;
};

SuffixComparison suffix_comparison(const StepsizePlan& plan, long from_step,
                                   double c1, double c2, double tau);

// Randomised audit of suffix_comparison: `cases` draws of (schedule, T, k,
// tau, eta, c1, c2) checked for lhs <= rhs. Deterministic in `seed` and
// independent of thread count.
struct SuffixAuditCase {
    std::string schedule;
    long steps = 0;
    long from_step = 0;
    double tau = 0.0;
    double eta = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct SuffixAuditResult {
    int cases = 0;
    int violations = 0;
    double max_lhs_over_rhs = 0.0;
    std::vector<SuffixAuditCase> failures;
};

SuffixAuditResult suffix_audit(int cases, std::uint64_t seed,
                               int threads = 0);

}  // namespace anneal
