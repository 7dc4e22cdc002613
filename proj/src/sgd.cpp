#include "anneal/sgd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "anneal/parallel.hpp"

namespace anneal {
namespace {

struct DomainValidator {
    void operator()(const Ball& b) const {
        if (b.center.empty())
            throw std::invalid_argument("Ball: empty center");
        if (!(b.radius > 0.0) || !std::isfinite(b.radius))
            throw std::invalid_argument("Ball: radius must be positive");
    }
    void operator()(const Box& b) const {
        if (b.lo.empty() || b.lo.size() != b.hi.size())
            throw std::invalid_argument("Box: lo/hi sizes must match");
        for (std::size_t i = 0; i < b.lo.size(); ++i)
            if (!(b.lo[i] <= b.hi[i]))
                throw std::invalid_argument("Box: lo > hi on a side");
    }
};

void check_plan(const StepsizePlan& plan) {
    if (!(plan.eta > 0.0) || !std::isfinite(plan.eta))
        throw std::invalid_argument("StepsizePlan: eta must be positive");
    if (plan.steps < 1)
        throw std::invalid_argument("StepsizePlan: steps must be >= 1");
}

// Suffix sums S[t] = sum_{s=t}^T eta_s for t in [1, T], S[T+1] = 0.
std::vector<double> suffix_sums(const StepsizePlan& plan) {
    long T = plan.steps;
    std::vector<double> S(T + 2, 0.0);
    for (long t = T; t >= 1; --t) S[t] = S[t + 1] + stepsize_at(plan, t);
    return S;
}

}  // namespace

void validate(const Domain& domain) { std::visit(DomainValidator{}, domain); }

std::size_t dimension(const Domain& domain) {
    if (const Ball* b = std::get_if<Ball>(&domain)) return b->center.size();
    return std::get<Box>(domain).lo.size();
}

void project_in_place(const Domain& domain, std::span<double> x) {
    validate(domain);
    if (x.size() != dimension(domain))
        throw std::invalid_argument("project: dimension mismatch");
    if (const Ball* b = std::get_if<Ball>(&domain)) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = x[i] - b->center[i];
            d2 += d * d;
        }
        double dist = std::sqrt(d2);
        if (dist > b->radius) {
            double scale = b->radius / dist;
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] = b->center[i] + (x[i] - b->center[i]) * scale;
        }
        return;
    }
    const Box& b = std::get<Box>(domain);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::clamp(x[i], b.lo[i], b.hi[i]);
}

std::vector<double> project(const Domain& domain, std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    project_in_place(domain, y);
    return y;
}

double stepsize_at(const StepsizePlan& plan, long t) {
    check_plan(plan);
    if (t < 1 || t > plan.steps)
        throw std::out_of_range("stepsize_at: step index outside [1, steps]");
    if (plan.schedule.kind() == ScheduleKind::InverseSqrtDiscrete)
        return plan.eta / std::sqrt(double(t));
    return plan.eta *
           plan.schedule.value(double(t - 1) / double(plan.steps));
}

SgdRun run_sgd(const StochasticProblem& problem, const StepsizePlan& plan,
               std::span<const double> x1, std::uint64_t seed,
               const SgdOptions& options) {
    check_plan(plan);
    const std::size_t n = problem.dim();
    if (x1.size() != n)
        throw std::invalid_argument("run_sgd: x1 dimension mismatch");
    const Domain& dom = problem.domain();
    validate(dom);

    std::mt19937_64 rng(seed);
    SgdRun run;
    run.seed = seed;
    run.steps = plan.steps;
    run.stepsizes.reserve(plan.steps);

    std::vector<double> x(x1.begin(), x1.end());
    project_in_place(dom, x);
    std::vector<double> unif(n, 0.0), poly(n, 0.0), grad(n, 0.0);
    const double gamma = options.poly_average_gamma;

    for (long t = 1; t <= plan.steps; ++t) {
        if (options.record_objectives)
            run.objectives.push_back(problem.objective(x));
        double wu = 1.0 / double(t);
        double wp = t == 1 ? 1.0 : (gamma + 1.0) / (double(t) + gamma);
        for (std::size_t i = 0; i < n; ++i) {
            unif[i] += wu * (x[i] - unif[i]);
            poly[i] += wp * (x[i] - poly[i]);
        }
        problem.gradient(x, rng, grad);
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(grad[i]))
                throw std::runtime_error(
                    "run_sgd: non-finite gradient at step " +
                    std::to_string(t));
        double eta = stepsize_at(plan, t);
        run.stepsizes.push_back(eta);
        for (std::size_t i = 0; i < n; ++i) x[i] -= eta * grad[i];
        project_in_place(dom, x);
    }

    run.last_iterate = std::move(x);
    run.uniform_average = std::move(unif);
    run.polynomial_average = std::move(poly);
    return run;
}

double discrete_last_iterate_bound_lipschitz(const StepsizePlan& plan,
                                             double diameter,
                                             double grad_bound,
                                             long from_step) {
    check_plan(plan);
    if (from_step < 1 || from_step > plan.steps)
        throw std::invalid_argument(
            "discrete_last_iterate_bound_lipschitz: from_step outside "
            "[1, steps]");
    auto S = suffix_sums(plan);
    double tail = 0.0;
    for (long t = from_step; t <= plan.steps; ++t) {
        double eta = stepsize_at(plan, t);
        tail += eta * eta / S[t];
    }
    return diameter * diameter / (2.0 * S[from_step]) +
           2.0 * grad_bound * grad_bound * tail;
}

double discrete_last_iterate_bound_smooth(const StepsizePlan& plan,
                                          double diameter, double noise_std,
                                          double smoothness) {
    check_plan(plan);
    if (!(smoothness > 0.0))
        throw std::invalid_argument(
            "discrete_last_iterate_bound_smooth: smoothness must be > 0");
    double cap = 1.0 / (2.0 * smoothness);
    for (long t = 1; t <= plan.steps; ++t)
        if (stepsize_at(plan, t) > cap)
            throw std::invalid_argument(
                "discrete_last_iterate_bound_smooth: stepsize exceeds "
                "1/(2 beta) first at step " +
                std::to_string(t));
    auto S = suffix_sums(plan);
    double tail = 0.0;
    for (long t = 1; t <= plan.steps; ++t) {
        double eta = stepsize_at(plan, t);
        tail += eta * eta / S[t];
    }
    return diameter * diameter / (2.0 * S[1]) +
           noise_std * noise_std * tail;
}

std::vector<double> v_weights(const StepsizePlan& plan) {
    check_plan(plan);
    auto S = suffix_sums(plan);
    long T = plan.steps;
    double etaT = stepsize_at(plan, T);
    std::vector<double> v(T + 1, 0.0);
    for (long t = 1; t <= T; ++t) v[t] = etaT / S[t];
    v[0] = v[1];
    return v;
}

SuffixComparison suffix_comparison(const StepsizePlan& plan, long from_step,
                                   double c1, double c2, double tau) {
    check_plan(plan);
    long T = plan.steps;
    long k = from_step;
    if (k < 1 || k > T)
        throw std::invalid_argument(
            "suffix_comparison: from_step outside [1, steps]");
    double lo = double(k - 1) / double(T);
    double hi = double(k) / double(T);
    if (!(tau >= lo && tau < hi))
        throw std::invalid_argument(
            "suffix_comparison: tau must lie in [(k-1)/T, k/T)");
    if (!(c1 >= 0.0 && c2 >= 0.0))
        throw std::invalid_argument(
            "suffix_comparison: c1 and c2 must be nonnegative");

    auto S = suffix_sums(plan);
    double lhs = c1 / S[k];
    for (long t = k; t <= T; ++t) {
        double eta = stepsize_at(plan, t);
        lhs += c2 * eta * eta / S[t];
    }

    TailFunctions tails(plan.schedule);
    double p = plan.schedule.decay_degree();
    double upper = 1.0 - 1.0 / double(T);
    double rhs = c1 / (plan.eta * double(T) * tails.tail_mass(tau)) +
                 c2 * plan.eta * tails.tail_integral_between(tau, upper) +
                 4.0 * plan.eta * c2 * p / double(T);
    return {lhs, rhs};
}

SuffixAuditResult suffix_audit(int cases, std::uint64_t seed, int threads) {
    if (cases < 1)
        throw std::invalid_argument("suffix_audit: cases must be >= 1");
    std::vector<SuffixAuditCase> drawn(cases);
    std::vector<char> bad(cases, 0);
    std::vector<double> ratio(cases, 0.0);

    parallel_for(cases, threads, [&](long i) {
        // splitmix64 on (seed, i) so draws do not depend on thread count.
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (std::uint64_t(i) + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        std::mt19937_64 rng(z ^ (z >> 31));

        std::uniform_real_distribution<double> unit(0.0, 1.0);
        bool cos = unit(rng) < 0.5;
        Schedule sched = cos ? Schedule::cosine()
                             : Schedule::polynomial(1.0 + 4.0 * unit(rng));
        long T = 50 + long(unit(rng) * 4950.0);
        long k = 1 + long(unit(rng) * double(T));
        if (k > T) k = T;
        double lo = double(k - 1) / double(T);
        double hi = double(k) / double(T);
        double tau = lo + unit(rng) * (hi - lo) * 0.999999;
        double eta = std::pow(10.0, -3.0 + 6.0 * unit(rng));
        double c1 = std::pow(10.0, -2.0 + 4.0 * unit(rng));
        double c2 = std::pow(10.0, -2.0 + 4.0 * unit(rng));

        StepsizePlan plan{eta, sched, T};
        auto cmp = suffix_comparison(plan, k, c1, c2, tau);
        SuffixAuditCase c{sched.name(), T, k, tau, eta, c1, c2, cmp.lhs,
                          cmp.rhs};
        drawn[i] = c;
        ratio[i] = cmp.lhs / cmp.rhs;
        bad[i] = cmp.lhs > cmp.rhs ? 1 : 0;
    });

    SuffixAuditResult res;
    res.cases = cases;
    for (int i = 0; i < cases; ++i) {
        res.max_lhs_over_rhs = std::max(res.max_lhs_over_rhs, ratio[i]);
        if (bad[i]) {
            ++res.violations;
            res.failures.push_back(drawn[i]);
        }
    }
    return res;
}

}  // namespace anneal
