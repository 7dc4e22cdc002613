#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "anneal/bounds.hpp"

using namespace anneal;

namespace {

ProblemScales lipschitz_scales(double D, double G, long T) {
    ProblemScales s;
    s.diameter = D;
    s.grad_bound = G;
    s.steps = T;
    return s;
}

ProblemScales smooth_scales(double D, double beta, double sigma, long T) {
    ProblemScales s;
    s.diameter = D;
    s.smoothness = beta;
    s.noise_std = sigma;
    s.steps = T;
    return s;
}

}  // namespace

TEST_CASE("tuned stepsize and rate, bounded-gradient case") {
    TailFunctions poly1(Schedule::polynomial(1.0));
    CHECK(tuned_stepsize_lipschitz(lipschitz_scales(1, 1, 100), poly1) ==
          doctest::Approx(0.05).epsilon(1e-13));
    CHECK(tuned_rate_lipschitz(lipschitz_scales(1, 1, 1), poly1) ==
          doctest::Approx(4.0).epsilon(1e-13));
    CHECK_THROWS_AS(
        tuned_stepsize_lipschitz(lipschitz_scales(1, 1, 100),
                                 TailFunctions(Schedule::constant())),
        std::invalid_argument);
}

TEST_CASE("tuned stepsize, smooth case") {
    TailFunctions poly1(Schedule::polynomial(1.0));
    // min of the stability cap 50 and the noise-tuned value 1/sqrt(200).
    CHECK(tuned_stepsize_smooth(smooth_scales(1, 0.01, 1, 100), poly1) ==
          doctest::Approx(1.0 / std::sqrt(200.0)).epsilon(1e-13));
    // Large beta makes the cap bind instead.
    CHECK(tuned_stepsize_smooth(smooth_scales(1, 100, 1, 100), poly1) ==
          doctest::Approx(1.0 / 200.0).epsilon(1e-13));
    // Without noise only the cap is in play.
    CHECK(tuned_stepsize_smooth(smooth_scales(1, 2, 0, 100), poly1) ==
          doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("stationarity residual root matches the closed form") {
    TailFunctions poly1(Schedule::polynomial(1.0));
    double tau = solve_optimal_tau(poly1, 2.0);
    double expected = 1.0 - std::pow(0.5, 1.0 / 3.0);
    CHECK(tau == doctest::Approx(expected).epsilon(1e-10));
    CHECK(std::abs(stationarity_residual(poly1, 2.0, tau)) < 1e-12);

    // Residual is non-decreasing in v.
    double prev = stationarity_residual(poly1, 2.0, 0.0);
    for (int i = 1; i <= 100; ++i) {
        double v = double(i) / 100.0;
        double r = stationarity_residual(poly1, 2.0, v);
        CHECK(r >= prev - 1e-12);
        prev = r;
    }
}

TEST_CASE("solver honours the floor when no interior root exists") {
    TailFunctions poly1(Schedule::polynomial(1.0));
    // At rho = 1 the residual is already positive at 0.
    CHECK(solve_optimal_tau(poly1, 1.0) == 0.0);
    CHECK(solve_optimal_tau(poly1, 1.0, 0.3) == 0.3);
    CHECK_THROWS_AS(solve_optimal_tau(poly1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(solve_optimal_tau(poly1, 2.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("infimand closed-form spot checks") {
    TailFunctions poly1(Schedule::polynomial(1.0));
    CHECK(infimand(poly1, 8.0, 0.75) == doctest::Approx(4.0).epsilon(1e-12));
    // At v = 0 the infimand is 1/rho + rho for any annealed schedule.
    TailFunctions cosine(Schedule::cosine());
    for (double rho : {1.0, 2.0, 7.5}) {
        CHECK(infimand(poly1, rho, 0.0) ==
              doctest::Approx(1.0 / rho + rho).epsilon(1e-12));
        CHECK(infimand(cosine, rho, 0.0) ==
              doctest::Approx(1.0 / rho + rho).epsilon(1e-9));
    }
}

TEST_CASE("polynomial suffix choice reproduces the sublinear coefficient") {
    for (double p : {1.0, 2.0, 3.0}) {
        TailFunctions tails(Schedule::polynomial(p), TailMode::Quadrature);
        for (double rho : {2.0, 5.0, 10.0, 50.0}) {
            if ((p + 1.0) / (p * rho * rho) > 1.0) continue;
            double v = 1.0 - std::pow(rho, -2.0 / (2.0 * p + 1.0));
            double value = infimand(tails, rho, v);
            double target = 2.0 * std::pow(rho, 1.0 / (2.0 * p + 1.0));
            CHECK(value == doctest::Approx(target).epsilon(1e-6));
        }
    }
}

TEST_CASE("solver tau matches the polynomial closed form") {
    for (double p : {1.0, 2.0, 3.0}) {
        TailFunctions tails(Schedule::polynomial(p));
        for (double rho : {2.0, 5.0, 10.0, 20.0, 50.0}) {
            double arg = (p + 1.0) / (p * rho * rho);
            if (arg > 1.0) continue;
            double expected = 1.0 - std::pow(arg, 1.0 / (2.0 * p + 1.0));
            CHECK(solve_optimal_tau(tails, rho) ==
                  doctest::Approx(expected).epsilon(1e-8));
        }
    }
}

TEST_CASE("bounded-gradient bound report") {
    TailFunctions cosine(Schedule::cosine());
    ProblemScales scales = lipschitz_scales(1, 1, 10000);

    BoundReport rep = lipschitz_bound(scales, cosine, 10.0);
    CHECK(rep.tau_star == doctest::Approx(0.63794739).epsilon(1e-6));
    CHECK(rep.coefficient == doctest::Approx(7.184032).epsilon(1e-5));
    CHECK(rep.bound_main ==
          doctest::Approx(0.5 * rep.rate_opt * rep.infimum_value));

    BoundReport low = lipschitz_bound(scales, cosine, 2.0);
    CHECK(low.tau_star == doctest::Approx(0.21089742).epsilon(1e-6));
    CHECK(low.coefficient == doctest::Approx(4.882901).epsilon(1e-5));

    BoundReport base = lipschitz_bound(scales, cosine, 1.0);
    CHECK(base.tau_star == 0.0);
    CHECK(base.infimum_value <= 2.0 + 1e-12);

    CHECK_THROWS_AS(lipschitz_bound(scales, cosine, 0.9),
                    std::invalid_argument);
}

TEST_CASE("coefficient curve is increasing in rho and order-stable") {
    TailFunctions cosine(Schedule::cosine());
    ProblemScales scales = lipschitz_scales(1, 1, 10000);
    std::vector<double> rhos{1, 2, 5, 10, 20, 50};
    auto curve = coefficient_curve(scales, cosine, rhos,
                                   BoundMode::Lipschitz, 1);
    REQUIRE(curve.size() == rhos.size());
    for (std::size_t i = 0; i < curve.size(); ++i)
        CHECK(curve[i].rho == rhos[i]);
    for (std::size_t i = 1; i < curve.size(); ++i)
        CHECK(curve[i].coefficient >= curve[i - 1].coefficient - 1e-12);

    auto parallel = coefficient_curve(scales, cosine, rhos,
                                      BoundMode::Lipschitz, 4);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(parallel[i].coefficient == curve[i].coefficient);
        CHECK(parallel[i].tau_star == curve[i].tau_star);
    }
}

TEST_CASE("suffix floor from the stability cap") {
    ProblemScales scales = smooth_scales(1, 0.5, 1, 100);
    auto tau0 = compute_tau0(scales, Schedule::polynomial(1.0), 2.0);
    REQUIRE(tau0.has_value());
    CHECK(*tau0 == doctest::Approx(0.5).epsilon(1e-12));

    // Fits everywhere: floor is zero.
    auto zero = compute_tau0(scales, Schedule::polynomial(1.0), 0.5);
    REQUIRE(zero.has_value());
    CHECK(*zero == 0.0);

    // A constant schedule above the cap never fits.
    CHECK_FALSE(
        compute_tau0(scales, Schedule::constant(), 2.0).has_value());
    CHECK_THROWS_AS(compute_tau0(scales, Schedule::polynomial(1.0), 0.0),
                    std::invalid_argument);
}

TEST_CASE("smooth bound: zero floor matches the bounded-gradient infimum") {
    TailFunctions poly1(Schedule::polynomial(1.0));
    // Tiny beta keeps the cap far above the tuned stepsize: tau0 = 0.
    ProblemScales sm = smooth_scales(1, 0.001, 1, 10000);
    ProblemScales lip = lipschitz_scales(1, 1, 10000);
    for (double rho : {1.0, 2.0, 5.0}) {
        BoundReport a = smooth_bound(sm, poly1, rho);
        BoundReport b = lipschitz_bound(lip, poly1, rho);
        CHECK(a.tau0 == 0.0);
        CHECK(a.tau_star == doctest::Approx(b.tau_star).epsilon(1e-12));
        CHECK(a.infimum_value ==
              doctest::Approx(b.infimum_value).epsilon(1e-12));
    }
}

TEST_CASE("smooth bound branch predicate") {
    // p = 1: with the noise-tuned stepsize eta* and cap ratio
    // rho_c = cap / eta*, the floor activates past rho_c and the schedule
    // keeps the sublinear branch until rho_c^3.
    const long T = 10000;
    const double eta_star = 1.0 / std::sqrt(2.0 * double(T));
    const double rho_c = 2.0;
    const double beta = 1.0 / (2.0 * rho_c * eta_star);
    ProblemScales scales = smooth_scales(1, beta, 1, T);
    TailFunctions poly1(Schedule::polynomial(1.0));

    CHECK(tuned_stepsize_smooth(scales, poly1) ==
          doctest::Approx(eta_star).epsilon(1e-12));

    BoundReport below = smooth_bound(scales, poly1, 1.5);
    CHECK(below.tau0 == 0.0);
    CHECK(below.branch == SmoothBranch::Sublinear);

    BoundReport mid = smooth_bound(scales, poly1, 4.0);
    CHECK(mid.tau0 > 0.0);
    CHECK(mid.branch == SmoothBranch::Sublinear);

    BoundReport past = smooth_bound(scales, poly1, 10.0);
    CHECK(past.tau0 > 0.0);
    CHECK(past.branch == SmoothBranch::SuffixLimited);
    CHECK(past.tau_star >= past.tau0);
}

TEST_CASE("smooth bound reports when no suffix fits") {
    // eta * h((T-1)/T) must exceed the cap: use a short horizon and a huge
    // misspecification factor.
    const long T = 100;
    const double eta_star = 1.0 / std::sqrt(2.0 * double(T));
    const double beta = 1.0 / (4.0 * eta_star);  // rho_c = 2
    ProblemScales scales = smooth_scales(1, beta, 1, T);
    TailFunctions poly1(Schedule::polynomial(1.0));
    CHECK_THROWS_AS(smooth_bound(scales, poly1, 250.0), std::domain_error);
}
