#include <chrono>
#include <cstdio>
#include <vector>

#include "anneal/bounds.hpp"
#include "anneal/grid.hpp"
#include "anneal/parallel.hpp"
#include "anneal/problems.hpp"
#include "anneal/sgd.hpp"

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class F>
static double time_it(F&& fn) {
    auto start = Clock::now();
    fn();
    return seconds_since(start);
}

int main() {
    int threads = anneal::default_threads();
    std::printf("anneal-lab benchmark: serial (1 thread) vs parallel (%d threads)\n\n",
                threads);
    std::printf("%-28s %10s %10s %8s\n", "kernel", "serial[s]", "parallel[s]",
                "speedup");

    {
        anneal::TailFunctions tails(anneal::Schedule::cosine());
        anneal::ProblemScales scales{1.0, 1.0, 0.0, 0.0, 10000};
        std::vector<double> rhos;
        for (int i = 0; i < 64; ++i)
            rhos.push_back(1.0 + 49.0 * double(i) / 63.0);
        double ts = time_it([&] {
            anneal::coefficient_curve(scales, tails, rhos,
                                      anneal::BoundMode::Lipschitz, 1);
        });
        double tp = time_it([&] {
            anneal::coefficient_curve(scales, tails, rhos,
                                      anneal::BoundMode::Lipschitz, threads);
        });
        std::printf("%-28s %10.3f %10.3f %7.2fx\n", "coefficient_curve(64)",
                    ts, tp, ts / tp);
    }

    {
        double ts = time_it([&] { anneal::suffix_audit(500, 7, 1); });
        double tp = time_it([&] { anneal::suffix_audit(500, 7, threads); });
        std::printf("%-28s %10.3f %10.3f %7.2fx\n", "suffix_audit(500)", ts,
                    tp, ts / tp);
    }

    {
        anneal::LogRegConfig cfg;
        cfg.train_n = 4000;
        cfg.test_n = 1000;
        cfg.dim = 20;
        cfg.batch = 200;
        cfg.seed = 12345;
        auto problem = anneal::LogRegProblem::generate(cfg);
        std::vector<anneal::ScheduleVariant> variants{
            anneal::ScheduleVariant::parse("cosine"),
            anneal::ScheduleVariant::parse("constant"),
            anneal::ScheduleVariant::parse("constant+avg")};
        auto grid = anneal::build_grid(anneal::GridSpec{});
        std::vector<std::uint64_t> seeds{1, 2, 3};
        double ts = time_it([&] {
            anneal::evaluate_grid(problem, variants, grid, seeds, {}, 1);
        });
        double tp = time_it([&] {
            anneal::evaluate_grid(problem, variants, grid, seeds, {},
                                  threads);
        });
        std::printf("%-28s %10.3f %10.3f %7.2fx\n", "evaluate_grid(3x12x3)",
                    ts, tp, ts / tp);
    }

    return 0;
}
