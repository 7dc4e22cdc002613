#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "anneal/sgd.hpp"

namespace anneal {

// Geometric learning-rate grid: every mantissa times every power of ten in
// [decade_lo, decade_hi]. The default mantissas give an adjacent ratio of
// about 2.15 (cube root of ten).
struct GridSpec {
    std::vector<double> mantissas{1.0, 2.2, 5.0};
    int decade_lo = -3;
    int decade_hi = 0;
};

std::vector<double> build_grid(const GridSpec& spec);

// Splits the full grid into `level` congruence classes by index, preserving
// order; level 1 returns the grid itself.
std::vector<std::vector<double>> subgrids(std::span<const double> grid,
                                          int level);

// Geometric mean of adjacent grid ratios.
double adjacent_ratio(std::span<const double> grid);

// Effective search resolution of a level: adjacent_ratio(grid)^level.
double grid_factor(std::span<const double> grid, int level);

enum class IterateKind { Last, UniformAverage, PolyAverage };

// A curve in the comparison: a schedule together with which iterate of the
// run is scored. label appears in CSV output; parse accepts "cosine",
// "poly:1", "constant+avg", "constant+polyavg" and the like.
struct ScheduleVariant {
    Schedule schedule = Schedule::constant();
    IterateKind output = IterateKind::Last;
    std::string label;

    static ScheduleVariant parse(std::string_view text);
};

struct GridCell {
    std::vector<double> losses;  // one per seed; +inf marks divergence
    double mean = 0.0;
    double stddev = 0.0;
};

struct GridOutcome {
    std::vector<double> grid;
    std::vector<std::string> labels;
    std::vector<std::uint64_t> seeds;
    // cells[variant][lr_index]
    std::vector<std::vector<GridCell>> cells;
};

struct GridRunOptions {
    // SGD horizon per run; 0 means one epoch for logistic regression
    // (train_n / batch) and is an error for other problems.
    long steps = 0;
    // Initial point; empty means the domain-centred origin.
    std::vector<double> init;
    double poly_average_gamma = 8.0;
    // Scores a finished run output; defaults to LogRegProblem::test_loss
    // when the problem is logistic regression, problem.objective otherwise.
    std::function<double(const StochasticProblem&, std::span<const double>)>
        metric;
};

// Runs every (variant, learning rate, seed) cell and aggregates means and
// stds over seeds. Cells run in parallel into preassigned slots, so results
// do not depend on the thread count. Non-finite losses are stored as +inf.
GridOutcome evaluate_grid(const StochasticProblem& problem,
                          std::span<const ScheduleVariant> variants,
                          std::span<const double> grid,
                          std::span<const std::uint64_t> seeds,
                          const GridRunOptions& options = {},
                          int threads = 0);

struct DegradationRow {
    int level = 1;
    double factor = 1.0;
    // Per variant: mean over sub-grids of the sub-grid best mean loss, and
    // the std of those bests across sub-grids.
    std::vector<double> mean_best;
    std::vector<double> std_best;
};

std::vector<DegradationRow> degradation_curve(const GridOutcome& outcome,
                                              std::span<const int> levels);

// CSV emitters. raw: (schedule, lr, seed, loss) one row per run.
// cells: (schedule, lr, mean_loss, std_loss). aggregated:
// (schedule, level, grid_factor, mean_best, std_best).
void write_raw_csv(const GridOutcome& outcome,
                   const std::filesystem::path& file);
void write_cells_csv(const GridOutcome& outcome,
                     const std::filesystem::path& file);
void write_aggregated_csv(const GridOutcome& outcome,
                          std::span<const DegradationRow> rows,
                          const std::filesystem::path& file);

}  // namespace anneal
