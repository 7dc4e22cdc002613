#include "anneal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "anneal/parallel.hpp"
#include "anneal/problems.hpp"

namespace anneal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& file) {
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);  // '\n' endings everywhere
    if (!out)
        throw std::runtime_error("cannot open " + file.string() +
                                 " for writing");
    return out;
}

}  // namespace

std::vector<double> build_grid(const GridSpec& spec) {
    if (spec.mantissas.empty())
        throw std::invalid_argument("build_grid: no mantissas");
    if (spec.decade_lo > spec.decade_hi)
        throw std::invalid_argument("build_grid: empty decade range");
    for (double m : spec.mantissas)
        if (!(m > 0.0))
            throw std::invalid_argument("build_grid: mantissas must be > 0");
    std::vector<double> grid;
    for (int d = spec.decade_lo; d <= spec.decade_hi; ++d)
        for (double m : spec.mantissas)
            grid.push_back(m * std::pow(10.0, d));
    std::sort(grid.begin(), grid.end());
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument(
                "build_grid: grid must be strictly increasing");
    return grid;
}

std::vector<std::vector<double>> subgrids(std::span<const double> grid,
                                          int level) {
    if (level < 1)
        throw std::invalid_argument("subgrids: level must be >= 1");
    if (static_cast<std::size_t>(level) > grid.size())
        throw std::invalid_argument("subgrids: level exceeds grid size");
    std::vector<std::vector<double>> out(level);
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i % level].push_back(grid[i]);
    return out;
}

double adjacent_ratio(std::span<const double> grid) {
    if (grid.size() < 2)
        throw std::invalid_argument("adjacent_ratio: need >= 2 grid points");
    return std::pow(grid.back() / grid.front(),
                    1.0 / double(grid.size() - 1));
}

double grid_factor(std::span<const double> grid, int level) {
    if (level < 1)
        throw std::invalid_argument("grid_factor: level must be >= 1");
    return std::pow(adjacent_ratio(grid), double(level));
}

ScheduleVariant ScheduleVariant::parse(std::string_view text) {
    ScheduleVariant v;
    v.label = std::string(text);
    std::string_view base = text;
    if (auto pos = text.rfind("+polyavg"); pos != std::string_view::npos &&
                                           pos + 8 == text.size()) {
        v.output = IterateKind::PolyAverage;
        base = text.substr(0, pos);
    } else if (auto pos2 = text.rfind("+avg");
               pos2 != std::string_view::npos && pos2 + 4 == text.size()) {
        v.output = IterateKind::UniformAverage;
        base = text.substr(0, pos2);
    }
    v.schedule = Schedule::parse(base);
    return v;
}

GridOutcome evaluate_grid(const StochasticProblem& problem,
                          std::span<const ScheduleVariant> variants,
                          std::span<const double> grid,
                          std::span<const std::uint64_t> seeds,
                          const GridRunOptions& options, int threads) {
    if (variants.empty() || grid.empty() || seeds.empty())
        throw std::invalid_argument(
            "evaluate_grid: variants, grid and seeds must be nonempty");

    long steps = options.steps;
    const auto* logreg = dynamic_cast<const LogRegProblem*>(&problem);
    if (steps == 0) {
        if (!logreg)
            throw std::invalid_argument(
                "evaluate_grid: steps must be set for this problem");
        steps = logreg->config().train_n / logreg->config().batch;
        if (steps < 1) steps = 1;
    }

    std::vector<double> init = options.init;
    if (init.empty()) init.assign(problem.dim(), 0.0);

    auto metric = options.metric;
    if (!metric) {
        if (logreg)
            metric = [](const StochasticProblem& p,
                        std::span<const double> x) {
                return static_cast<const LogRegProblem&>(p).test_loss(x);
            };
        else
            metric = [](const StochasticProblem& p,
                        std::span<const double> x) {
                return p.objective(x);
            };
    }

    GridOutcome outcome;
    outcome.grid.assign(grid.begin(), grid.end());
    outcome.seeds.assign(seeds.begin(), seeds.end());
    outcome.labels.reserve(variants.size());
    for (const auto& v : variants)
        outcome.labels.push_back(v.label.empty() ? v.schedule.name()
                                                 : v.label);
    outcome.cells.assign(variants.size(),
                         std::vector<GridCell>(grid.size()));
    for (auto& row : outcome.cells)
        for (auto& cell : row) cell.losses.assign(seeds.size(), 0.0);

    // Runs are shared between variants that differ only in which iterate
    // they score: key = (schedule, lr, seed). Keep it simple and rerun per
    // variant only when the schedule differs.
    struct Job {
        std::size_t variant, lr, seed;
    };
    std::vector<Job> jobs;
    jobs.reserve(variants.size() * grid.size() * seeds.size());
    for (std::size_t vi = 0; vi < variants.size(); ++vi)
        for (std::size_t li = 0; li < grid.size(); ++li)
            for (std::size_t si = 0; si < seeds.size(); ++si)
                jobs.push_back({vi, li, si});

    SgdOptions sgd_options;
    sgd_options.poly_average_gamma = options.poly_average_gamma;

    parallel_for(static_cast<long>(jobs.size()), threads, [&](long j) {
        const Job& job = jobs[j];
        const ScheduleVariant& variant = variants[job.variant];
        StepsizePlan plan{grid[job.lr], variant.schedule, steps};
        double score;
        try {
            SgdRun run =
                run_sgd(problem, plan, init, seeds[job.seed], sgd_options);
            const std::vector<double>& point =
                variant.output == IterateKind::Last ? run.last_iterate
                : variant.output == IterateKind::UniformAverage
                    ? run.uniform_average
                    : run.polynomial_average;
            score = metric(problem, point);
        } catch (const std::runtime_error&) {
            score = kInf;  // non-finite gradients mean the run diverged
        }
        outcome.cells[job.variant][job.lr].losses[job.seed] =
            std::isfinite(score) ? score : kInf;
    });

    for (auto& row : outcome.cells) {
        for (auto& cell : row) {
            double sum = 0.0;
            bool diverged = false;
            for (double l : cell.losses) {
                if (!std::isfinite(l)) diverged = true;
                sum += l;
            }
            std::size_t n = cell.losses.size();
            cell.mean = diverged ? kInf : sum / double(n);
            double var = 0.0;
            if (!diverged) {
                for (double l : cell.losses) {
                    double d = l - cell.mean;
                    var += d * d;
                }
                var /= double(n);
            }
            cell.stddev = diverged ? 0.0 : std::sqrt(var);
        }
    }
    return outcome;
}

std::vector<DegradationRow> degradation_curve(const GridOutcome& outcome,
                                              std::span<const int> levels) {
    std::vector<DegradationRow> rows;
    rows.reserve(levels.size());
    std::size_t n = outcome.grid.size();
    for (int level : levels) {
        if (level < 1 || static_cast<std::size_t>(level) > n)
            throw std::invalid_argument(
                "degradation_curve: level outside [1, grid size]");
        DegradationRow row;
        row.level = level;
        row.factor = grid_factor(outcome.grid, level);
        for (const auto& cells : outcome.cells) {
            double sum = 0.0, sum2 = 0.0;
            for (int cls = 0; cls < level; ++cls) {
                double best = kInf;
                for (std::size_t i = cls; i < n;
                     i += static_cast<std::size_t>(level))
                    best = std::min(best, cells[i].mean);
                sum += best;
                sum2 += best * best;
            }
            double mean = sum / double(level);
            double var = std::max(0.0, sum2 / double(level) - mean * mean);
            row.mean_best.push_back(mean);
            row.std_best.push_back(std::isfinite(mean) ? std::sqrt(var)
                                                       : 0.0);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_raw_csv(const GridOutcome& outcome,
                   const std::filesystem::path& file) {
    auto out = open_csv(file);
    out << "schedule,lr,seed,loss\n";
    for (std::size_t vi = 0; vi < outcome.labels.size(); ++vi)
        for (std::size_t li = 0; li < outcome.grid.size(); ++li)
            for (std::size_t si = 0; si < outcome.seeds.size(); ++si)
                out << outcome.labels[vi] << ','
                    << format_double(outcome.grid[li]) << ','
                    << outcome.seeds[si] << ','
                    << format_double(outcome.cells[vi][li].losses[si])
                    << '\n';
}

void write_cells_csv(const GridOutcome& outcome,
                     const std::filesystem::path& file) {
    auto out = open_csv(file);
    out << "schedule,lr,mean_loss,std_loss\n";
    for (std::size_t vi = 0; vi < outcome.labels.size(); ++vi)
        for (std::size_t li = 0; li < outcome.grid.size(); ++li) {
            const GridCell& cell = outcome.cells[vi][li];
            out << outcome.labels[vi] << ','
                << format_double(outcome.grid[li]) << ','
                << format_double(cell.mean) << ','
                << format_double(cell.stddev) << '\n';
        }
}

void write_aggregated_csv(const GridOutcome& outcome,
                          std::span<const DegradationRow> rows,
                          const std::filesystem::path& file) {
    auto out = open_csv(file);
    out << "schedule,level,grid_factor,mean_best,std_best\n";
    for (std::size_t vi = 0; vi < outcome.labels.size(); ++vi)
        for (const DegradationRow& row : rows)
            out << outcome.labels[vi] << ',' << row.level << ','
                << format_double(row.factor) << ','
                << format_double(row.mean_best[vi]) << ','
                << format_double(row.std_best[vi]) << '\n';
}

}  // namespace anneal
