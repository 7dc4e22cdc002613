#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "anneal/grid.hpp"
#include "anneal/problems.hpp"

using namespace anneal;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::filesystem::path temp_csv(const char* tag) {
    auto dir = std::filesystem::temp_directory_path();
    char name[64];
    std::snprintf(name, sizeof(name), "anneal_%s_%d.csv", tag,
                  int(::getpid()));
    return dir / name;
}

// Outcome with hand-set cell means, for exercising the aggregation logic
// without running any SGD.
GridOutcome synthetic_outcome(const std::vector<double>& means) {
    GridOutcome out;
    GridSpec spec;
    out.grid = build_grid(spec);
    REQUIRE(out.grid.size() == means.size());
    out.labels = {"synthetic"};
    out.seeds = {1};
    out.cells.assign(1, std::vector<GridCell>(means.size()));
    for (std::size_t i = 0; i < means.size(); ++i) {
        out.cells[0][i].losses = {means[i]};
        out.cells[0][i].mean = means[i];
        out.cells[0][i].stddev = 0.0;
    }
    return out;
}

std::size_t count_lines(const std::filesystem::path& file,
                        std::string& header) {
    std::ifstream in(file);
    REQUIRE(in.good());
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (n == 0) header = line;
        ++n;
    }
    return n;
}

struct BlowUp : StochasticProblem {
    Domain dom{Ball{{0.0}, 1000.0}};
    std::size_t dim() const override { return 1; }
    const Domain& domain() const override { return dom; }
    double objective(std::span<const double> x) const override {
        return x[0] * x[0];
    }
    void gradient(std::span<const double> x, std::mt19937_64&,
                  std::span<double> out) const override {
        // Behaves like a quadratic until the iterate leaves a moderate
        // region, then melts down, as an exploding training run would.
        out[0] = std::abs(x[0]) > 50.0 ? std::nan("") : 2.0 * x[0];
    }
};

}  // namespace

TEST_CASE("build_grid enumerates mantissa times decade") {
    GridSpec spec;
    auto grid = build_grid(spec);
    REQUIRE(grid.size() == 12);
    std::vector<double> expect{0.001, 0.0022, 0.005, 0.01, 0.022, 0.05,
                               0.1,   0.22,   0.5,   1.0,  2.2,   5.0};
    for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(grid[i] == doctest::Approx(expect[i]).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("build_grid validation") {
    GridSpec empty;
    empty.mantissas.clear();
    CHECK_THROWS_AS(build_grid(empty), std::invalid_argument);

    GridSpec reversed;
    reversed.decade_lo = 1;
    reversed.decade_hi = 0;
    CHECK_THROWS_AS(build_grid(reversed), std::invalid_argument);

    GridSpec nonpositive;
    nonpositive.mantissas = {1.0, -2.0};
    CHECK_THROWS_AS(build_grid(nonpositive), std::invalid_argument);

    // A mantissa of 10 collides with the next decade's 1.
    GridSpec colliding;
    colliding.mantissas = {1.0, 10.0};
    colliding.decade_lo = 0;
    colliding.decade_hi = 1;
    CHECK_THROWS_AS(build_grid(colliding), std::invalid_argument);
}

TEST_CASE("subgrids split by index class") {
    auto grid = build_grid(GridSpec{});
    auto classes = subgrids(grid, 3);
    REQUIRE(classes.size() == 3);
    for (const auto& cls : classes) CHECK(cls.size() == 4);
    CHECK(classes[0][0] == grid[0]);
    CHECK(classes[0][1] == grid[3]);
    CHECK(classes[1][0] == grid[1]);
    CHECK(classes[2][3] == grid[11]);

    auto whole = subgrids(grid, 1);
    REQUIRE(whole.size() == 1);
    CHECK(whole[0] == grid);

    CHECK_THROWS_AS(subgrids(grid, 0), std::invalid_argument);
    CHECK_THROWS_AS(subgrids(grid, 13), std::invalid_argument);
}

TEST_CASE("subgrids partition the grid at every level") {
    auto grid = build_grid(GridSpec{});
    for (int level = 1; level <= int(grid.size()); ++level) {
        auto classes = subgrids(grid, level);
        std::size_t total = 0;
        for (int cls = 0; cls < level; ++cls) {
            for (std::size_t j = 0; j < classes[cls].size(); ++j)
                CHECK(classes[cls][j] ==
                      grid[std::size_t(cls) + j * std::size_t(level)]);
            total += classes[cls].size();
        }
        CHECK(total == grid.size());
    }
}

TEST_CASE("adjacent ratio and grid factor") {
    auto grid = build_grid(GridSpec{});
    double ratio = adjacent_ratio(grid);
    CHECK(ratio == doctest::Approx(std::pow(5.0 / 0.001, 1.0 / 11.0))
                       .epsilon(1e-12));
    CHECK(ratio > 2.1);
    CHECK(ratio < 2.2);
    CHECK(grid_factor(grid, 1) == doctest::Approx(ratio));
    CHECK(grid_factor(grid, 3) == doctest::Approx(ratio * ratio * ratio));

    std::vector<double> single{0.5};
    CHECK_THROWS_AS(adjacent_ratio(single), std::invalid_argument);
    CHECK_THROWS_AS(grid_factor(grid, 0), std::invalid_argument);
}

TEST_CASE("schedule variant parsing") {
    auto cos = ScheduleVariant::parse("cosine");
    CHECK(cos.schedule == Schedule::cosine());
    CHECK(cos.output == IterateKind::Last);
    CHECK(cos.label == "cosine");

    auto avg = ScheduleVariant::parse("constant+avg");
    CHECK(avg.schedule == Schedule::constant());
    CHECK(avg.output == IterateKind::UniformAverage);
    CHECK(avg.label == "constant+avg");

    auto poly = ScheduleVariant::parse("poly:1.5+polyavg");
    CHECK(poly.schedule == Schedule::polynomial(1.5));
    CHECK(poly.output == IterateKind::PolyAverage);

    CHECK_THROWS(ScheduleVariant::parse("mystery+avg"));
    CHECK_THROWS(ScheduleVariant::parse(""));
}

TEST_CASE("evaluate_grid on a noiseless problem") {
    QuadProblem quad({0.0}, 2.0, 0.0, 10.0);
    std::vector<ScheduleVariant> variants{ScheduleVariant::parse("constant")};
    std::vector<double> grid{0.1, 0.25};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    GridRunOptions options;
    options.steps = 4;
    options.init = {1.0};
    auto outcome = evaluate_grid(quad, variants, grid, seeds, options);

    REQUIRE(outcome.cells.size() == 1);
    REQUIRE(outcome.cells[0].size() == 2);
    // x_{t+1} = (1 - 2 eta) x_t, objective = x^2.
    double last_a = std::pow(1.0 - 0.2, 4.0);
    double last_b = std::pow(1.0 - 0.5, 4.0);
    for (std::size_t li = 0; li < 2; ++li) {
        const GridCell& cell = outcome.cells[0][li];
        double expect = li == 0 ? last_a * last_a : last_b * last_b;
        CHECK(cell.mean == doctest::Approx(expect).epsilon(1e-12));
        // No noise: every seed produces the same loss bit for bit, and the
        // spread is zero up to the rounding of mean-of-three.
        CHECK(cell.stddev <= 1e-15 * cell.mean);
        for (double l : cell.losses) {
            CHECK(l == cell.losses[0]);
            CHECK(l == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    // Horizon is required for problems without an epoch convention.
    GridRunOptions no_steps;
    CHECK_THROWS_AS(evaluate_grid(quad, variants, grid, seeds, no_steps),
                    std::invalid_argument);
}

TEST_CASE("evaluate_grid marks exploding runs as divergent") {
    BlowUp problem;
    std::vector<ScheduleVariant> variants{ScheduleVariant::parse("constant")};
    std::vector<double> grid{0.1, 40.0};
    std::vector<std::uint64_t> seeds{1, 2};
    GridRunOptions options;
    options.steps = 30;
    options.init = {1.0};
    auto outcome = evaluate_grid(problem, variants, grid, seeds, options);

    CHECK(std::isfinite(outcome.cells[0][0].mean));
    CHECK(outcome.cells[0][1].mean == kInf);
    for (double l : outcome.cells[0][1].losses) CHECK(l == kInf);

    // Divergent cells poison the level means but keep the curve defined.
    std::vector<int> levels{1, 2};
    auto rows = degradation_curve(outcome, levels);
    CHECK(std::isfinite(rows[0].mean_best[0]));
    CHECK(rows[1].mean_best[0] == kInf);
    CHECK(rows[1].std_best[0] == 0.0);
}

TEST_CASE("evaluate_grid is reproducible and thread-count invariant") {
    AbsProblem abs(1.0, 1.0, AbsNoise::Rademacher);
    std::vector<ScheduleVariant> variants{
        ScheduleVariant::parse("cosine"),
        ScheduleVariant::parse("constant+avg")};
    std::vector<double> grid{0.01, 0.05, 0.2};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    GridRunOptions options;
    options.steps = 40;

    auto serial = evaluate_grid(abs, variants, grid, seeds, options, 1);
    auto threaded = evaluate_grid(abs, variants, grid, seeds, options, 4);
    auto rerun = evaluate_grid(abs, variants, grid, seeds, options, 1);
    for (std::size_t vi = 0; vi < variants.size(); ++vi)
        for (std::size_t li = 0; li < grid.size(); ++li) {
            CHECK(serial.cells[vi][li].losses ==
                  threaded.cells[vi][li].losses);
            CHECK(serial.cells[vi][li].losses == rerun.cells[vi][li].losses);
        }
}

TEST_CASE("degradation at level one is the full-grid best") {
    std::vector<double> means{0.9, 0.3, 0.7, 0.5, 0.8, 0.2,
                              0.6, 0.4, 1.0, 0.35, 0.45, 0.55};
    auto outcome = synthetic_outcome(means);
    std::vector<int> levels{1};
    auto rows = degradation_curve(outcome, levels);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean_best[0] == doctest::Approx(0.2));
    CHECK(rows[0].std_best[0] == 0.0);
    CHECK(rows[0].factor == doctest::Approx(adjacent_ratio(outcome.grid)));
}

TEST_CASE("degradation level two averages the two class bests") {
    std::vector<double> means{0.9, 0.3, 0.7, 0.5, 0.8, 0.2,
                              0.6, 0.4, 1.0, 0.35, 0.45, 0.55};
    auto outcome = synthetic_outcome(means);
    std::vector<int> levels{2};
    auto rows = degradation_curve(outcome, levels);
    // Even indices: min(0.9, 0.7, 0.8, 0.6, 1.0, 0.45) = 0.45.
    // Odd indices: min(0.3, 0.5, 0.2, 0.4, 0.35, 0.55) = 0.2.
    CHECK(rows[0].mean_best[0] == doctest::Approx(0.325));
    CHECK(rows[0].std_best[0] == doctest::Approx(0.125));
}

TEST_CASE("mean-of-bests never improves along nested coarsenings") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> chain_a{1, 2, 4, 12};
    std::vector<int> chain_b{1, 3, 6, 12};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> means(12);
        for (auto& m : means) m = unif(rng);
        auto outcome = synthetic_outcome(means);
        for (const auto& chain : {chain_a, chain_b}) {
            auto rows = degradation_curve(outcome, chain);
            for (std::size_t i = 1; i < rows.size(); ++i)
                CHECK(rows[i].mean_best[0] >=
                      rows[i - 1].mean_best[0] - 1e-12);
        }
    }
}

TEST_CASE("degradation_curve validates levels") {
    auto outcome = synthetic_outcome(std::vector<double>(12, 0.5));
    std::vector<int> zero{0};
    CHECK_THROWS_AS(degradation_curve(outcome, zero), std::invalid_argument);
    std::vector<int> huge{13};
    CHECK_THROWS_AS(degradation_curve(outcome, huge), std::invalid_argument);
}

TEST_CASE("csv emitters") {
    AbsProblem abs(1.0, 1.0, AbsNoise::Rademacher);
    std::vector<ScheduleVariant> variants{
        ScheduleVariant::parse("cosine"),
        ScheduleVariant::parse("constant+avg")};
    std::vector<double> grid{0.01, 0.1};
    std::vector<std::uint64_t> seeds{1, 2};
    GridRunOptions options;
    options.steps = 10;
    auto outcome = evaluate_grid(abs, variants, grid, seeds, options);
    std::vector<int> levels{1, 2};
    auto rows = degradation_curve(outcome, levels);

    std::string header;
    auto raw = temp_csv("raw");
    write_raw_csv(outcome, raw);
    CHECK(count_lines(raw, header) == 1 + 2 * 2 * 2);
    CHECK(header == "schedule,lr,seed,loss");

    auto cells = temp_csv("cells");
    write_cells_csv(outcome, cells);
    CHECK(count_lines(cells, header) == 1 + 2 * 2);
    CHECK(header == "schedule,lr,mean_loss,std_loss");

    auto agg = temp_csv("agg");
    write_aggregated_csv(outcome, rows, agg);
    CHECK(count_lines(agg, header) == 1 + 2 * 2);
    CHECK(header == "schedule,level,grid_factor,mean_best,std_best");

    // Spot-check one raw row against the outcome it came from.
    {
        std::ifstream in(raw);
        std::string line;
        std::getline(in, line);  // header
        std::getline(in, line);
        auto last_comma = line.rfind(',');
        double loss = std::stod(line.substr(last_comma + 1));
        CHECK(loss == outcome.cells[0][0].losses[0]);
        CHECK(line.substr(0, line.find(',')) == "cosine");
    }

    std::filesystem::remove(raw);
    std::filesystem::remove(cells);
    std::filesystem::remove(agg);
}

TEST_CASE("variant labels default to the schedule name") {
    QuadProblem quad({0.0}, 1.0, 0.0, 10.0);
    ScheduleVariant unlabeled;
    unlabeled.schedule = Schedule::polynomial(2.0);
    std::vector<ScheduleVariant> variants{unlabeled};
    std::vector<double> grid{0.1};
    std::vector<std::uint64_t> seeds{1};
    GridRunOptions options;
    options.steps = 2;
    options.init = {1.0};
    auto outcome = evaluate_grid(quad, variants, grid, seeds, options);
    REQUIRE(outcome.labels.size() == 1);
    CHECK(outcome.labels[0] == "poly:2");
}
