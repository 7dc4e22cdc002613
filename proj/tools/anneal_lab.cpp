#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anneal/bounds.hpp"
#include "anneal/grid.hpp"
#include "anneal/parallel.hpp"
#include "anneal/problems.hpp"
#include "anneal/schedule.hpp"
#include "anneal/sgd.hpp"
#include "anneal/svg.hpp"
#include "anneal/version.hpp"

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string now_stamp() {
    auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::ofstream open_out(const std::filesystem::path& file) {
    if (file.has_parent_path())
        std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + file.string() +
                                 " for writing");
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    return parts;
}

// --rho accepts "lo:hi" (log-spaced with --points) or an explicit
// comma-separated list.
std::vector<double> parse_rho(const std::string& text, int points) {
    std::vector<double> rhos;
    if (text.find(':') != std::string::npos) {
        auto parts = split(text, ':');
        if (parts.size() != 2)
            throw std::runtime_error("--rho expects lo:hi or a comma list");
        double lo = std::stod(parts[0]);
        double hi = std::stod(parts[1]);
        if (!(lo >= 1.0))
            throw std::runtime_error("--rho: lo must be >= 1");
        if (!(hi >= lo)) throw std::runtime_error("--rho: need hi >= lo");
        if (points < 1) throw std::runtime_error("--points must be >= 1");
        if (points == 1 || hi == lo) {
            rhos.push_back(lo);
        } else {
            for (int i = 0; i < points; ++i)
                rhos.push_back(lo * std::pow(hi / lo,
                                             double(i) / double(points - 1)));
        }
        return rhos;
    }
    for (const auto& part : split(text, ',')) {
        double v = std::stod(part);
        if (!(v >= 1.0)) throw std::runtime_error("--rho: values must be >= 1");
        rhos.push_back(v);
    }
    if (rhos.empty()) throw std::runtime_error("--rho: empty list");
    return rhos;
}

std::string safe_name(std::string s) {
    for (char& c : s)
        if (c == ':') c = '-';
    return s;
}

// ---------------------------------------------------------------- bound-curve

struct BoundCurveArgs {
    std::string schedules = "cosine,poly:1,poly:2,poly:3";
    std::string rho = "1:50";
    int points = 25;
    std::string mode = "lipschitz";
    std::string out = "out";
    int threads = 0;
    bool stamp = false;
    double diameter = 1.0;
    double grad_bound = 1.0;
    double beta = 1.0;
    double sigma = 1.0;
    long horizon = 10000;
};

int run_bound_curve(const BoundCurveArgs& args) {
    anneal::BoundMode mode;
    if (args.mode == "lipschitz")
        mode = anneal::BoundMode::Lipschitz;
    else if (args.mode == "smooth")
        mode = anneal::BoundMode::Smooth;
    else
        throw std::runtime_error("--mode must be lipschitz or smooth");

    auto rhos = parse_rho(args.rho, args.points);
    anneal::ProblemScales scales;
    scales.diameter = args.diameter;
    scales.grad_bound = args.grad_bound;
    scales.smoothness = args.beta;
    scales.noise_std = args.sigma;
    scales.steps = args.horizon;

    std::filesystem::path dir(args.out);
    auto curve_csv = open_out(dir / "bound_curve.csv");
    curve_csv << "schedule,rho,coefficient,tau_star\n";
    json all = json::array();
    std::vector<anneal::PlotSeries> series;

    for (const auto& name : split(args.schedules, ',')) {
        anneal::Schedule schedule = anneal::Schedule::parse(name);
        if (!schedule.annealed())
            throw std::runtime_error(
                "--schedules: '" + name +
                "' has no finite tail integral; use an annealed schedule");
        anneal::TailFunctions tails(schedule);
        auto reports =
            anneal::coefficient_curve(scales, tails, rhos, mode, args.threads);

        auto report_csv =
            open_out(dir / ("report_" + safe_name(schedule.name()) + ".csv"));
        report_csv << "rho,tau_star,infimum,eta_star,rate_opt,bound_main,"
                      "low_order,coefficient\n";
        anneal::PlotSeries s;
        s.label = schedule.name();
        for (const auto& rep : reports) {
            curve_csv << schedule.name() << ',' << fmt17(rep.rho) << ','
                      << fmt17(rep.coefficient) << ',' << fmt17(rep.tau_star)
                      << '\n';
            report_csv << fmt17(rep.rho) << ',' << fmt17(rep.tau_star) << ','
                       << fmt17(rep.infimum_value) << ','
                       << fmt17(rep.eta_star) << ',' << fmt17(rep.rate_opt)
                       << ',' << fmt17(rep.bound_main) << ','
                       << fmt17(rep.low_order) << ','
                       << fmt17(rep.coefficient) << '\n';
            json r{{"schedule", schedule.name()},
                   {"rho", rep.rho},
                   {"tau_star", rep.tau_star},
                   {"infimum", rep.infimum_value},
                   {"eta_star", rep.eta_star},
                   {"rate_opt", rep.rate_opt},
                   {"bound_main", rep.bound_main},
                   {"low_order", rep.low_order},
                   {"coefficient", rep.coefficient}};
            if (mode == anneal::BoundMode::Smooth) {
                r["tau0"] = rep.tau0;
                r["branch"] = rep.branch == anneal::SmoothBranch::Sublinear
                                  ? "sublinear"
                                  : "suffix-limited";
            }
            all.push_back(std::move(r));
            s.x.push_back(rep.rho);
            s.y.push_back(rep.coefficient);
        }
        series.push_back(std::move(s));
    }

    auto json_out = open_out(dir / "bound_reports.json");
    json_out << all.dump(2) << '\n';

    anneal::PlotOptions plot;
    plot.title = args.mode == "smooth" ? "robustness coefficient (smooth)"
                                       : "robustness coefficient";
    plot.x_label = "rho";
    plot.y_label = "coefficient";
    plot.log_x = true;
    if (args.stamp) plot.stamp = now_stamp();
    anneal::write_line_plot(dir / "bound_curve.svg", series, plot);

    std::cout << "bound-curve: wrote " << (dir / "bound_curve.csv").string()
              << " (" << rhos.size() << " rho points, "
              << series.size() << " schedules)\n";
    return 0;
}

// -------------------------------------------------------------------- sgd-run

struct SgdRunArgs {
    std::string problem = "abs";
    std::string schedule = "cosine";
    double eta = 0.0;
    long horizon = 0;
    std::uint64_t seed = 1;
    std::string out = "out";
    bool trajectory = false;
    // abs
    double grad_scale = 1.0;
    double diameter = 1.0;
    std::string noise = "none";
    // quad
    int dim = 10;
    double beta = 1.0;
    double sigma = 0.0;
    double radius = 1.0;
    // logreg
    long n = 10000;
    long test_n = 2000;
    double flip = 0.1;
    long batch = 1000;
    std::uint64_t problem_seed = 1;
    std::string dataset;
    std::string save_dataset;
};

int run_sgd_cmd(const SgdRunArgs& args) {
    std::unique_ptr<anneal::StochasticProblem> problem;
    const anneal::LogRegProblem* logreg = nullptr;
    long horizon = args.horizon;

    if (args.problem == "abs") {
        anneal::AbsNoise noise;
        if (args.noise == "none")
            noise = anneal::AbsNoise::None;
        else if (args.noise == "rademacher")
            noise = anneal::AbsNoise::Rademacher;
        else
            throw std::runtime_error("--noise must be none or rademacher");
        problem = std::make_unique<anneal::AbsProblem>(args.grad_scale,
                                                       args.diameter, noise);
    } else if (args.problem == "quad") {
        std::vector<double> x_star(args.dim,
                                   args.radius / (2.0 * std::sqrt(args.dim)));
        problem = std::make_unique<anneal::QuadProblem>(x_star, args.beta,
                                                        args.sigma,
                                                        args.radius);
    } else if (args.problem == "logreg") {
        anneal::LogRegProblem p = [&] {
            if (!args.dataset.empty())
                return anneal::LogRegProblem::load(args.dataset);
            anneal::LogRegConfig cfg;
            cfg.train_n = args.n;
            cfg.test_n = args.test_n;
            cfg.dim = args.dim;
            cfg.flip_prob = args.flip;
            cfg.seed = args.problem_seed;
            cfg.batch = args.batch;
            cfg.radius = args.radius;
            return anneal::LogRegProblem::generate(cfg);
        }();
        if (!args.save_dataset.empty()) p.save(args.save_dataset);
        auto owned = std::make_unique<anneal::LogRegProblem>(std::move(p));
        logreg = owned.get();
        problem = std::move(owned);
        if (horizon == 0)
            horizon = logreg->config().train_n / logreg->config().batch;
    } else {
        throw std::runtime_error("--problem must be abs, quad or logreg");
    }

    if (horizon <= 0)
        throw std::runtime_error("--horizon must be positive");
    if (!(args.eta > 0.0))
        throw std::runtime_error("--eta must be positive");

    anneal::StepsizePlan plan{args.eta,
                              anneal::Schedule::parse(args.schedule), horizon};
    std::vector<double> init(problem->dim(), 0.0);
    anneal::SgdOptions options;
    options.record_objectives = args.trajectory;
    anneal::SgdRun run = anneal::run_sgd(*problem, plan, init, args.seed,
                                         options);

    json summary{{"problem", args.problem},
                 {"schedule", plan.schedule.name()},
                 {"eta", args.eta},
                 {"steps", horizon},
                 {"seed", args.seed},
                 {"objective_last", problem->objective(run.last_iterate)},
                 {"objective_uniform_avg",
                  problem->objective(run.uniform_average)},
                 {"objective_poly_avg",
                  problem->objective(run.polynomial_average)}};
    if (logreg) {
        summary["test_loss_last"] = logreg->test_loss(run.last_iterate);
        summary["test_loss_uniform_avg"] =
            logreg->test_loss(run.uniform_average);
        summary["test_loss_poly_avg"] =
            logreg->test_loss(run.polynomial_average);
    }

    std::filesystem::path dir(args.out);
    auto out = open_out(dir / "run.json");
    out << summary.dump(2) << '\n';

    if (args.trajectory) {
        auto csv = open_out(dir / "trajectory.csv");
        csv << "t,eta_t,objective\n";
        for (long t = 1; t <= horizon; ++t)
            csv << t << ',' << fmt17(run.stepsizes[t - 1]) << ','
                << fmt17(run.objectives[t - 1]) << '\n';
    }

    std::cout << "sgd-run: objective(last) = "
              << summary["objective_last"].get<double>() << "\n";
    return 0;
}

// --------------------------------------------------------------- suffix-audit

int run_suffix_audit(int cases, std::uint64_t seed, int threads,
                     const std::string& out) {
    auto result = anneal::suffix_audit(cases, seed, threads);
    std::cout << "suffix-audit: cases=" << result.cases
              << " violations=" << result.violations
              << " max_lhs_over_rhs=" << result.max_lhs_over_rhs << "\n";
    if (!out.empty()) {
        std::filesystem::path dir(out);
        auto csv = open_out(dir / "audit_failures.csv");
        csv << "schedule,steps,from_step,tau,eta,c1,c2,lhs,rhs\n";
        for (const auto& f : result.failures)
            csv << f.schedule << ',' << f.steps << ',' << f.from_step << ','
                << fmt17(f.tau) << ',' << fmt17(f.eta) << ',' << fmt17(f.c1)
                << ',' << fmt17(f.c2) << ',' << fmt17(f.lhs) << ','
                << fmt17(f.rhs) << '\n';
    }
    return result.violations == 0 ? 0 : 1;
}

// ------------------------------------------------------------------ adversary

struct AdversaryArgs {
    std::string kind = "fixed";
    double diameter = 1.0;
    double grad_scale = 1.0;
    long horizon = 400;
    double rho = 4.0;
    std::string out = "out";
};

int run_adversary(const AdversaryArgs& args) {
    std::filesystem::path dir(args.out);
    std::ostringstream verdict;
    std::vector<double> iterates;
    double value_scale = args.grad_scale;

    if (args.kind == "fixed") {
        auto rep = anneal::fixed_step_adversary(args.diameter,
                                                args.grad_scale,
                                                args.horizon, args.rho);
        verdict << "bound satisfied " << (rep.bound_satisfied ? "true" : "false")
                << " lower_bound=" << fmt17(rep.lower_bound)
                << " average_suboptimality=" << fmt17(rep.average_suboptimality)
                << " alternation=" << (rep.alternation_ok ? "exact" : "BROKEN");
        iterates = std::move(rep.iterates);
    } else if (args.kind == "invsqrt") {
        auto rep = anneal::invsqrt_adversary(args.diameter, args.grad_scale,
                                             args.horizon, args.rho);
        verdict << "bound satisfied " << (rep.bound_satisfied ? "true" : "false")
                << " lower_bound=" << fmt17(rep.lower_bound)
                << " average_suboptimality=" << fmt17(rep.average_suboptimality)
                << " t0=" << rep.t0
                << " straddle=" << (rep.triangle_ok ? "ok" : "BROKEN")
                << " projection_inactive="
                << (rep.projection_inactive ? "ok" : "BROKEN");
        iterates = std::move(rep.iterates);
    } else {
        throw std::runtime_error("--kind must be fixed or invsqrt");
    }

    auto csv = open_out(dir / "trajectory.csv");
    csv << "t,x,value\n";
    for (std::size_t t = 0; t < iterates.size(); ++t)
        csv << (t + 1) << ',' << fmt17(iterates[t]) << ','
            << fmt17(value_scale * std::abs(iterates[t])) << '\n';

    auto vf = open_out(dir / "verdict.txt");
    vf << verdict.str() << '\n';
    std::cout << verdict.str() << "\n";
    return 0;
}

// ------------------------------------------------------------ grid-robustness

void expect_keys(const json& j, const std::string& path,
                 std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw std::runtime_error(
                "config: unknown key '" +
                (path.empty() ? it.key() : path + "." + it.key()) + "'");
    }
}

json default_grid_config() {
    return json{
        {"version", 1},
        {"problem",
         {{"kind", "logreg"},
          {"n", 10000},
          {"test_n", 2000},
          {"dim", 20},
          {"flip", 0.1},
          {"seed", 12345},
          {"batch", 200},
          {"radius", 100.0}}},
        {"sgd", {{"epochs", 1}, {"poly_gamma", 8.0}}},
        {"schedules",
         {"cosine", "poly:1", "constant", "constant+avg",
          "constant+polyavg"}},
        {"grid",
         {{"mantissas", {1.0, 2.2, 5.0}}, {"decade_lo", -3},
          {"decade_hi", 0}}},
        {"seeds", {1, 2, 3}},
        {"levels", {1, 2, 3, 4}}};
}

int run_grid_robustness(const std::string& config_path,
                        const std::string& out, int threads, bool stamp) {
    json config;
    if (config_path.empty()) {
        config = default_grid_config();
    } else {
        std::ifstream in(config_path);
        if (!in)
            throw std::runtime_error("cannot open config " + config_path);
        try {
            config = json::parse(in);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("config: " + std::string(e.what()));
        }
    }

    expect_keys(config, "",
                {"version", "problem", "sgd", "schedules", "grid", "seeds",
                 "levels", "dataset"});
    if (config.value("version", 0) != 1)
        throw std::runtime_error("config: version must be 1");

    const json& pj = config.at("problem");
    expect_keys(pj, "problem",
                {"kind", "n", "test_n", "dim", "flip", "seed", "batch",
                 "radius"});
    if (pj.value("kind", "") != "logreg")
        throw std::runtime_error("config: problem.kind must be 'logreg'");

    anneal::LogRegConfig cfg;
    cfg.train_n = pj.value("n", 10000L);
    cfg.test_n = pj.value("test_n", 2000L);
    cfg.dim = pj.value("dim", 20);
    cfg.flip_prob = pj.value("flip", 0.1);
    cfg.seed = pj.value("seed", std::uint64_t(1));
    cfg.batch = pj.value("batch", 200L);
    cfg.radius = pj.value("radius", 100.0);

    anneal::LogRegProblem problem = [&] {
        if (config.contains("dataset")) {
            std::filesystem::path p =
                config.at("dataset").get<std::string>();
            if (std::filesystem::exists(p))
                return anneal::LogRegProblem::load(p);
            auto gen = anneal::LogRegProblem::generate(cfg);
            gen.save(p);
            return gen;
        }
        return anneal::LogRegProblem::generate(cfg);
    }();

    const json& sj = config.value("sgd", json::object());
    expect_keys(sj, "sgd", {"epochs", "steps", "poly_gamma"});
    anneal::GridRunOptions options;
    long epochs = sj.value("epochs", 1L);
    options.steps = sj.value("steps", 0L);
    if (options.steps == 0)
        options.steps =
            epochs * (problem.config().train_n / problem.config().batch);
    options.poly_average_gamma = sj.value("poly_gamma", 8.0);

    std::vector<anneal::ScheduleVariant> variants;
    for (const auto& name : config.at("schedules"))
        variants.push_back(
            anneal::ScheduleVariant::parse(name.get<std::string>()));

    const json& gj = config.at("grid");
    expect_keys(gj, "grid", {"mantissas", "decade_lo", "decade_hi"});
    anneal::GridSpec spec;
    if (gj.contains("mantissas"))
        spec.mantissas = gj.at("mantissas").get<std::vector<double>>();
    spec.decade_lo = gj.value("decade_lo", -3);
    spec.decade_hi = gj.value("decade_hi", 0);
    auto grid = anneal::build_grid(spec);

    auto seeds = config.at("seeds").get<std::vector<std::uint64_t>>();
    auto levels = config.at("levels").get<std::vector<int>>();

    auto outcome = anneal::evaluate_grid(problem, variants, grid, seeds,
                                         options, threads);
    auto rows = anneal::degradation_curve(outcome, levels);

    std::filesystem::path dir(out);
    anneal::write_raw_csv(outcome, dir / "raw.csv");
    anneal::write_cells_csv(outcome, dir / "cells.csv");
    anneal::write_aggregated_csv(outcome, rows, dir / "aggregated.csv");

    json manifest{{"version", anneal::kVersion},
                  {"config", config},
                  {"grid", grid},
                  {"adjacent_ratio", anneal::adjacent_ratio(grid)}};
    auto mf = open_out(dir / "manifest.json");
    mf << manifest.dump(2) << '\n';

    std::vector<anneal::PlotSeries> series(outcome.labels.size());
    for (std::size_t vi = 0; vi < outcome.labels.size(); ++vi) {
        series[vi].label = outcome.labels[vi];
        for (const auto& row : rows) {
            series[vi].x.push_back(row.factor);
            series[vi].y.push_back(row.mean_best[vi]);
        }
    }
    anneal::PlotOptions plot;
    plot.title = "grid-search degradation";
    plot.x_label = "grid factor";
    plot.y_label = "mean best test loss";
    plot.log_x = true;
    if (stamp) plot.stamp = now_stamp();
    anneal::write_line_plot(dir / "degradation.svg", series, plot);

    std::cout << "grid-robustness: " << outcome.labels.size()
              << " schedules x " << grid.size() << " learning rates x "
              << seeds.size() << " seeds -> " << (dir / "aggregated.csv").string()
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anneal-lab: stepsize schedule robustness toolkit"};
    app.require_subcommand(1);

    BoundCurveArgs bc;
    auto* cmd_bc = app.add_subcommand(
        "bound-curve", "evaluate robustness bound curves over rho");
    cmd_bc->add_option("--schedules", bc.schedules,
                       "comma-separated schedule list");
    cmd_bc->add_option("--rho", bc.rho, "rho range lo:hi or comma list");
    cmd_bc->add_option("--points", bc.points, "points for a rho range");
    cmd_bc->add_option("--mode", bc.mode, "lipschitz or smooth");
    cmd_bc->add_option("--out", bc.out, "output directory");
    cmd_bc->add_option("--threads", bc.threads, "worker threads (0 = auto)");
    cmd_bc->add_flag("--stamp", bc.stamp, "embed a timestamp in the SVG");
    cmd_bc->add_option("--diameter", bc.diameter, "domain diameter D");
    cmd_bc->add_option("--grad-bound", bc.grad_bound,
                       "gradient second-moment bound G");
    cmd_bc->add_option("--beta", bc.beta, "smoothness (smooth mode)");
    cmd_bc->add_option("--sigma", bc.sigma, "noise level (smooth mode)");
    cmd_bc->add_option("--horizon", bc.horizon, "step count T");

    SgdRunArgs sr;
    auto* cmd_sr = app.add_subcommand("sgd-run", "run projected SGD once");
    cmd_sr->add_option("--problem", sr.problem, "abs, quad or logreg");
    cmd_sr->add_option("--schedule", sr.schedule, "stepsize schedule");
    cmd_sr->add_option("--eta", sr.eta, "base stepsize")->required();
    cmd_sr->add_option("--horizon", sr.horizon,
                       "steps (0 = one logreg epoch)");
    cmd_sr->add_option("--seed", sr.seed, "run seed");
    cmd_sr->add_option("--out", sr.out, "output directory");
    cmd_sr->add_flag("--trajectory", sr.trajectory,
                     "record per-step objectives");
    cmd_sr->add_option("--grad-scale", sr.grad_scale, "abs: G");
    cmd_sr->add_option("--diameter", sr.diameter, "abs: box diameter");
    cmd_sr->add_option("--noise", sr.noise, "abs: none or rademacher");
    cmd_sr->add_option("--dim", sr.dim, "quad/logreg dimension");
    cmd_sr->add_option("--beta", sr.beta, "quad smoothness");
    cmd_sr->add_option("--sigma", sr.sigma, "quad noise std");
    cmd_sr->add_option("--radius", sr.radius, "ball radius");
    cmd_sr->add_option("--n", sr.n, "logreg train size");
    cmd_sr->add_option("--test-n", sr.test_n, "logreg test size");
    cmd_sr->add_option("--flip", sr.flip, "logreg label flip probability");
    cmd_sr->add_option("--batch", sr.batch, "logreg minibatch size");
    cmd_sr->add_option("--problem-seed", sr.problem_seed,
                       "logreg generation seed");
    cmd_sr->add_option("--dataset", sr.dataset, "load dataset file");
    cmd_sr->add_option("--save-dataset", sr.save_dataset,
                       "save generated dataset");

    int audit_cases = 500;
    std::uint64_t audit_seed = 20240501;
    int audit_threads = 0;
    std::string audit_out;
    auto* cmd_audit = app.add_subcommand(
        "suffix-audit",
        "randomized audit of the discrete-vs-continuous suffix bound");
    cmd_audit->add_option("--cases", audit_cases, "number of random cases");
    cmd_audit->add_option("--seed", audit_seed, "audit seed");
    cmd_audit->add_option("--threads", audit_threads,
                          "worker threads (0 = auto)");
    cmd_audit->add_option("--out", audit_out,
                          "directory for a failure table");

    AdversaryArgs adv;
    auto* cmd_adv = app.add_subcommand(
        "adversary", "deterministic lower-bound constructions");
    cmd_adv->add_option("--kind", adv.kind, "fixed or invsqrt");
    cmd_adv->add_option("--diameter", adv.diameter, "domain diameter D");
    cmd_adv->add_option("--grad-scale", adv.grad_scale, "gradient scale G");
    cmd_adv->add_option("--horizon", adv.horizon, "steps T");
    cmd_adv->add_option("--rho", adv.rho, "misspecification factor");
    cmd_adv->add_option("--out", adv.out, "output directory");

    std::string grid_config;
    std::string grid_out = "out";
    int grid_threads = 0;
    bool grid_stamp = false;
    auto* cmd_grid = app.add_subcommand(
        "grid-robustness", "grid-search robustness experiment");
    cmd_grid->add_option("--config", grid_config,
                         "experiment config JSON (default: desk scale)");
    cmd_grid->add_option("--out", grid_out, "output directory");
    cmd_grid->add_option("--threads", grid_threads,
                         "worker threads (0 = auto)");
    cmd_grid->add_flag("--stamp", grid_stamp,
                       "embed a timestamp in the SVG");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_bc->parsed()) return run_bound_curve(bc);
        if (cmd_sr->parsed()) return run_sgd_cmd(sr);
        if (cmd_audit->parsed())
            return run_suffix_audit(audit_cases, audit_seed, audit_threads,
                                    audit_out);
        if (cmd_adv->parsed()) return run_adversary(adv);
        if (cmd_grid->parsed())
            return run_grid_robustness(grid_config, grid_out, grid_threads,
                                       grid_stamp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
