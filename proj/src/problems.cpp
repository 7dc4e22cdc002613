#include "anneal/problems.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace anneal {
namespace {

double sign_plus(double x) { return x < 0.0 ? -1.0 : 1.0; }

// Numerically stable binary log-loss and its derivative in the margin z.
double logloss(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

std::uint64_t fnv1a(const unsigned char* data, std::size_t n,
                    std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

void read_block(std::ifstream& in, std::vector<double>& v,
                std::uint64_t& hash) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw std::runtime_error("dataset file truncated");
    hash = fnv1a(reinterpret_cast<const unsigned char*>(v.data()),
                 v.size() * sizeof(double), hash);
}

}  // namespace

AbsProblem::AbsProblem(double grad_scale, double diameter, AbsNoise noise)
    : g_(grad_scale), d_(diameter), noise_(noise),
      domain_(Box{{-diameter / 2.0}, {diameter / 2.0}}) {
    if (!(grad_scale > 0.0) || !(diameter > 0.0))
        throw std::invalid_argument(
            "AbsProblem: grad_scale and diameter must be positive");
}

double AbsProblem::declared_grad_bound() const {
    return noise_ == AbsNoise::Rademacher ? std::sqrt(2.0) * g_ : g_;
}

std::pair<double, double> AbsProblem::value_and_subgradient(double x) const {
    return {g_ * std::abs(x), g_ * sign_plus(x)};
}

double AbsProblem::objective(std::span<const double> x) const {
    return g_ * std::abs(x[0]);
}

void AbsProblem::gradient(std::span<const double> x, std::mt19937_64& rng,
                          std::span<double> out) const {
    double g = g_ * sign_plus(x[0]);
    if (noise_ == AbsNoise::Rademacher)
        g += (rng() & 1u) ? g_ : -g_;
    out[0] = g;
}

QuadProblem::QuadProblem(std::vector<double> x_star, double smoothness,
                         double noise_std, double radius)
    : x_star_(std::move(x_star)), beta_(smoothness), sigma_(noise_std),
      domain_(Ball{std::vector<double>(x_star_.size(), 0.0), radius}) {
    if (x_star_.empty())
        throw std::invalid_argument("QuadProblem: empty minimizer");
    if (!(beta_ > 0.0) || sigma_ < 0.0 || !(radius > 0.0))
        throw std::invalid_argument("QuadProblem: bad scales");
    double norm2 = 0.0;
    for (double c : x_star_) norm2 += c * c;
    if (std::sqrt(norm2) > radius)
        throw std::invalid_argument(
            "QuadProblem: minimizer must lie inside the domain");
}

double QuadProblem::objective(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x_star_.size(); ++i) {
        double d = x[i] - x_star_[i];
        s += d * d;
    }
    return 0.5 * beta_ * s;
}

void QuadProblem::gradient(std::span<const double> x, std::mt19937_64& rng,
                           std::span<double> out) const {
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < x_star_.size(); ++i) {
        out[i] = beta_ * (x[i] - x_star_[i]);
        if (sigma_ > 0.0) out[i] += sigma_ * noise(rng);
    }
}

LogRegProblem LogRegProblem::generate(const LogRegConfig& config) {
    if (config.train_n < 1 || config.test_n < 0 || config.dim < 1)
        throw std::invalid_argument("LogRegConfig: bad shape");
    if (!(config.flip_prob >= 0.0 && config.flip_prob < 0.5))
        throw std::invalid_argument(
            "LogRegConfig: flip_prob must lie in [0, 0.5)");
    if (config.batch < 1 || config.batch > config.train_n)
        throw std::invalid_argument(
            "LogRegConfig: batch must lie in [1, train_n]");
    if (!(config.radius > 0.0))
        throw std::invalid_argument("LogRegConfig: radius must be positive");

    LogRegProblem prob;
    prob.config_ = config;
    prob.domain_ =
        Ball{std::vector<double>(config.dim, 0.0), config.radius};

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<double> w_star(config.dim);
    for (auto& c : w_star) c = normal(rng);

    auto fill = [&](std::vector<double>& xs, std::vector<double>& ys,
                    long n) {
        xs.resize(std::size_t(n) * config.dim);
        ys.resize(n);
        for (long i = 0; i < n; ++i) {
            double z = 0.0;
            for (int j = 0; j < config.dim; ++j) {
                double v = normal(rng);
                xs[std::size_t(i) * config.dim + j] = v;
                z += v * w_star[j];
            }
            double y = unit(rng) < sigmoid(z) ? 1.0 : 0.0;
            if (unit(rng) < config.flip_prob) y = 1.0 - y;
            ys[i] = y;
        }
    };
    fill(prob.train_x_, prob.train_y_, config.train_n);
    fill(prob.test_x_, prob.test_y_, config.test_n);
    return prob;
}

std::size_t LogRegProblem::dim() const {
    return static_cast<std::size_t>(config_.dim);
}

namespace {

double mean_logloss(std::span<const double> w, const std::vector<double>& xs,
                    const std::vector<double>& ys, int dim) {
    if (ys.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        double z = 0.0;
        for (int j = 0; j < dim; ++j) z += xs[i * dim + j] * w[j];
        total += logloss(z, ys[i]);
    }
    return total / double(ys.size());
}

}  // namespace

double LogRegProblem::train_loss(std::span<const double> w) const {
    return mean_logloss(w, train_x_, train_y_, config_.dim);
}

double LogRegProblem::test_loss(std::span<const double> w) const {
    return mean_logloss(w, test_x_, test_y_, config_.dim);
}

double LogRegProblem::objective(std::span<const double> w) const {
    return train_loss(w);
}

void LogRegProblem::gradient(std::span<const double> w, std::mt19937_64& rng,
                             std::span<double> out) const {
    std::uniform_int_distribution<long> pick(0, config_.train_n - 1);
    std::fill(out.begin(), out.end(), 0.0);
    double scale = 1.0 / double(config_.batch);
    for (long b = 0; b < config_.batch; ++b) {
        std::size_t i = static_cast<std::size_t>(pick(rng));
        double z = 0.0;
        for (int j = 0; j < config_.dim; ++j)
            z += train_x_[i * config_.dim + j] * w[j];
        double r = sigmoid(z) - train_y_[i];
        for (int j = 0; j < config_.dim; ++j)
            out[j] += scale * r * train_x_[i * config_.dim + j];
    }
}

void LogRegProblem::save(const std::filesystem::path& file) const {
    const std::vector<double>* blocks[] = {&train_x_, &train_y_, &test_x_,
                                           &test_y_};
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const auto* b : blocks)
        hash = fnv1a(reinterpret_cast<const unsigned char*>(b->data()),
                     b->size() * sizeof(double), hash);

    nlohmann::json header{{"format", "anneal-logreg"},
                          {"version", 1},
                          {"n", config_.train_n},
                          {"test_n", config_.test_n},
                          {"dim", config_.dim},
                          {"flip", config_.flip_prob},
                          {"seed", config_.seed},
                          {"batch", config_.batch},
                          {"radius", config_.radius},
                          {"checksum", hash}};
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + file.string() +
                                 " for writing");
    out << header.dump() << '\n';
    for (const auto* b : blocks)
        out.write(reinterpret_cast<const char*>(b->data()),
                  static_cast<std::streamsize>(b->size() * sizeof(double)));
    if (!out) throw std::runtime_error("failed writing " + file.string());
}

LogRegProblem LogRegProblem::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("missing dataset header");
    nlohmann::json header = nlohmann::json::parse(line);
    if (header.value("format", "") != "anneal-logreg" ||
        header.value("version", 0) != 1)
        throw std::runtime_error("unrecognized dataset header");

    LogRegProblem prob;
    prob.config_.train_n = header.at("n").get<long>();
    prob.config_.test_n = header.at("test_n").get<long>();
    prob.config_.dim = header.at("dim").get<int>();
    prob.config_.flip_prob = header.at("flip").get<double>();
    prob.config_.seed = header.at("seed").get<std::uint64_t>();
    prob.config_.batch = header.at("batch").get<long>();
    prob.config_.radius = header.at("radius").get<double>();
    prob.domain_ = Ball{std::vector<double>(prob.config_.dim, 0.0),
                        prob.config_.radius};

    auto n = std::size_t(prob.config_.train_n);
    auto m = std::size_t(prob.config_.test_n);
    auto d = std::size_t(prob.config_.dim);
    prob.train_x_.resize(n * d);
    prob.train_y_.resize(n);
    prob.test_x_.resize(m * d);
    prob.test_y_.resize(m);

    std::uint64_t hash = 0xcbf29ce484222325ULL;
    read_block(in, prob.train_x_, hash);
    read_block(in, prob.train_y_, hash);
    read_block(in, prob.test_x_, hash);
    read_block(in, prob.test_y_, hash);
    if (hash != header.at("checksum").get<std::uint64_t>())
        throw std::runtime_error("dataset checksum mismatch in " +
                                 file.string());
    return prob;
}

FixedStepAdversaryReport fixed_step_adversary(double diameter,
                                              double grad_scale, long steps,
                                              double rho,
                                              std::span<const double> weights) {
    if (!(diameter > 0.0) || !(grad_scale > 0.0) || steps < 2)
        throw std::invalid_argument(
            "fixed_step_adversary: need D > 0, G > 0, T >= 2");
    double hi = std::sqrt(double(steps)) / 2.0;
    if (!(rho > 1.0 && rho < hi))
        throw std::invalid_argument(
            "fixed_step_adversary: rho must lie in (1, sqrt(T)/2) = (1, " +
            std::to_string(hi) + ")");
    if (!weights.empty() && static_cast<long>(weights.size()) != steps)
        throw std::invalid_argument(
            "fixed_step_adversary: weights must have one entry per step");

    FixedStepAdversaryReport rep;
    rep.eta = rho * diameter / (grad_scale * std::sqrt(double(steps)));
    double lim = diameter / 2.0;
    double x = 0.75 * rep.eta * grad_scale;
    double odd_mass = 0.0, total_mass = 0.0, avg = 0.0;
    rep.iterates.reserve(steps);
    rep.alternation_ok = true;
    const double tol = 1e-12 * rep.eta * grad_scale;

    for (long t = 1; t <= steps; ++t) {
        rep.iterates.push_back(x);
        double expect = (t % 2 == 1 ? 0.75 : -0.25) * rep.eta * grad_scale;
        if (std::abs(x - expect) > tol) rep.alternation_ok = false;
        double w = weights.empty() ? 1.0 : weights[t - 1];
        if (w < 0.0)
            throw std::invalid_argument(
                "fixed_step_adversary: weights must be nonnegative");
        avg += w * x;
        total_mass += w;
        if (t % 2 == 1) odd_mass += w;
        double g = grad_scale * sign_plus(x);
        x = std::clamp(x - rep.eta * g, -lim, lim);
    }
    if (!(total_mass > 0.0))
        throw std::invalid_argument("fixed_step_adversary: zero weight mass");
    if (odd_mass < 0.5 * total_mass - 1e-12 * total_mass)
        throw std::invalid_argument(
            "fixed_step_adversary: odd-step weight mass must be >= "
            "even-step mass");

    rep.average_iterate = avg / total_mass;
    rep.average_suboptimality = grad_scale * std::abs(rep.average_iterate);
    rep.lower_bound = rep.eta * grad_scale * grad_scale / 4.0;
    rep.bound_satisfied =
        rep.average_suboptimality >= rep.lower_bound - 1e-12 * rep.lower_bound;
    return rep;
}

InvSqrtAdversaryReport invsqrt_adversary(double diameter, double grad_scale,
                                         long steps, double rho) {
    if (!(diameter > 0.0) || !(grad_scale > 0.0) || steps < 2)
        throw std::invalid_argument(
            "invsqrt_adversary: need D > 0, G > 0, T >= 2");
    double hi = std::sqrt(double(steps) / 16.0);
    if (!(rho > 1.0 && rho < hi))
        throw std::invalid_argument(
            "invsqrt_adversary: rho must lie in (1, sqrt(T/16)) = (1, " +
            std::to_string(hi) + ")");

    InvSqrtAdversaryReport rep;
    rep.t0 = static_cast<long>(std::ceil(4.0 * rho * rho));
    double lim = diameter / 2.0;
    double x = lim;
    double value_sum = 0.0;
    rep.iterates.reserve(steps);
    rep.triangle_ok = true;
    rep.projection_inactive = true;
    const double tol = 1e-12 * diameter;

    for (long t = 1; t <= steps; ++t) {
        rep.iterates.push_back(x);
        value_sum += grad_scale * std::abs(x);
        double eta = rho * diameter / (grad_scale * std::sqrt(double(t)));
        double raw = x - eta * grad_scale * sign_plus(x);
        if (t >= rep.t0 && std::abs(raw) > lim + tol)
            rep.projection_inactive = false;
        double next = std::clamp(raw, -lim, lim);
        if (t >= rep.t0 && t < steps &&
            std::abs(x) + std::abs(next) < eta * grad_scale - tol)
            rep.triangle_ok = false;
        x = next;
    }

    rep.average_suboptimality = value_sum / double(steps);
    rep.lower_bound = rho * diameter * grad_scale *
                      (std::sqrt(double(steps)) - std::sqrt(double(rep.t0))) /
                      double(steps);
    rep.bound_satisfied = rep.average_suboptimality >=
                          rep.lower_bound - 1e-12 * std::abs(rep.lower_bound);
    return rep;
}

}  // namespace anneal
