#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "anneal/sgd.hpp"

namespace anneal {

enum class AbsNoise { None, Rademacher };

// One-dimensional f(x) = G |x| on the box [-D/2, D/2]. The stochastic oracle
// returns G sign(x) (sign(0) = +1), plus an additive G-scaled Rademacher
// term when noise is enabled.
class AbsProblem : public StochasticProblem {
  public:
    AbsProblem(double grad_scale, double diameter,
               AbsNoise noise = AbsNoise::None);

    double grad_scale() const { return g_; }
    double diameter() const { return d_; }
    AbsNoise noise() const { return noise_; }
    // Second-moment constant for stepsize tuning: G without noise,
    // sqrt(2) G with the Rademacher term.
    double declared_grad_bound() const;

    // Deterministic part of the oracle: (G |x|, G sign(x)).
    std::pair<double, double> value_and_subgradient(double x) const;

    std::size_t dim() const override { return 1; }
    const Domain& domain() const override { return domain_; }
    double objective(std::span<const double> x) const override;
    void gradient(std::span<const double> x, std::mt19937_64& rng,
                  std::span<double> out) const override;

  private:
    double g_, d_;
    AbsNoise noise_;
    Domain domain_;
};

// f(x) = (beta/2) |x - x*|^2 on a centred ball; the oracle adds
// N(0, sigma^2 I) noise to the exact gradient.
class QuadProblem : public StochasticProblem {
  public:
    QuadProblem(std::vector<double> x_star, double smoothness,
                double noise_std, double radius);

    double smoothness() const { return beta_; }
    double noise_std() const { return sigma_; }
    const std::vector<double>& minimizer() const { return x_star_; }

    std::size_t dim() const override { return x_star_.size(); }
    const Domain& domain() const override { return domain_; }
    double objective(std::span<const double> x) const override;
    void gradient(std::span<const double> x, std::mt19937_64& rng,
                  std::span<double> out) const override;

  private:
    std::vector<double> x_star_;
    double beta_, sigma_;
    Domain domain_;
};

struct LogRegConfig {
    long train_n = 10000;
    long test_n = 2000;
    int dim = 20;
    double flip_prob = 0.1;
    std::uint64_t seed = 1;
    long batch = 1000;
    double radius = 100.0;
};

// Synthetic binary logistic regression. Features are standard normal, labels
// are drawn from the logistic model at a hidden parameter vector and then
// flipped with probability flip_prob; train and test splits share the hidden
// parameter. The oracle averages the log-loss gradient over `batch` examples
// sampled uniformly with replacement.
class LogRegProblem : public StochasticProblem {
  public:
    static LogRegProblem generate(const LogRegConfig& config);

    const LogRegConfig& config() const { return config_; }
    double train_loss(std::span<const double> w) const;
    double test_loss(std::span<const double> w) const;

    std::size_t dim() const override;
    const Domain& domain() const override { return domain_; }
    double objective(std::span<const double> w) const override;
    void gradient(std::span<const double> w, std::mt19937_64& rng,
                  std::span<double> out) const override;

    // Flat binary snapshot with a one-line JSON header carrying the shape,
    // generation parameters and an FNV-1a checksum of the payload, so an
    // experiment can be replayed without regenerating the data.
    void save(const std::filesystem::path& file) const;
    static LogRegProblem load(const std::filesystem::path& file);

  private:
    LogRegProblem() = default;
    LogRegConfig config_;
    std::vector<double> train_x_, train_y_, test_x_, test_y_;
    Domain domain_;
};

// Deterministic run of subgradient descent on G |x| with the constant
// stepsize rho * D / (G sqrt(T)): the iterates alternate between
// 3/4 eta G and -1/4 eta G, so any averaged iterate whose odd-step mass is
// at least its even-step mass stays eta G^2 / 4 suboptimal.
struct FixedStepAdversaryReport {
    double eta = 0.0;
    std::vector<double> iterates;
    double average_iterate = 0.0;
    double average_suboptimality = 0.0;
    double lower_bound = 0.0;
    bool alternation_ok = false;
    bool bound_satisfied = false;
};

// weights: optional averaging weights over steps 1..T (uniform when empty);
// must be nonnegative with odd-index mass >= even-index mass.
FixedStepAdversaryReport fixed_step_adversary(
    double diameter, double grad_scale, long steps, double rho,
    std::span<const double> weights = {});

// Deterministic run on G |x| with stepsizes rho * D / (G sqrt(t)) from
// x_1 = D/2: once t exceeds ceil(4 rho^2) the iterates straddle the optimum,
// keeping the running average of f at least rho D G (sqrt(T) - sqrt(T0)) / T.
struct InvSqrtAdversaryReport {
    long t0 = 0;
    std::vector<double> iterates;
    double average_suboptimality = 0.0;
    double lower_bound = 0.0;
    bool triangle_ok = false;
    bool projection_inactive = false;
    bool bound_satisfied = false;
};

InvSqrtAdversaryReport invsqrt_adversary(double diameter, double grad_scale,
                                         long steps, double rho);

}  // namespace anneal
