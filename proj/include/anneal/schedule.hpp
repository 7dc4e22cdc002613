#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anneal {

// Raised when a tail quantity does not exist for the given schedule (the
// constant schedule has a divergent second tail integral).
struct DivergentTailError : std::domain_error {
    using std::domain_error::domain_error;
};

// Raised for operations a schedule kind does not support, e.g. asking the
// per-step inverse-sqrt rule for a continuous profile.
struct UnsupportedScheduleError : std::logic_error {
    using std::logic_error::logic_error;
};

enum class ScheduleKind { Constant, Cosine, PolynomialDecay, InverseSqrtDiscrete };

// A stepsize profile h on [0, 1], normalised so h(0) = 1 for the continuous
// kinds. PolynomialDecay is h(u) = (1-u)^p with p >= 1; Cosine is
// h(u) = (1 + cos(pi u)) / 2. InverseSqrtDiscrete is the per-step rule
// eta / sqrt(t) and has no continuous profile, so value()/derivative()
// throw UnsupportedScheduleError for it.
class Schedule {
  public:
    static Schedule constant();
    static Schedule cosine();
    static Schedule polynomial(double p);
    static Schedule inverse_sqrt();

    // Accepts "constant", "cosine", "poly:<p>", "invsqrt" (case-insensitive).
    static Schedule parse(std::string_view text);

    ScheduleKind kind() const { return kind_; }
    std::string name() const;

    // h(u); domain errors outside [0, 1].
    double value(double u) const;
    // h'(u); the same domain rules as value().
    double derivative(double u) const;

    // True when h decreases to h(1) = 0.
    bool annealed() const;
    // True when h'(u) exists everywhere on [0, 1].
    bool differentiable() const;
    // A Lipschitz constant for h on [0, 1]: p for polynomial decay, pi/2 for
    // cosine, 0 for constant.
    double lipschitz() const;
    // Order of vanishing of h at u = 1 (p for polynomial decay, 2 for
    // cosine); throws UnsupportedScheduleError for the other kinds.
    double decay_degree() const;

    double polynomial_power() const;

    bool operator==(const Schedule& other) const {
        return kind_ == other.kind_ && power_ == other.power_;
    }

  private:
    Schedule(ScheduleKind kind, double power) : kind_(kind), power_(power) {}
    ScheduleKind kind_;
    double power_;
};

enum class TailMode { Analytic, Quadrature };

// Tail functionals of a continuous schedule:
//
//   tail_mass(v)     = integral of h(u)            over u in [v, 1]
//   tail_integral(v) = integral of h(u)^2 / tail_mass(u) over u in [v, 1]
//
// Analytic mode uses closed forms where they exist (cosine tail_integral has
// none and always goes through quadrature); Quadrature mode forces numeric
// integration for both, which the tests use to cross-check the closed forms.
// Instances are immutable after construction and safe to share across
// threads. Constant schedules have a divergent tail_integral and throw
// DivergentTailError from it; InverseSqrtDiscrete is rejected outright.
class TailFunctions {
  public:
    explicit TailFunctions(const Schedule& schedule,
                           TailMode mode = TailMode::Analytic,
                           double tol = 1e-10);

    const Schedule& schedule() const { return schedule_; }
    TailMode mode() const { return mode_; }

    double tail_mass(double v) const;
    double tail_integral(double v) const;
    // Signed integral of h^2 / tail_mass over [a, b]; negative when a > b.
    double tail_integral_between(double a, double b) const;

    bool integral_diverges() const;

    // Cached values at v = 0.
    double mass_at_zero() const { return mass_zero_; }
    double integral_at_zero() const;

  private:
    double integrand(double u) const;
    Schedule schedule_;
    TailMode mode_;
    double tol_;
    double mass_zero_;
    double integral_zero_;
};

}  // namespace anneal
