#include "anneal/schedule.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "anneal/numerics.hpp"

namespace anneal {
namespace {

constexpr double kPi = 3.14159265358979323846;

void check_unit_interval(double u, const char* who) {
    if (!(u >= 0.0 && u <= 1.0))
        throw std::domain_error(std::string(who) +
                                ": argument must lie in [0, 1]");
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

// 1 - u - sin(pi (1-u)) / pi, i.e. twice the cosine tail mass. The direct
// expression cancels catastrophically near u = 1, so switch to the series
// w - sin(pi w)/pi = (pi w)^3 / (6 pi) - (pi w)^5 / (120 pi) + ... there.
double cosine_tail_mass_twice(double u) {
    double w = 1.0 - u;
    if (w > 1e-2) return w - std::sin(kPi * w) / kPi;
    double z = kPi * w;
    double z2 = z * z;
    return z / kPi * z2 * (1.0 / 6.0 - z2 / 120.0 + z2 * z2 / 5040.0);
}

}  // namespace

Schedule Schedule::constant() { return {ScheduleKind::Constant, 0.0}; }
Schedule Schedule::cosine() { return {ScheduleKind::Cosine, 0.0}; }

Schedule Schedule::polynomial(double p) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw std::invalid_argument(
            "Schedule::polynomial: power must satisfy p >= 1");
    return {ScheduleKind::PolynomialDecay, p};
}

Schedule Schedule::inverse_sqrt() {
    return {ScheduleKind::InverseSqrtDiscrete, 0.0};
}

Schedule Schedule::parse(std::string_view text) {
    std::string s = lowercase(text);
    if (s == "constant" || s == "const") return constant();
    if (s == "cosine" || s == "cos") return cosine();
    if (s == "invsqrt") return inverse_sqrt();
    if (s.rfind("poly:", 0) == 0) {
        std::string arg = s.substr(5);
        try {
            size_t pos = 0;
            double p = std::stod(arg, &pos);
            if (pos != arg.size()) throw std::invalid_argument("trailing");
            return polynomial(p);
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("Schedule::parse: bad power in '" +
                                        std::string(text) + "'");
        }
    }
    throw std::invalid_argument("Schedule::parse: unknown schedule '" +
                                std::string(text) + "'");
}

std::string Schedule::name() const {
    switch (kind_) {
        case ScheduleKind::Constant: return "constant";
        case ScheduleKind::Cosine: return "cosine";
        case ScheduleKind::InverseSqrtDiscrete: return "invsqrt";
        case ScheduleKind::PolynomialDecay: {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "poly:%g", power_);
            return buf;
        }
    }
    return "?";
}

double Schedule::value(double u) const {
    check_unit_interval(u, "Schedule::value");
    switch (kind_) {
        case ScheduleKind::Constant: return 1.0;
        case ScheduleKind::Cosine: {
            // (1 + cos(pi u)) / 2 written as sin^2 for accuracy near u = 1.
            double s = std::sin(0.5 * kPi * (1.0 - u));
            return s * s;
        }
        case ScheduleKind::PolynomialDecay:
            return std::pow(1.0 - u, power_);
        case ScheduleKind::InverseSqrtDiscrete:
            throw UnsupportedScheduleError(
                "inverse-sqrt schedule has no continuous profile");
    }
    return 0.0;
}

double Schedule::derivative(double u) const {
    check_unit_interval(u, "Schedule::derivative");
    switch (kind_) {
        case ScheduleKind::Constant: return 0.0;
        case ScheduleKind::Cosine:
            // sin(pi u) = sin(pi (1-u)); evaluate at the smaller argument.
            return -0.5 * kPi * std::sin(kPi * std::min(u, 1.0 - u));
        case ScheduleKind::PolynomialDecay:
            if (power_ == 1.0) return -1.0;
            return -power_ * std::pow(1.0 - u, power_ - 1.0);
        case ScheduleKind::InverseSqrtDiscrete:
            throw UnsupportedScheduleError(
                "inverse-sqrt schedule has no continuous profile");
    }
    return 0.0;
}

bool Schedule::annealed() const {
    return kind_ == ScheduleKind::Cosine ||
           kind_ == ScheduleKind::PolynomialDecay;
}

bool Schedule::differentiable() const {
    return kind_ != ScheduleKind::InverseSqrtDiscrete;
}

double Schedule::lipschitz() const {
    switch (kind_) {
        case ScheduleKind::Constant: return 0.0;
        case ScheduleKind::Cosine: return 0.5 * kPi;
        case ScheduleKind::PolynomialDecay: return power_;
        case ScheduleKind::InverseSqrtDiscrete:
            throw UnsupportedScheduleError(
                "inverse-sqrt schedule has no continuous profile");
    }
    return 0.0;
}

double Schedule::decay_degree() const {
    switch (kind_) {
        case ScheduleKind::Cosine: return 2.0;
        case ScheduleKind::PolynomialDecay: return power_;
        default:
            throw UnsupportedScheduleError(
                "decay_degree: schedule does not vanish polynomially at 1");
    }
}

double Schedule::polynomial_power() const {
    if (kind_ != ScheduleKind::PolynomialDecay)
        throw UnsupportedScheduleError(
            "polynomial_power: not a polynomial-decay schedule");
    return power_;
}

TailFunctions::TailFunctions(const Schedule& schedule, TailMode mode,
                             double tol)
    : schedule_(schedule),
      mode_(mode),
      tol_(tol),
      mass_zero_(0.0),
      integral_zero_(std::numeric_limits<double>::quiet_NaN()) {
    if (schedule.kind() == ScheduleKind::InverseSqrtDiscrete)
        throw std::invalid_argument(
            "TailFunctions: inverse-sqrt schedule has no continuous tails");
    if (!(tol > 0.0))
        throw std::invalid_argument("TailFunctions: tol must be positive");
    mass_zero_ = tail_mass(0.0);
    if (!integral_diverges()) integral_zero_ = tail_integral(0.0);
}

bool TailFunctions::integral_diverges() const {
    return schedule_.kind() == ScheduleKind::Constant;
}

double TailFunctions::integral_at_zero() const {
    if (integral_diverges())
        throw DivergentTailError(
            "tail_integral diverges for the constant schedule");
    return integral_zero_;
}

double TailFunctions::tail_mass(double v) const {
    check_unit_interval(v, "TailFunctions::tail_mass");
    if (mode_ == TailMode::Quadrature) {
        auto r = integrate([this](double u) { return schedule_.value(u); }, v,
                           1.0, tol_);
        return r.value;
    }
    switch (schedule_.kind()) {
        case ScheduleKind::Constant: return 1.0 - v;
        case ScheduleKind::Cosine: return 0.5 * cosine_tail_mass_twice(v);
        case ScheduleKind::PolynomialDecay: {
            double p = schedule_.polynomial_power();
            return std::pow(1.0 - v, p + 1.0) / (p + 1.0);
        }
        default: return 0.0;
    }
}

// h(u)^2 / tail_mass(u). The closed-form tail mass is used inside the ratio
// in both modes; Quadrature mode only changes how the outer integral and
// tail_mass(v) itself are computed.
double TailFunctions::integrand(double u) const {
    double h = schedule_.value(u);
    double mass;
    switch (schedule_.kind()) {
        case ScheduleKind::Constant: mass = 1.0 - u; break;
        case ScheduleKind::Cosine: mass = 0.5 * cosine_tail_mass_twice(u); break;
        default: {
            double p = schedule_.polynomial_power();
            mass = std::pow(1.0 - u, p + 1.0) / (p + 1.0);
        }
    }
    if (mass <= 0.0) return 0.0;
    return h * h / mass;
}

double TailFunctions::tail_integral(double v) const {
    check_unit_interval(v, "TailFunctions::tail_integral");
    if (integral_diverges())
        throw DivergentTailError(
            "tail_integral diverges for the constant schedule");
    if (v == 1.0) return 0.0;
    if (mode_ == TailMode::Analytic &&
        schedule_.kind() == ScheduleKind::PolynomialDecay) {
        double p = schedule_.polynomial_power();
        return (p + 1.0) / p * std::pow(1.0 - v, p);
    }
    // The integrand stays bounded (2p * tail_mass >= h^2), so cutting the
    // upper limit at 1 - eps discards at most 2p * eps.
    const double eps = 1e-12;
    if (v >= 1.0 - eps) return 0.0;
    auto r = integrate([this](double u) { return integrand(u); }, v,
                       1.0 - eps, tol_);
    return r.value;
}

double TailFunctions::tail_integral_between(double a, double b) const {
    check_unit_interval(a, "TailFunctions::tail_integral_between");
    check_unit_interval(b, "TailFunctions::tail_integral_between");
    if (integral_diverges())
        throw DivergentTailError(
            "tail_integral diverges for the constant schedule");
    if (a == b) return 0.0;
    if (a > b) return -tail_integral_between(b, a);
    return tail_integral(a) - tail_integral(b);
}

}  // namespace anneal
