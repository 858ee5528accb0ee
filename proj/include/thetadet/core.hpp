// Core value types shared by every thetadet module: validated arguments,
// error-bounded results, truncation policies and the error type.
#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace thetadet {

enum class ErrorKind {
    Domain,
    TolUnreachable,
    UnsupportedKind,
    UnsupportedOrder,
    HypothesisFailed,
    BadInterval,
    QuadratureFailure,
    UnknownCurve,
};

inline const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::TolUnreachable: return "TolUnreachable";
    case ErrorKind::UnsupportedKind: return "UnsupportedKind";
    case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorKind::HypothesisFailed: return "HypothesisFailed";
    case ErrorKind::BadInterval: return "BadInterval";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::UnknownCurve: return "UnknownCurve";
    }
    return "Unknown";
}

/// Short %g rendering of a double for messages.
inline std::string number_text(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Every failure raised by the library carries one ErrorKind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Strictly positive, finite real number (theta argument, torus parameter).
class PositiveReal {
public:
    explicit PositiveReal(double v) : value_(v)
    {
        if (!(std::isfinite(v) && v > 0.0)) {
            throw Error(ErrorKind::Domain, "argument must be finite and > 0, got " + number_text(v));
        }
    }

    [[nodiscard]] double value() const noexcept { return value_; }
    [[nodiscard]] PositiveReal reciprocal() const { return PositiveReal(1.0 / value_); }

    friend bool operator==(PositiveReal, PositiveReal) = default;

private:
    double value_;
};

/// A computed scalar with a guaranteed absolute error bound.
struct BoundedValue {
    double value = 0.0;
    double error_bound = 0.0;
    int terms_used = 0;

    [[nodiscard]] bool contains(double exact) const noexcept
    {
        return std::abs(value - exact) <= error_bound;
    }
};

/// How far to sum a series.  The first two fields are the contract; the
/// switches select the evaluation route.
struct TruncationPolicy {
    double target_abs_tol = 1e-13;
    int max_terms = 100000;
    // Evaluate small arguments through the x -> 1/x transformation laws.
    // Turning this off forces the direct series everywhere (used by the
    // identity checks so that both sides are computed independently).
    bool use_duality = true;
    // Run series kernels in ~34 significant digits (oracle generation).
    bool extended_precision = false;

    void validate() const
    {
        if (!(target_abs_tol > 0.0) || !std::isfinite(target_abs_tol)) {
            throw Error(ErrorKind::Domain, "target_abs_tol must be finite and > 0");
        }
        if (max_terms < 1) {
            throw Error(ErrorKind::Domain, "max_terms must be >= 1");
        }
    }

    [[nodiscard]] TruncationPolicy with_tol(double tol) const
    {
        TruncationPolicy p = *this;
        p.target_abs_tol = tol;
        return p;
    }

    [[nodiscard]] TruncationPolicy direct() const
    {
        TruncationPolicy p = *this;
        p.use_duality = false;
        return p;
    }
};

enum class ThetaKind { Theta2, Theta3, Theta4, Theta1Plus };

inline const char* to_string(ThetaKind kind) noexcept
{
    switch (kind) {
    case ThetaKind::Theta2: return "theta2";
    case ThetaKind::Theta3: return "theta3";
    case ThetaKind::Theta4: return "theta4";
    case ThetaKind::Theta1Plus: return "theta1p";
    }
    return "?";
}

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2.0;

namespace detail {

/// Neumaier-compensated sum that also accumulates a first-order rounding
/// budget.  Each add() may declare how many unit roundoffs of relative error
/// the term itself carries.
template <class Real = double>
class CompensatedSum {
public:
    void add(const Real& term, double term_error_units = 1.0)
    {
        const Real t = sum_ + term;
        using std::abs;
        if (abs(sum_) >= abs(term)) {
            comp_ += (sum_ - t) + term;
        } else {
            comp_ += (term - t) + sum_;
        }
        sum_ = t;
        const double mag = static_cast<double>(abs(term));
        abs_sum_ += mag;
        budget_ += mag * term_error_units;
        ++count_;
    }

    [[nodiscard]] Real value() const { return sum_ + comp_; }
    [[nodiscard]] double abs_sum() const noexcept { return abs_sum_; }
    [[nodiscard]] int count() const noexcept { return count_; }

    /// Absolute rounding bound in units of `unit` (the working precision's
    /// unit roundoff).
    [[nodiscard]] double rounding_bound(double unit) const noexcept
    {
        const double n = static_cast<double>(count_);
        return unit * (2.0 * abs_sum_ + budget_) + n * n * unit * unit * abs_sum_;
    }

private:
    Real sum_{0};
    Real comp_{0};
    double abs_sum_ = 0.0;
    double budget_ = 0.0;
    int count_ = 0;
};

/// Bound on sum_{m >= first} m^p r^m for 0 < r < 1 via the ratio test;
/// returns +inf when the ratio bound is not yet below one.
inline double power_geometric_tail(double first, int p, double r)
{
    const double ratio = std::pow((first + 1.0) / first, p) * r;
    if (!(ratio < 1.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return std::pow(first, p) * std::pow(r, first) / (1.0 - ratio);
}

/// Relative perturbation `rel` of a value maps to |exp(rel) - 1|.
inline double rel_to_abs(double value, double rel)
{
    return std::abs(value) * std::expm1(rel);
}

} // namespace detail

} // namespace thetadet
