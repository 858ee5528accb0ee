// Jacobi theta functions on the positive real axis.
//
// For x > 0 and k running over the positive integers:
//
//   theta2(x)  = 2 SUM exp(-pi (k - 1/2)^2 x)
//   theta3(x)  = 1 + 2 SUM exp(-pi k^2 x)
//   theta4(x)  = 1 + 2 SUM (-1)^k exp(-pi k^2 x)
//   theta1+(x) = 2 SUM (-1)^(k-1) (2k - 1) exp(-pi (k - 1/2)^2 x)
//
// theta1+ is the z-derivative of the first theta function at z = 0, which
// equals theta2 theta3 theta4.  Every evaluation returns a BoundedValue whose
// error_bound covers the analytic tail of the truncated series plus a
// first-order model of the floating point rounding.
//
// Arguments below 1 are mapped to 1/x through
//
//   sqrt(x) theta3(x) = theta3(1/x),  sqrt(x) theta2(x) = theta4(1/x),
//   sqrt(x) theta4(x) = theta2(1/x),  x^(3/2) theta1+(x) = theta1+(1/x),
//
// unless TruncationPolicy::use_duality is false.  The infinite product
// representations are provided as an independent evaluation route.
#pragma once

#include "thetadet/core.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

namespace thetadet {

namespace detail {

using ExtendedReal = boost::multiprecision::cpp_bin_float_quad;
inline const double kExtendedUnitRoundoff = std::ldexp(1.0, -113);

inline bool half_integer_kind(ThetaKind kind) noexcept
{
    return kind == ThetaKind::Theta2 || kind == ThetaKind::Theta1Plus;
}

inline double theta_constant(ThetaKind kind) noexcept
{
    return (kind == ThetaKind::Theta3 || kind == ThetaKind::Theta4) ? 1.0 : 0.0;
}

/// Partner kind and weight exponent of the x -> 1/x law:
/// x^r theta_kind(x) = theta_partner(1/x).
struct DualityLaw {
    ThetaKind partner;
    double r;
};

inline DualityLaw duality_law(ThetaKind kind) noexcept
{
    switch (kind) {
    case ThetaKind::Theta2: return {ThetaKind::Theta4, 0.5};
    case ThetaKind::Theta3: return {ThetaKind::Theta3, 0.5};
    case ThetaKind::Theta4: return {ThetaKind::Theta2, 0.5};
    case ThetaKind::Theta1Plus: return {ThetaKind::Theta1Plus, 1.5};
    }
    return {kind, 0.5};
}

/// Tail of the series after the first `terms` non-constant terms.
inline double theta_tail_bound(ThetaKind kind, double x, int terms)
{
    const double K = static_cast<double>(terms);
    if (kind == ThetaKind::Theta1Plus) {
        const double m = K + 0.5;
        const double first = 2.0 * (2.0 * K + 1.0) * std::exp(-kPi * m * m * x);
        const double ratio = (2.0 * K + 3.0) / (2.0 * K + 1.0) * std::exp(-2.0 * kPi * (K + 1.0) * x);
        if (!(ratio < 1.0)) {
            return std::numeric_limits<double>::infinity();
        }
        return first / (1.0 - ratio);
    }
    const double m = half_integer_kind(kind) ? K + 0.5 : K + 1.0;
    return 2.0 * std::exp(-kPi * m * m * x) / (-std::expm1(-kPi * (2.0 * m + 1.0) * x));
}

/// Non-constant part of a theta series summed directly at x.
struct SeriesParts {
    double constant = 0.0;
    double partial = 0.0;
    double error = 0.0;  // tail + rounding of `partial`
    int terms = 0;
    bool reached = false;
};

/// `arg_units` is the relative error (in unit roundoffs) already present in x.
template <class Real>
SeriesParts theta_series_direct(ThetaKind kind, double x, double tol, int max_terms, double arg_units)
{
    using std::exp;
    const Real pi = boost::math::constants::pi<Real>();
    const Real xr = x;
    const double unit = std::is_same_v<Real, double> ? kUnitRoundoff : kExtendedUnitRoundoff;

    CompensatedSum<Real> sum;
    double tail = std::numeric_limits<double>::infinity();
    int k = 1;
    for (; k <= max_terms; ++k) {
        const Real m = half_integer_kind(kind) ? Real(k) - Real(0.5) : Real(k);
        const Real arg = pi * m * m * xr;
        Real weight = 2;
        if (kind == ThetaKind::Theta4 && (k % 2 == 1)) {
            weight = -2;
        } else if (kind == ThetaKind::Theta1Plus) {
            weight = Real((k % 2 == 1) ? 2 : -2) * Real(2 * k - 1);
        }
        const double a = static_cast<double>(arg);
        sum.add(weight * exp(-arg), 3.0 + (3.0 + arg_units) * a);
        tail = theta_tail_bound(kind, x, k);
        if (tail <= 0.5 * tol) {
            break;
        }
    }
    SeriesParts out;
    out.constant = theta_constant(kind);
    out.terms = std::min(k, max_terms);
    out.reached = tail <= 0.5 * tol;
    const Real total = sum.value();
    out.partial = static_cast<double>(total);
    out.error = tail + sum.rounding_bound(unit);
    if constexpr (!std::is_same_v<Real, double>) {
        out.error += kUnitRoundoff * std::abs(out.partial);
    }
    return out;
}

inline SeriesParts theta_series_direct(ThetaKind kind, double x, const TruncationPolicy& policy, double tol,
                                       double arg_units)
{
    if (policy.extended_precision) {
        return theta_series_direct<ExtendedReal>(kind, x, tol, policy.max_terms, arg_units);
    }
    return theta_series_direct<double>(kind, x, tol, policy.max_terms, arg_units);
}

/// theta_kind(x) = scale * (constant + partial), with `partial` evaluated at
/// `x` itself or at 1/x.
struct ThetaEval {
    ThetaKind kind;
    double scale = 1.0;
    double log_scale = 0.0;
    SeriesParts parts;

    [[nodiscard]] double value() const { return scale * (parts.constant + parts.partial); }

    [[nodiscard]] double error() const
    {
        return scale * parts.error + 4.0 * kUnitRoundoff * std::abs(value());
    }
};

inline ThetaEval theta_eval(ThetaKind kind, PositiveReal xp, const TruncationPolicy& policy)
{
    policy.validate();
    const double x = xp.value();
    ThetaEval ev{kind, 1.0, 0.0, {}};
    if (policy.use_duality && x < 1.0) {
        const DualityLaw law = duality_law(kind);
        ev.log_scale = -law.r * std::log(x);
        ev.scale = std::exp(ev.log_scale);
        const double tol = policy.target_abs_tol / ev.scale;
        ev.parts = theta_series_direct(law.partner, 1.0 / x, policy, tol, 1.0);
    } else {
        ev.parts = theta_series_direct(kind, x, policy, policy.target_abs_tol, 0.0);
    }
    if (!ev.parts.reached) {
        throw Error(ErrorKind::TolUnreachable, std::string(to_string(kind)) + " series: max_terms=" +
                                                   std::to_string(policy.max_terms) + " cannot reach tol " +
                                                   number_text(policy.target_abs_tol));
    }
    return ev;
}

inline void require_within(const BoundedValue& v, const TruncationPolicy& policy, const char* what)
{
    if (!(v.error_bound <= policy.target_abs_tol)) {
        throw Error(ErrorKind::TolUnreachable, std::string(what) + ": achievable error bound " +
                                                   number_text(v.error_bound) + " exceeds tol " +
                                                   number_text(policy.target_abs_tol));
    }
}

} // namespace detail

/// Series evaluation of theta_kind(x).
inline BoundedValue theta_series(ThetaKind kind, PositiveReal x, const TruncationPolicy& policy = {})
{
    const detail::ThetaEval ev = detail::theta_eval(kind, x, policy);
    BoundedValue out{ev.value(), ev.error(), ev.parts.terms};
    detail::require_within(out, policy, "theta_series");
    return out;
}

/// theta_kind(x) - 1 for theta3/theta4 without cancellation at large x.
inline BoundedValue theta_minus_one(ThetaKind kind, PositiveReal x, const TruncationPolicy& policy = {})
{
    if (kind != ThetaKind::Theta3 && kind != ThetaKind::Theta4) {
        throw Error(ErrorKind::UnsupportedKind, "theta_minus_one needs theta3 or theta4");
    }
    const detail::ThetaEval ev = detail::theta_eval(kind, x, policy);
    double value = 0.0;
    if (ev.scale == 1.0) {
        value = ev.parts.partial;
    } else {
        // The transformed partner may be theta2, whose constant term is 0.
        value = (ev.scale * ev.parts.constant - 1.0) + ev.scale * ev.parts.partial;
    }
    const double err = ev.scale * ev.parts.error + 4.0 * kUnitRoundoff * (std::abs(value) + ev.scale);
    return {value, err, ev.parts.terms};
}

/// log theta_kind(x); uses log1p on the series part when the constant term is 1.
/// The truncation target is tightened by theta itself, so target_abs_tol
/// bounds the error of the logarithm even where theta is small.
inline BoundedValue log_theta(ThetaKind kind, PositiveReal x, const TruncationPolicy& policy = {})
{
    detail::ThetaEval ev = detail::theta_eval(kind, x, policy);
    for (int pass = 0; pass < 4; ++pass) {
        const double base = ev.parts.constant + ev.parts.partial;
        if (!(ev.parts.error > 0.5 * policy.target_abs_tol * std::abs(base)) || !(base > 0.0)) {
            break;
        }
        ev = detail::theta_eval(kind, x, policy.with_tol(0.5 * policy.target_abs_tol * base * ev.scale));
    }
    const double base = ev.parts.constant + ev.parts.partial;
    const double log_base = ev.parts.constant == 1.0 ? std::log1p(ev.parts.partial) : std::log(base);
    const double rel = ev.parts.error / (std::abs(base) - ev.parts.error);
    if (!(rel >= 0.0) || !(rel < 1.0)) {
        throw Error(ErrorKind::TolUnreachable, "log_theta: error bound swamps the value");
    }
    const double value = ev.log_scale + log_base;
    const double err = -std::log1p(-rel) + 4.0 * kUnitRoundoff * (std::abs(value) + 1.0);
    return {value, err, ev.parts.terms};
}

/// Infinite product evaluation (always at x itself, never transformed):
///
///   theta2  = 2 e^{-pi x/4} PROD (1 - q^{2k}) (1 + q^{2k})^2
///   theta3  =               PROD (1 - q^{2k}) (1 + q^{2k-1})^2
///   theta4  =               PROD (1 - q^{2k}) (1 - q^{2k-1})^2
///   theta1+ = 2 e^{-pi x/4} PROD (1 - q^{2k})^3,          q = e^{-pi x}.
inline BoundedValue theta_product(ThetaKind kind, PositiveReal xp, const TruncationPolicy& policy = {})
{
    policy.validate();
    const double x = xp.value();
    const double one_minus_q2 = -std::expm1(-2.0 * kPi * x);

    double log_prefactor = 0.0;
    double prefactor_units = 0.0;
    if (kind == ThetaKind::Theta2 || kind == ThetaKind::Theta1Plus) {
        log_prefactor = std::numbers::ln2 - 0.25 * kPi * x;
        prefactor_units = 4.0 * (std::numbers::ln2 + 0.25 * kPi * x);
    }

    // log(1 + s e^{-a}) with its rounding budget (absolute, in unit roundoffs)
    detail::CompensatedSum<double> logsum;
    auto add_factor = [&](int m, int sign, int exponent) {
        const double a = kPi * m * x;
        const double w = std::exp(-a);
        const double one_plus_sw = sign > 0 ? 1.0 + w : -std::expm1(-a);
        const double term = exponent * (sign > 0 ? std::log1p(w) : std::log(one_plus_sw));
        const double sensitivity = exponent * w / one_plus_sw;
        logsum.add(term, 2.0 + (term != 0.0 ? sensitivity * (2.0 + 4.0 * a) / std::abs(term) : 0.0));
    };

    double tail_log = std::numeric_limits<double>::infinity();
    double abs_err = std::numeric_limits<double>::infinity();
    double value = 0.0;
    int k = 1;
    for (; k <= policy.max_terms; ++k) {
        switch (kind) {
        case ThetaKind::Theta2:
            add_factor(2 * k, -1, 1);
            add_factor(2 * k, +1, 2);
            break;
        case ThetaKind::Theta3:
            add_factor(2 * k, -1, 1);
            add_factor(2 * k - 1, +1, 2);
            break;
        case ThetaKind::Theta4:
            add_factor(2 * k, -1, 1);
            add_factor(2 * k - 1, -1, 2);
            break;
        case ThetaKind::Theta1Plus:
            add_factor(2 * k, -1, 3);
            break;
        }
        // sum_{j > k} of the dropped |log| terms is at most 3 q^{2k+1} / ((1 - q^{2k+1})(1 - q^2))
        const double qn = std::exp(-kPi * (2.0 * k + 1.0) * x);
        tail_log = 3.0 * qn / ((-std::expm1(-kPi * (2.0 * k + 1.0) * x)) * one_minus_q2);
        value = std::exp(log_prefactor + logsum.value());
        abs_err = detail::rel_to_abs(value, tail_log);
        if (abs_err <= 0.5 * policy.target_abs_tol) {
            break;
        }
    }
    if (!(abs_err <= 0.5 * policy.target_abs_tol)) {
        throw Error(ErrorKind::TolUnreachable, "theta_product: max_terms too small");
    }
    const double rel_round = logsum.rounding_bound(kUnitRoundoff) + kUnitRoundoff * (prefactor_units + 2.0);
    BoundedValue out{value, detail::rel_to_abs(value, tail_log + rel_round) + kUnitRoundoff * std::abs(value),
                     std::min(k, policy.max_terms)};
    detail::require_within(out, policy, "theta_product");
    return out;
}

namespace detail {

inline double reduce_unit_period(double z)
{
    double r = z - std::round(z);
    return std::abs(r);  // Theta(z, ix) is even and 1-periodic in z
}

} // namespace detail

/// Theta(z, ix) = 1 + 2 SUM exp(-pi k^2 x) cos(2 pi k z) for real z.
/// For x < 1 (with duality on) the Poisson form
/// x^{-1/2} SUM_n exp(-pi (z - n)^2 / x) is summed instead.
inline BoundedValue big_theta_real(double z, PositiveReal xp, const TruncationPolicy& policy = {})
{
    policy.validate();
    if (!std::isfinite(z)) {
        throw Error(ErrorKind::Domain, "big_theta_real: z must be finite");
    }
    const double x = xp.value();
    const double z0 = detail::reduce_unit_period(z);
    detail::CompensatedSum<double> sum;
    double tail = std::numeric_limits<double>::infinity();
    int k = 1;
    double value = 0.0;
    double err = 0.0;

    if (policy.use_duality && x < 1.0) {
        const double y = 1.0 / x;
        const double scale = std::sqrt(y);
        const double tol = policy.target_abs_tol / scale;
        const double a0 = kPi * z0 * z0 * y;
        sum.add(std::exp(-a0), 3.0 + 5.0 * a0);
        for (; k <= policy.max_terms; ++k) {
            for (const double d : {k - z0, k + z0}) {
                const double a = kPi * d * d * y;
                sum.add(std::exp(-a), 3.0 + 5.0 * a);
            }
            const double m = k + 0.5;
            tail = 2.0 * std::exp(-kPi * m * m * y) / (-std::expm1(-kPi * (2.0 * m + 1.0) * y));
            if (tail <= 0.5 * tol) {
                break;
            }
        }
        if (!(tail <= 0.5 * tol)) {
            throw Error(ErrorKind::TolUnreachable, "big_theta_real: max_terms too small");
        }
        value = scale * sum.value();
        err = scale * (tail + sum.rounding_bound(kUnitRoundoff)) + 4.0 * kUnitRoundoff * std::abs(value);
    } else {
        sum.add(1.0, 0.0);
        for (; k <= policy.max_terms; ++k) {
            const double a = kPi * k * k * x;
            const double phase = 2.0 * kPi * k * z0;
            sum.add(2.0 * std::exp(-a) * std::cos(phase), 4.0 + 3.0 * a + 3.0 * phase);
            tail = detail::theta_tail_bound(ThetaKind::Theta3, x, k);
            if (tail <= 0.5 * policy.target_abs_tol) {
                break;
            }
        }
        if (!(tail <= 0.5 * policy.target_abs_tol)) {
            throw Error(ErrorKind::TolUnreachable, "big_theta_real: max_terms too small");
        }
        value = sum.value();
        err = tail + sum.rounding_bound(kUnitRoundoff);
    }
    BoundedValue out{value, err, std::min(k, policy.max_terms)};
    detail::require_within(out, policy, "big_theta_real");
    return out;
}

/// Jacobi triple product for real z and tau = ix:
/// Theta(z, ix) = PROD (1 - q^{2k}) (1 + 2 q^{2k-1} cos(2 pi z) + q^{4k-2}).
inline BoundedValue big_theta_product(double z, PositiveReal xp, const TruncationPolicy& policy = {})
{
    policy.validate();
    if (!std::isfinite(z)) {
        throw Error(ErrorKind::Domain, "big_theta_product: z must be finite");
    }
    const double x = xp.value();
    const double z0 = detail::reduce_unit_period(z);
    const double c = std::cos(2.0 * kPi * z0);
    const double s = std::sin(2.0 * kPi * z0);
    const double one_minus_q2 = -std::expm1(-2.0 * kPi * x);

    detail::CompensatedSum<double> logsum;
    double tail_log = std::numeric_limits<double>::infinity();
    double value = 0.0;
    int k = 1;
    for (; k <= policy.max_terms; ++k) {
        const double a_even = 2.0 * kPi * k * x;
        const double even = std::log(-std::expm1(-a_even));
        const double w_even = std::exp(-a_even);
        logsum.add(even, 2.0 + (even != 0.0 ? w_even / (-std::expm1(-a_even)) * (2.0 + 4.0 * a_even) / std::abs(even) : 0.0));

        // log |1 + p e^{i phi}|^2 = 2 log(1 + p c) + log1p((p s / (1 + p c))^2)
        const double a_odd = kPi * (2.0 * k - 1.0) * x;
        const double p = std::exp(-a_odd);
        const double one_plus_pc = 1.0 + p * c;
        const double ratio = p * s / one_plus_pc;
        const double odd = 2.0 * std::log(one_plus_pc) + std::log1p(ratio * ratio);
        const double sens = 2.0 * p / (1.0 - p);
        logsum.add(odd, 4.0 + (odd != 0.0 ? sens * (4.0 + 4.0 * a_odd) / std::abs(odd) : 0.0));

        const double qn = std::exp(-kPi * (2.0 * k + 1.0) * x);
        tail_log = 3.0 * qn / ((-std::expm1(-kPi * (2.0 * k + 1.0) * x)) * one_minus_q2);
        value = std::exp(logsum.value());
        if (detail::rel_to_abs(value, tail_log) <= 0.5 * policy.target_abs_tol) {
            break;
        }
    }
    if (!(detail::rel_to_abs(value, tail_log) <= 0.5 * policy.target_abs_tol)) {
        throw Error(ErrorKind::TolUnreachable, "big_theta_product: max_terms too small");
    }
    const double rel = tail_log + logsum.rounding_bound(kUnitRoundoff) + 4.0 * kUnitRoundoff;
    BoundedValue out{value, detail::rel_to_abs(value, rel) + kUnitRoundoff * value, std::min(k, policy.max_terms)};
    detail::require_within(out, policy, "big_theta_product");
    return out;
}

} // namespace thetadet
