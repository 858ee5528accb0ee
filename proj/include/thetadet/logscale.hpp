// Logarithmic derivatives of theta functions and the log-scale operator
// x d/dx applied repeatedly to log theta.
//
// Every theta function is a product of factors (1 + s e^{-m pi x})^e times
// an elementary prefactor, so with w = s e^{-m pi x}
//
//   d^j/dx^j log(1 + w) = (-m pi)^j h_j(w),
//   h_1 = w/(1+w),  h_2 = w/(1+w)^2,  h_3 = w(1-w)/(1+w)^3,
//   h_4 = w(1 - 4w + w^2)/(1+w)^4.
//
// For theta3 the j = 1..4 series are exactly psi, psi', psi'', psi''' with
// psi = theta3'/theta3.  The log-scale iterates follow from
//
//   (x d/dx)^1 = x D,  (x d/dx)^2 = x D + x^2 D^2,
//   (x d/dx)^3 = x D + 3x^2 D^2 + x^3 D^3,
//   (x d/dx)^4 = x D + 7x^2 D^2 + 6x^3 D^3 + x^4 D^4.
//
// Small arguments are transported to 1/x with
//   L1(x) = -r - L1'(1/x),   Ln(x) = (-1)^n Ln'(1/x)  (n >= 2),
// where L' belongs to the duality partner (theta2 <-> theta4).
#pragma once

#include "thetadet/core.hpp"
#include "thetadet/theta.hpp"

#include <array>
#include <cmath>
#include <span>
#include <string>

namespace thetadet {

/// Order n of (x d/dx)^n, restricted to 0..4.
class DerivOrder {
public:
    explicit DerivOrder(int n) : n_(n)
    {
        if (n < 0 || n > 4) {
            throw Error(ErrorKind::UnsupportedOrder, "derivative order must be in [0, 4], got " + std::to_string(n));
        }
    }

    [[nodiscard]] int value() const noexcept { return n_; }

private:
    int n_;
};

/// A value split into a closed-form anchor and a (usually small) series
/// offset.  Monotonicity scans difference anchors and offsets separately, so
/// increments far below one ulp of the anchor remain visible.
///
/// `error` bounds the offset; `anchor_error` bounds the rounding of the
/// anchor itself (zero when the anchor is computed exactly).
struct Anchored {
    double anchor = 0.0;
    double offset = 0.0;
    double error = 0.0;
    double anchor_error = 0.0;
    int terms = 0;

    [[nodiscard]] double value() const noexcept { return anchor + offset; }
    [[nodiscard]] double value_error() const noexcept
    {
        return error + anchor_error + kUnitRoundoff * std::abs(value());
    }
    [[nodiscard]] BoundedValue bounded() const noexcept { return {value(), value_error(), terms}; }
};

namespace detail {

// Exact rounding errors of one floating-point operation (TwoSum / FMA), so
// anchors that happen to be computed exactly carry no error.
inline double add_rounding(double a, double b, double s)
{
    const double bb = s - a;
    return std::abs((a - (s - bb)) + (b - bb));
}

inline double mul_rounding(double a, double b, double p) { return std::abs(std::fma(a, b, -p)); }

struct AnchorValue {
    double value;
    double error;
};

inline AnchorValue anchor_add(AnchorValue a, AnchorValue b)
{
    const double s = a.value + b.value;
    return {s, a.error + b.error + add_rounding(a.value, b.value, s)};
}

inline AnchorValue anchor_mul(AnchorValue a, double c)
{
    const double p = a.value * c;
    return {p, std::abs(c) * a.error + mul_rounding(a.value, c, p)};
}

inline AnchorValue anchor_div(AnchorValue a, double c)
{
    const double q = a.value / c;
    return {q, a.error / std::abs(c) + std::abs(std::fma(q, c, -a.value)) / std::abs(c)};
}

inline AnchorValue anchor_of(const Anchored& v) { return {v.anchor, v.anchor_error}; }

inline void set_anchor(Anchored& v, AnchorValue a)
{
    v.anchor = a.value;
    v.anchor_error = a.error;
}

} // namespace detail

/// psi = theta3'/theta3 and its first three derivatives.
struct PsiDerivatives {
    double psi = 0.0;
    double psi1 = 0.0;
    double psi2 = 0.0;
    double psi3 = 0.0;
    std::array<double, 4> error_bound{};
};

inline constexpr double kLogDualityThreshold = 0.5;

namespace detail {

struct LogFactor {
    int scale;  // m = scale * k + shift
    int shift;
    int sign;
    int exponent;
};

inline std::span<const LogFactor> log_factors(ThetaKind kind)
{
    static constexpr LogFactor t2[] = {{2, 0, -1, 1}, {2, 0, +1, 2}};
    static constexpr LogFactor t3[] = {{2, 0, -1, 1}, {2, -1, +1, 2}};
    static constexpr LogFactor t4[] = {{2, 0, -1, 1}, {2, -1, -1, 2}};
    static constexpr LogFactor t1[] = {{2, 0, -1, 3}};
    switch (kind) {
    case ThetaKind::Theta2: return t2;
    case ThetaKind::Theta3: return t3;
    case ThetaKind::Theta4: return t4;
    case ThetaKind::Theta1Plus: return t1;
    }
    return t3;
}

/// d/dx of the elementary prefactor's logarithm.
inline double log_linear_coefficient(ThetaKind kind)
{
    return (kind == ThetaKind::Theta2 || kind == ThetaKind::Theta1Plus) ? -0.25 * kPi : 0.0;
}

inline double h_function(int j, double w, double one_plus_w)
{
    switch (j) {
    case 1: return w / one_plus_w;
    case 2: return w / (one_plus_w * one_plus_w);
    case 3: return w * (1.0 - w) / (one_plus_w * one_plus_w * one_plus_w);
    default: {
        const double d2 = one_plus_w * one_plus_w;
        return w * (1.0 - 4.0 * w + w * w) / (d2 * d2);
    }
    }
}

/// F_j(q) with |h_j(w)| <= |w| F_j(q) whenever |w| <= q < 1.
inline double h_majorant_factor(int j, double q)
{
    const double d = 1.0 - q;
    switch (j) {
    case 1: return 1.0 / d;
    case 2: return 1.0 / (d * d);
    case 3: return (1.0 + q) / (d * d * d);
    default: return (1.0 + 4.0 * q + q * q) / (d * d * d * d);
    }
}

using DerivArray = std::array<Anchored, 5>;  // index 1..4 used

/// g_j = d^j/dx^j log theta_kind(x) for j = 1..jmax by direct summation.
inline DerivArray log_derivs_direct(ThetaKind kind, double x, int jmax, double tol, int max_terms,
                                    double arg_units)
{
    std::array<CompensatedSum<double>, 5> sums;
    std::array<double, 5> tails{};
    tails.fill(std::numeric_limits<double>::infinity());
    const double r = std::exp(-kPi * x);
    const auto factors = log_factors(kind);
    int k = 1;
    bool reached = false;
    for (; k <= max_terms; ++k) {
        for (const LogFactor& f : factors) {
            const int m = f.scale * k + f.shift;
            const double a = kPi * m * x;
            const double q = std::exp(-a);
            const double one_plus_w = f.sign > 0 ? 1.0 + q : -std::expm1(-a);
            const double w = f.sign * q;
            double power = 1.0;
            for (int j = 1; j <= jmax; ++j) {
                power *= -kPi * m;
                const double term = f.exponent * power * h_function(j, w, one_plus_w);
                const double sens = 1.0 + (j + 1) * q / one_plus_w;
                sums[j].add(term, 6.0 + 2.0 * j + (3.0 + arg_units) * a * sens);
            }
        }
        const double first = 2.0 * k + 1.0;
        const double q_first = std::exp(-kPi * first * x);
        reached = true;
        for (int j = 1; j <= jmax; ++j) {
            tails[j] = 3.0 * std::pow(kPi, j) * h_majorant_factor(j, q_first) * power_geometric_tail(first, j, r);
            reached = reached && tails[j] <= 0.5 * tol;
        }
        if (reached) {
            break;
        }
    }
    if (!reached) {
        throw Error(ErrorKind::TolUnreachable, std::string("log-derivative series of ") + to_string(kind) +
                                                   ": max_terms too small for tol");
    }
    DerivArray g{};
    for (int j = 1; j <= jmax; ++j) {
        g[j].offset = sums[j].value();
        g[j].error = tails[j] + sums[j].rounding_bound(kUnitRoundoff);
        g[j].terms = k;
    }
    g[1].anchor = log_linear_coefficient(kind);
    g[1].anchor_error = kUnitRoundoff * std::abs(g[1].anchor);
    return g;
}

// Stirling numbers of the second kind S(n, j) for n, j <= 4.
inline constexpr std::array<std::array<double, 5>, 5> kStirling2 = {{
    {1, 0, 0, 0, 0},
    {0, 1, 0, 0, 0},
    {0, 1, 1, 0, 0},
    {0, 1, 3, 1, 0},
    {0, 1, 7, 6, 1},
}};

// Signed Stirling numbers of the first kind s(j, n) for j, n <= 4.
inline constexpr std::array<std::array<double, 5>, 5> kStirling1 = {{
    {1, 0, 0, 0, 0},
    {0, 1, 0, 0, 0},
    {0, -1, 1, 0, 0},
    {0, 2, -3, 1, 0},
    {0, -6, 11, -6, 1},
}};

/// L_n = (x d/dx)^n log theta, n = 1..nmax, from direct derivative series.
inline DerivArray log_scale_from_derivs(const DerivArray& g, double x, int nmax)
{
    DerivArray L{};
    for (int n = 1; n <= nmax; ++n) {
        double xj = 1.0;
        CompensatedSum<double> off;
        double err = 0.0;
        int terms = 0;
        for (int j = 1; j <= n; ++j) {
            xj *= x;
            const double c = kStirling2[n][j] * xj;
            off.add(c * (j == 1 ? g[j].offset : g[j].value()), 3.0 + j);
            err += std::abs(c) * g[j].error;
            terms = std::max(terms, g[j].terms);
        }
        set_anchor(L[n], anchor_mul(anchor_of(g[1]), x));
        L[n].offset = off.value();
        L[n].error = err + off.rounding_bound(kUnitRoundoff);
        L[n].terms = terms;
    }
    return L;
}

/// L_n evaluated directly at x (no transport).
inline DerivArray log_scale_direct(ThetaKind kind, double x, int nmax, const TruncationPolicy& policy,
                                   double arg_units)
{
    const DerivArray g = log_derivs_direct(kind, x, nmax, policy.target_abs_tol / std::pow(std::max(x, 1.0), nmax),
                                           policy.max_terms, arg_units);
    return log_scale_from_derivs(g, x, nmax);
}

inline bool transport(const TruncationPolicy& policy, double x)
{
    return policy.use_duality && x < kLogDualityThreshold;
}

/// L_n(x) for n = 1..nmax, transporting small x to 1/x.
inline DerivArray log_scale_derivs(ThetaKind kind, double x, int nmax, const TruncationPolicy& policy)
{
    policy.validate();
    if (!transport(policy, x)) {
        return log_scale_direct(kind, x, nmax, policy, 0.0);
    }
    const DualityLaw law = duality_law(kind);
    const DerivArray Lp = log_scale_direct(law.partner, 1.0 / x, nmax, policy, 1.0);
    DerivArray L{};
    set_anchor(L[1], anchor_add({-law.r, 0.0}, anchor_mul(anchor_of(Lp[1]), -1.0)));
    L[1].offset = -Lp[1].offset;
    L[1].error = Lp[1].error;
    L[1].terms = Lp[1].terms;
    for (int n = 2; n <= nmax; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        L[n].anchor = sign * Lp[n].anchor;
        L[n].anchor_error = Lp[n].anchor_error;
        L[n].offset = sign * Lp[n].offset;
        L[n].error = Lp[n].error;
        L[n].terms = Lp[n].terms;
    }
    return L;
}

/// g_j(x) = d^j/dx^j log theta(x), j = 1..jmax, transporting small x.
inline DerivArray log_derivs(ThetaKind kind, double x, int jmax, const TruncationPolicy& policy)
{
    policy.validate();
    if (!transport(policy, x)) {
        return log_derivs_direct(kind, x, jmax, policy.target_abs_tol, policy.max_terms, 0.0);
    }
    const DerivArray L = log_scale_derivs(kind, x, jmax, policy);
    DerivArray g{};
    double xj = 1.0;
    for (int j = 1; j <= jmax; ++j) {
        xj *= x;
        CompensatedSum<double> off;
        double err = 0.0;
        for (int n = 1; n <= j; ++n) {
            const double c = kStirling1[j][n];
            off.add(c * (n == 1 ? L[1].offset : L[n].value()), 2.0);
            err += std::abs(c) * (L[n].error + (n == 1 ? 0.0 : L[n].anchor_error));
        }
        AnchorValue a = anchor_mul(anchor_of(L[1]), kStirling1[j][1]);
        for (int i = 0; i < j; ++i) {
            a = anchor_div(a, x);
        }
        set_anchor(g[j], a);
        g[j].offset = off.value() / xj;
        g[j].error = (err + off.rounding_bound(kUnitRoundoff)) / xj + (2.0 + j) * kUnitRoundoff * std::abs(g[j].offset);
        g[j].terms = L[j].terms;
    }
    return g;
}

inline int max_log_scale_order(ThetaKind kind)
{
    return kind == ThetaKind::Theta3 ? 4 : 2;
}

} // namespace detail

/// theta'(x)/theta(x) with its decomposition into anchor + series offset.
inline Anchored log_deriv_anchored(ThetaKind kind, PositiveReal x, const TruncationPolicy& policy = {})
{
    if (kind == ThetaKind::Theta1Plus) {
        throw Error(ErrorKind::UnsupportedKind, "log_deriv is defined for theta2, theta3, theta4");
    }
    return detail::log_derivs(kind, x.value(), 1, policy)[1];
}

/// theta'(x)/theta(x) from the termwise-differentiated product series.
inline BoundedValue log_deriv(ThetaKind kind, PositiveReal x, const TruncationPolicy& policy = {})
{
    BoundedValue out = log_deriv_anchored(kind, x, policy).bounded();
    detail::require_within(out, policy, "log_deriv");
    return out;
}

/// psi, psi', psi'', psi''' with psi = theta3'/theta3.  Absolute error
/// bounds grow like x^{-j} for small x and are reported, not enforced.
inline PsiDerivatives psi_derivatives(PositiveReal x, const TruncationPolicy& policy = {})
{
    const detail::DerivArray g = detail::log_derivs(ThetaKind::Theta3, x.value(), 4, policy);
    PsiDerivatives out;
    out.psi = g[1].value();
    out.psi1 = g[2].value();
    out.psi2 = g[3].value();
    out.psi3 = g[4].value();
    for (int j = 0; j < 4; ++j) {
        out.error_bound[j] = g[j + 1].value_error();
    }
    return out;
}

/// (x d/dx)^n log theta_kind(x) as anchor + offset.
inline Anchored xddx_log_theta_anchored(ThetaKind kind, DerivOrder order, PositiveReal x,
                                        const TruncationPolicy& policy = {})
{
    const int n = order.value();
    if (n > detail::max_log_scale_order(kind)) {
        throw Error(ErrorKind::UnsupportedOrder, std::string("(x d/dx)^") + std::to_string(n) + " log " +
                                                     to_string(kind) + " is not supported");
    }
    if (n == 0) {
        const BoundedValue v = log_theta(kind, x, policy);
        return {0.0, v.value, v.error_bound, 0.0, v.terms_used};
    }
    return detail::log_scale_derivs(kind, x.value(), n, policy)[n];
}

/// (x d/dx)^n log theta_kind(x); n = 1 gives x theta'/theta.
inline BoundedValue xddx_log_theta(ThetaKind kind, DerivOrder order, PositiveReal x,
                                   const TruncationPolicy& policy = {})
{
    BoundedValue out = xddx_log_theta_anchored(kind, order, x, policy).bounded();
    detail::require_within(out, policy, "xddx_log_theta");
    return out;
}

/// Central differences in y = log x applied n times to log theta; a test
/// oracle for xddx_log_theta, O(h^2) accurate.
inline double finite_difference_check(ThetaKind kind, DerivOrder order, PositiveReal x, double h)
{
    const int n = order.value();
    if (n < 1) {
        throw Error(ErrorKind::Domain, "finite_difference_check needs n >= 1");
    }
    if (!(h > 0.0) || !(h < x.value() / 10.0)) {
        throw Error(ErrorKind::Domain, "finite_difference_check needs 0 < h < x/10");
    }
    TruncationPolicy policy;
    policy.target_abs_tol = 1e-30;
    auto recurse = [&](auto&& self, int level, double at) -> double {
        if (level == 0) {
            return log_theta(kind, PositiveReal(at), policy).value;
        }
        const double up = self(self, level - 1, at * std::exp(h));
        const double down = self(self, level - 1, at * std::exp(-h));
        return (up - down) / (2.0 * h);
    };
    return recurse(recurse, n, x.value());
}

} // namespace thetadet
