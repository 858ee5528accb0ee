// Numerical reenactment of the inequality chain behind the sign of
// (x d/dx)^3 log theta3: micro-constants, exponential bounds on the psi
// series, polynomial sign claims and the final sign pattern.
//
// Each Certificate records its grid so a failure is reproducible.  A
// certificate passes iff its minimal margin, after subtracting evaluation
// error, is strictly positive.
#pragma once

#include "thetadet/core.hpp"
#include "thetadet/logscale.hpp"
#include "thetadet/scan.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace thetadet {

struct Certificate {
    std::string name;
    std::string claim;
    std::string domain;  // interval of x, or "constant"
    int grid_points = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    bool pass = false;
    double worst_x = std::numeric_limits<double>::quiet_NaN();
    // Smallest and largest grid x where the margin is not positive.
    std::optional<double> fail_lo;
    std::optional<double> fail_hi;
};

namespace detail {

/// Margin of "value < bound" with a few ulps of evaluation error.
inline double upper_margin(double value, double bound, double units = 8.0)
{
    return (bound - value) - units * kUnitRoundoff * (std::abs(value) + std::abs(bound));
}

inline Certificate make_certificate(std::string name, std::string claim, std::string domain)
{
    Certificate c;
    c.name = std::move(name);
    c.claim = std::move(claim);
    c.domain = std::move(domain);
    return c;
}

inline Certificate constant_certificate(std::string name, std::string claim, double margin)
{
    Certificate c = make_certificate(std::move(name), std::move(claim), "constant");
    c.grid_points = 1;
    c.min_margin = margin;
    c.pass = margin > 0.0;
    return c;
}

inline void accumulate(Certificate& c, double x, double margin)
{
    ++c.grid_points;
    if (margin < c.min_margin) {
        c.min_margin = margin;
        c.worst_x = x;
    }
    if (!(margin > 0.0)) {
        c.fail_lo = c.fail_lo ? std::min(*c.fail_lo, x) : x;
        c.fail_hi = c.fail_hi ? std::max(*c.fail_hi, x) : x;
    }
}

inline std::string interval_text(double lo, double hi)
{
    return "[" + number_text(lo) + ", " + number_text(hi) + "]";
}

inline double bracket_polynomial(double x)
{
    const double e = std::exp(-kPi * x);
    const double e3 = e * e * e;
    return e3 * (81.0 + e * (-149.0 + e * (155.0 + e * (-79.0 + e * 16.0))));
}

} // namespace detail

/// Default grid for claims on x > 1: 512 log-spaced points on [1.001, 50].
inline std::vector<double> default_certificate_grid() { return log_grid(1.001, 50.0, 512); }

/// Micro-constants of the proof.  Every expression is monotone in x on
/// x >= 1, so it is checked at its binding endpoint x = 1; the bracket
/// polynomial is additionally scanned on the default grid.
inline std::vector<Certificate> certify_constants()
{
    using detail::constant_certificate;
    using detail::upper_margin;
    const double e1 = std::exp(-kPi);
    const double e2 = std::exp(-2.0 * kPi);
    const double mix = std::exp(-5.0 * kPi) + 4.0 * std::exp(-3.0 * kPi) + e1;
    const double pi2 = kPi * kPi;
    const double pi3 = pi2 * kPi;
    const double pi4 = pi2 * pi2;

    std::vector<Certificate> out;
    out.push_back(constant_certificate("exp_pi_plus_one", "1 + e^{-pi x} < 1.05 (x >= 1)", upper_margin(1.0 + e1, 1.05)));
    out.push_back(constant_certificate("one_minus_exp_pi_cubed", "(1 - e^{-pi x})^{-3} < 1.15 (x >= 1)",
                                       upper_margin(std::pow(-std::expm1(-kPi), -3.0), 1.15)));
    out.push_back(constant_certificate("exp_2pi_plus_one", "1 + e^{-2 pi} < 1.002", upper_margin(1.0 + e2, 1.002)));
    out.push_back(constant_certificate("one_minus_exp_2pi_cubed", "(1 - e^{-2 pi})^{-3} < 1.006",
                                       upper_margin(std::pow(-std::expm1(-2.0 * kPi), -3.0), 1.006)));
    out.push_back(constant_certificate("mix_upper", "e^{-5 pi x} + 4 e^{-3 pi x} + e^{-pi x} < 0.045 (x >= 1)",
                                       upper_margin(mix, 0.045)));
    out.push_back(constant_certificate("one_minus_exp_2pi_fourth", "(1 - e^{-2 pi x})^{-4} < 1.008 (x >= 1)",
                                       upper_margin(std::pow(-std::expm1(-2.0 * kPi), -4.0), 1.008)));
    out.push_back(constant_certificate("mix_lower", "e^{-5 pi} + 4 e^{-3 pi} + e^{-pi} > 0.04",
                                       -upper_margin(mix, 0.04) - 16.0 * kUnitRoundoff * 0.04));
    out.push_back(constant_certificate("one_minus_exp_pi_fifth", "(1 - e^{-pi x})^{-5} < 1.25 (x >= 1)",
                                       upper_margin(std::pow(-std::expm1(-kPi), -5.0), 1.25)));

    Certificate bracket = detail::make_certificate("bracket", "16e^{-7pi x} - 79e^{-6pi x} + 155e^{-5pi x} - 149e^{-4pi x} + 81e^{-3pi x} < 0.0065",
                        detail::interval_text(1.0, 50.0));
    detail::accumulate(bracket, 1.0, upper_margin(detail::bracket_polynomial(1.0), 0.0065, 64.0));
    for (double x : default_certificate_grid()) {
        detail::accumulate(bracket, x, upper_margin(detail::bracket_polynomial(x), 0.0065, 64.0));
    }
    bracket.pass = bracket.min_margin > 0.0;
    out.push_back(bracket);

    // Arithmetic steps combining the constants.
    out.push_back(constant_certificate("psi1_combination", "2 pi^2 * 1.05 * 1.15 < 24", upper_margin(2.0 * pi2 * 1.05 * 1.15, 24.0)));
    out.push_back(constant_certificate("psi2_product", "1.002 * 1.006 < 1.01", upper_margin(1.002 * 1.006, 1.01)));
    out.push_back(constant_certificate("psi2_leading", "1.01 * 0.045 * 1.008 < 0.05", upper_margin(1.01 * 0.045 * 1.008, 0.05)));
    out.push_back(constant_certificate("psi2_combination", "(0.05 - 2) pi^3 < -60", upper_margin((0.05 - 2.0) * pi3, -60.0)));
    out.push_back(constant_certificate("psi3_bracket", "1.25 * (1 + 0.0065) < 1.259", upper_margin(1.25 * 1.0065, 1.259)));
    out.push_back(constant_certificate("psi3_combination", "(2 * 1.259 - 16 * 0.04) pi^4 < 183",
                                       upper_margin((2.0 * 1.259 - 16.0 * 0.04) * pi4, 183.0)));
    return out;
}

/// psi' < 24 e^{-pi x}, psi'' < -60 e^{-pi x}, psi''' < 183 e^{-pi x} on
/// the grid (all points > 1).  Margins are in units of e^{-pi x}.
inline std::vector<Certificate> certify_series_bounds(const std::vector<double>& grid,
                                                      const TruncationPolicy& policy = {})
{
    for (double x : grid) {
        if (!(x > 1.0)) {
            throw Error(ErrorKind::Domain, "certify_series_bounds needs all grid points > 1");
        }
    }
    std::string domain = grid.empty() ? "[]" : detail::interval_text(grid.front(), grid.back());
    Certificate neg = detail::make_certificate("psi_negative", "psi(x) < 0", domain);
    Certificate c1 = detail::make_certificate("psi1_bound", "psi'(x) < 24 e^{-pi x}", domain);
    Certificate c2 = detail::make_certificate("psi2_bound", "psi''(x) < -60 e^{-pi x}", domain);
    Certificate c3 = detail::make_certificate("psi3_bound", "psi'''(x) < 183 e^{-pi x}", domain);
    for (double x : grid) {
        const PsiDerivatives p = psi_derivatives(PositiveReal(x), policy);
        const double s = std::exp(kPi * x);
        const double err_scale = s * (1.0 + 4.0 * kUnitRoundoff);
        detail::accumulate(neg, x, -p.psi * s - p.error_bound[0] * err_scale);
        detail::accumulate(c1, x, detail::upper_margin(p.psi1 * s, 24.0) - p.error_bound[1] * err_scale);
        detail::accumulate(c2, x, detail::upper_margin(p.psi2 * s, -60.0) - p.error_bound[2] * err_scale);
        detail::accumulate(c3, x, detail::upper_margin(p.psi3 * s, 183.0) - p.error_bound[3] * err_scale);
    }
    std::vector<Certificate> out{neg, c1, c2, c3};
    for (Certificate& c : out) {
        c.pass = c.grid_points > 0 && c.min_margin > 0.0;
    }
    return out;
}

inline std::vector<Certificate> certify_series_bounds() { return certify_series_bounds(default_certificate_grid()); }

/// Sign claims for the polynomials produced by the series bounds, settled
/// by closed-form roots.  With bounds psi' < A e^{-pi x}, psi'' < -B e^{-pi x},
/// psi''' < C e^{-pi x} (A = 24, B = 60, C = psi3_bound):
///   (x d/dx)^3 log theta3 < (3A x^2 - B x^3) e^{-pi x}, root 3A/B = 6/5;
///   (x d/dx)^4 log theta3 < (7A x^2 - 6B x^3 + C x^4) e^{-pi x},
/// negative between the roots of C x^2 - 6B x + 7A.  The two steps join only
/// if the upper root exceeds 6/5.
inline std::vector<Certificate> certify_polynomials(double psi3_bound = 183.0)
{
    const double A = 24.0;
    const double B = 60.0;
    const double C = psi3_bound;
    std::vector<Certificate> out;

    // 72 x^2 - 60 x^3 = 12 x^2 (6 - 5 x): the root is 3A/B exactly.
    const double root3 = 3.0 * A / B;
    Certificate cubic = detail::constant_certificate(
        "cubic_sign", "72 x^2 - 60 x^3 < 0 for x > 6/5",
        // Slope margin: p(x)/x^2 <= -B (x - 6/5) when the root is at most 6/5.
        root3 <= 1.2 ? B : 1.2 - root3);
    cubic.domain = "(6/5, inf)";
    out.push_back(cubic);

    const double disc = 36.0 * B * B - 28.0 * A * C;
    Certificate quartic = detail::make_certificate("quartic_sign", "(168 x^2 - 360 x^3 + " + std::to_string(static_cast<int>(C)) +
                                            " x^4) e^{-pi x} < 0 on (1, r+)",
                        "(1, r+)");
    quartic.grid_points = 1;
    double r_lo = std::numeric_limits<double>::quiet_NaN();
    double r_hi = std::numeric_limits<double>::quiet_NaN();
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        r_lo = (6.0 * B - sq) / (2.0 * C);
        r_hi = (6.0 * B + sq) / (2.0 * C);
        quartic.min_margin = std::min(1.0 - r_lo, r_hi - 1.0) - 8.0 * kUnitRoundoff * r_hi;
    } else {
        quartic.min_margin = -1.0;
    }
    quartic.pass = quartic.min_margin > 0.0;
    out.push_back(quartic);

    Certificate upper = detail::make_certificate("upper_root", "r+ = (6B + sqrt(36B^2 - 28AC))/(2C) > 1.205", "constant");
    upper.grid_points = 1;
    upper.min_margin = std::isnan(r_hi) ? -1.0 : (r_hi - 1.205) - 8.0 * kUnitRoundoff * r_hi;
    upper.pass = upper.min_margin > 0.0;
    out.push_back(upper);

    Certificate overlap = detail::make_certificate("steps_overlap", "r+ > 6/5, so decrease on (1, r+) meets negativity on (6/5, inf)",
                        "constant");
    overlap.grid_points = 1;
    overlap.min_margin = std::isnan(r_hi) ? -1.0 : (r_hi - root3) - 8.0 * kUnitRoundoff * r_hi;
    overlap.pass = overlap.min_margin > 0.0;
    out.push_back(overlap);
    return out;
}

/// Sign of (x d/dx)^3 log theta3: positive on grid_below in (0, 1), negative
/// on grid_above in (1, inf).  Points within 1e-3 of 1 are rejected.
inline Certificate certify_conclusion(const std::vector<double>& grid_below, const std::vector<double>& grid_above,
                                      const TruncationPolicy& policy = {})
{
    for (double x : grid_below) {
        if (!(x > 0.0) || !(x < 1.0 - 1e-3)) {
            throw Error(ErrorKind::Domain, "grid_below must lie in (0, 1 - 1e-3)");
        }
    }
    for (double x : grid_above) {
        if (!(x > 1.0 + 1e-3) || !std::isfinite(x)) {
            throw Error(ErrorKind::Domain, "grid_above must lie in (1 + 1e-3, inf)");
        }
    }
    Certificate c = detail::make_certificate("conclusion", "(x d/dx)^3 log theta3 > 0 on (0,1) and < 0 on (1,inf)", "(0,1) u (1,inf)");
    const AnchoredCurve f = xddx_curve(ThetaKind::Theta3, 3, policy);
    auto check = [&](const std::vector<double>& grid, double sign) {
        for (double x : grid) {
            const Anchored v = f(x);
            // sign * (anchor + offset), resolved without absorbing the offset.
            const double s = sign * v.anchor + sign * v.offset;
            detail::accumulate(c, x, s - v.error - v.anchor_error - kUnitRoundoff * std::abs(s));
        }
    };
    check(grid_below, 1.0);
    check(grid_above, -1.0);
    c.pass = c.grid_points > 0 && c.min_margin > 0.0;
    return c;
}

} // namespace thetadet
