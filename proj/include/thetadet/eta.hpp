// Dedekind eta on the imaginary axis, psi1(x) = x^{3/4} theta1+(x), and the
// determinant of the Laplacian on rectangular unit-area tori:
//
//   det'(alpha) = alpha eta(i alpha)^4 = (psi1(alpha)/2)^{4/3}.
#pragma once

#include "thetadet/core.hpp"
#include "thetadet/logscale.hpp"
#include "thetadet/theta.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace thetadet {

/// Rectangular unit-area torus.  alpha is the modular parameter: the
/// lattice is generated by alpha^{-1/2} and i alpha^{1/2}.
struct TorusShape {
    PositiveReal alpha;
};

enum class DeterminantRoute { EtaClosedForm, SpectralZeta };

inline const char* to_string(DeterminantRoute r) noexcept
{
    return r == DeterminantRoute::EtaClosedForm ? "eta" : "zeta";
}

struct DeterminantResult {
    PositiveReal alpha{1.0};
    double det_value = 0.0;
    double height = 0.0;  // -log det_value
    DeterminantRoute route = DeterminantRoute::EtaClosedForm;
    double error_bound = 0.0;  // absolute, on det_value
};

inline constexpr double kEtaDualityThreshold = 0.5;

namespace detail {

struct LogValue {
    double log = 0.0;
    double rel = 0.0;  // bound on |log error|
    int terms = 0;
};

/// log eta(iy) from the product, y >= 0.5.
inline LogValue log_eta_product(double y, const TruncationPolicy& policy)
{
    const double q = std::exp(-2.0 * kPi * y);
    CompensatedSum<double> sum;
    // Relative tolerance: eta(iy) <= 1, so this also bounds the absolute error.
    const double target = 0.5 * policy.target_abs_tol;
    double tail = std::numeric_limits<double>::infinity();
    int k = 1;
    for (; k <= policy.max_terms; ++k) {
        const double a = 2.0 * kPi * k * y;
        sum.add(std::log1p(-std::exp(-a)), 4.0 + 2.0 * a * std::exp(-a) / -std::expm1(-a));
        // sum_{j > k} -log(1 - q^j) <= q^{k+1} / ((1 - q)(1 - q^{k+1}))
        const double qk1 = std::exp(-2.0 * kPi * (k + 1) * y);
        tail = qk1 / ((1.0 - q) * (1.0 - qk1));
        if (tail <= target) {
            break;
        }
    }
    if (!(tail <= target)) {
        throw Error(ErrorKind::TolUnreachable, "eta product: max_terms too small for tol");
    }
    const double lead = -kPi * y / 12.0;
    const double log = lead + sum.value();
    return {log, tail + sum.rounding_bound(kUnitRoundoff) + 2.0 * kUnitRoundoff * std::abs(lead),
            std::min(k, policy.max_terms)};
}

/// log eta(iy) for any y > 0; y < 0.5 goes through
/// eta(iy) = (psi1(1/y) / (2 y^{3/4}))^{1/3} with theta1+ summed at 1/y.
inline LogValue log_eta(double y, const TruncationPolicy& policy)
{
    policy.validate();
    if (!(policy.use_duality && y < kEtaDualityThreshold)) {
        return log_eta_product(y, policy);
    }
    const double x = 1.0 / y;
    const BoundedValue lt = log_theta(ThetaKind::Theta1Plus, PositiveReal(x), policy.direct());
    const double log_psi = 0.75 * std::log(x) + lt.value;
    const double log = (log_psi - std::numbers::ln2 - 0.75 * std::log(y)) / 3.0;
    const double round = 4.0 * kUnitRoundoff * (std::abs(log_psi) + std::abs(std::log(y)) + 1.0);
    return {log, (lt.error_bound + round) / 3.0, lt.terms_used};
}

inline BoundedValue from_log(const LogValue& v)
{
    const double value = std::exp(v.log);
    return {value, rel_to_abs(value, v.rel + 2.0 * kUnitRoundoff), v.terms};
}

} // namespace detail

/// eta(iy) = e^{-pi y/12} PROD (1 - e^{-2 pi k y}).
inline BoundedValue eta_imag_axis(PositiveReal y, const TruncationPolicy& policy = {})
{
    BoundedValue out = detail::from_log(detail::log_eta(y.value(), policy));
    detail::require_within(out, policy, "eta_imag_axis");
    return out;
}

/// psi1(x) = x^{3/4} theta1+(x), theta1+ from its series (transformed for x < 1).
inline BoundedValue psi1(PositiveReal x, const TruncationPolicy& policy = {})
{
    const BoundedValue t = theta_series(ThetaKind::Theta1Plus, x, policy);
    const double w = std::pow(x.value(), 0.75);
    return {w * t.value, w * t.error_bound + 3.0 * kUnitRoundoff * w * std::abs(t.value), t.terms_used};
}

/// The three evaluations of psi1: theta1+ series, theta2 theta3 theta4, and
/// the product 2 x^{3/4} e^{-pi x/4} PROD (1 - e^{-2k pi x})^3.
struct Psi1Representations {
    BoundedValue series;
    BoundedValue triple;
    BoundedValue product;
};

inline Psi1Representations psi1_representations(PositiveReal x, const TruncationPolicy& policy = {})
{
    const double w = std::pow(x.value(), 0.75);
    Psi1Representations r;
    r.series = psi1(x, policy);
    const BoundedValue t2 = theta_series(ThetaKind::Theta2, x, policy);
    const BoundedValue t3 = theta_series(ThetaKind::Theta3, x, policy);
    const BoundedValue t4 = theta_series(ThetaKind::Theta4, x, policy);
    const double p = t2.value * t3.value * t4.value;
    const double perr = t2.error_bound * t3.value * t4.value + t3.error_bound * t2.value * t4.value +
                        t4.error_bound * t2.value * t3.value + 3.0 * kUnitRoundoff * p;
    r.triple = {w * p, w * perr + 2.0 * kUnitRoundoff * w * p, std::max({t2.terms_used, t3.terms_used, t4.terms_used})};
    const BoundedValue pr = theta_product(ThetaKind::Theta1Plus, x, policy);
    r.product = {w * pr.value, w * pr.error_bound + 2.0 * kUnitRoundoff * w * pr.value, pr.terms_used};
    return r;
}

/// x psi1'(x)/psi1(x) = 3/4 + x theta1+'/theta1+, as anchor + offset.
/// Antisymmetric under x -> 1/x, strictly decreasing, zero at x = 1.
inline Anchored log_deriv_psi1_anchored(PositiveReal x, const TruncationPolicy& policy = {})
{
    Anchored v = detail::log_scale_derivs(ThetaKind::Theta1Plus, x.value(), 1, policy)[1];
    detail::set_anchor(v, detail::anchor_add({0.75, 0.0}, detail::anchor_of(v)));
    return v;
}

inline BoundedValue log_deriv_psi1(PositiveReal x, const TruncationPolicy& policy = {})
{
    BoundedValue out = log_deriv_psi1_anchored(x, policy).bounded();
    detail::require_within(out, policy, "log_deriv_psi1");
    return out;
}

/// det' of the Laplacian, alpha eta(i alpha)^4, evaluated in log space.
/// Throws TolUnreachable if the (psi1/2)^{4/3} cross-check disagrees.
inline DeterminantResult determinant(TorusShape shape, const TruncationPolicy& policy = {})
{
    const double a = shape.alpha.value();
    const detail::LogValue le = detail::log_eta(a, policy);
    const double log_det = std::log(a) + 4.0 * le.log;
    const double rel = 4.0 * le.rel + 3.0 * kUnitRoundoff * (std::abs(std::log(a)) + std::abs(log_det) + 1.0);
    DeterminantResult out;
    out.alpha = shape.alpha;
    out.height = -log_det;
    out.det_value = std::exp(log_det);
    out.error_bound = detail::rel_to_abs(out.det_value, rel + kUnitRoundoff);
    out.route = DeterminantRoute::EtaClosedForm;

    const BoundedValue p = psi1(shape.alpha, policy);
    const double check = std::pow(0.5 * p.value, 4.0 / 3.0);
    const double check_err = detail::rel_to_abs(check, (4.0 / 3.0) * p.error_bound / p.value + 4.0 * kUnitRoundoff);
    if (std::abs(check - out.det_value) > 4.0 * (check_err + out.error_bound)) {
        throw Error(ErrorKind::TolUnreachable, "determinant: eta and psi1 evaluations disagree at alpha = " +
                                                   number_text(a));
    }
    return out;
}

/// Maximizer of the determinant in [lo, hi] by bisection on the sign of
/// x psi1'/psi1.  Returns (argmax, det'(argmax)).
inline std::pair<PositiveReal, double> maximize_determinant(std::pair<PositiveReal, PositiveReal> interval,
                                                            double tol, const TruncationPolicy& policy = {})
{
    double lo = interval.first.value();
    double hi = interval.second.value();
    if (!(tol > 0.0) || !(lo < hi)) {
        throw Error(ErrorKind::Domain, "maximize_determinant needs lo < hi and tol > 0");
    }
    auto slope = [&](double x) { return log_deriv_psi1_anchored(PositiveReal(x), policy).bounded(); };
    const BoundedValue flo = slope(lo);
    const BoundedValue fhi = slope(hi);
    const bool lo_pos = flo.value > flo.error_bound;
    const bool hi_neg = fhi.value < -fhi.error_bound;
    if (!(lo_pos && hi_neg)) {
        throw Error(ErrorKind::BadInterval, "log-derivative of psi1 does not change sign on [" + number_text(lo) +
                                                ", " + number_text(hi) + "]");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const BoundedValue f = slope(mid);
        if (std::abs(f.value) <= f.error_bound) {
            // Sign undecidable: mid is within rounding of the critical point.
            lo = hi = mid;
            break;
        }
        (f.value > 0.0 ? lo : hi) = mid;
    }
    const PositiveReal arg(0.5 * (lo + hi));
    return {arg, determinant(TorusShape{arg}, policy).det_value};
}

} // namespace thetadet
