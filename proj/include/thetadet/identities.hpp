// Residual checks for the functional identities between theta functions.
// Both sides of every identity are evaluated by the direct series at the
// literal arguments (no x -> 1/x transport), so the check is not circular.
#pragma once

#include "thetadet/core.hpp"
#include "thetadet/logscale.hpp"
#include "thetadet/scan.hpp"
#include "thetadet/theta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace thetadet {

enum class IdentityKind {
    PoissonTheta3,
    PoissonTheta2To4,
    PoissonTheta4To2,
    LogDerivTheta3,
    LogDerivTheta2Theta4,
    LogDerivTheta4Theta2,
    TripleProductEquivalence,
    Theta1Factorization,
    GeneralizedJacobi,
    RatioUnimodal,
};

inline constexpr std::array<IdentityKind, 10> kAllIdentities = {
    IdentityKind::PoissonTheta3,        IdentityKind::PoissonTheta2To4,         IdentityKind::PoissonTheta4To2,
    IdentityKind::LogDerivTheta3,       IdentityKind::LogDerivTheta2Theta4,     IdentityKind::LogDerivTheta4Theta2,
    IdentityKind::TripleProductEquivalence, IdentityKind::Theta1Factorization, IdentityKind::GeneralizedJacobi,
    IdentityKind::RatioUnimodal,
};

inline const char* to_string(IdentityKind kind) noexcept
{
    switch (kind) {
    case IdentityKind::PoissonTheta3: return "PoissonTheta3";
    case IdentityKind::PoissonTheta2To4: return "PoissonTheta2To4";
    case IdentityKind::PoissonTheta4To2: return "PoissonTheta4To2";
    case IdentityKind::LogDerivTheta3: return "LogDerivTheta3";
    case IdentityKind::LogDerivTheta2Theta4: return "LogDerivTheta2Theta4";
    case IdentityKind::LogDerivTheta4Theta2: return "LogDerivTheta4Theta2";
    case IdentityKind::TripleProductEquivalence: return "TripleProductEquivalence";
    case IdentityKind::Theta1Factorization: return "Theta1Factorization";
    case IdentityKind::GeneralizedJacobi: return "GeneralizedJacobi";
    case IdentityKind::RatioUnimodal: return "RatioUnimodal";
    }
    return "?";
}

struct ResidualReport {
    IdentityKind identity{};
    double x = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double allowed = 0.0;

    [[nodiscard]] bool pass() const noexcept { return residual <= allowed; }
};

/// Safety factor applied to first-order propagated error bounds.
inline constexpr double kAllowanceFactor = 4.0;

/// Default (alpha, beta) for the per-point RatioUnimodal check.
inline constexpr double kRatioAlpha = 1.2;
inline constexpr double kRatioBeta = 2.0;

/// A positive function with its logarithmic derivative, for the callable
/// form of check_generalized_jacobi.
struct DualFunction {
    std::function<BoundedValue(double)> value;
    std::function<BoundedValue(double)> log_deriv;  // f'(x)/f(x)
};

namespace detail {

inline ResidualReport make_report(IdentityKind id, double x, double lhs, double rhs, double lhs_err, double rhs_err)
{
    ResidualReport rep{id, x, lhs, rhs, std::abs(lhs - rhs), 0.0};
    const double rounding = 2.0 * kUnitRoundoff * (std::abs(lhs) + std::abs(rhs));
    rep.allowed = kAllowanceFactor * (lhs_err + rhs_err + rounding);
    return rep;
}

/// Worse of two reports by residual/allowed ratio.
inline const ResidualReport& worse(const ResidualReport& a, const ResidualReport& b)
{
    return (b.residual - b.allowed > a.residual - a.allowed) ? b : a;
}

inline BoundedValue direct_value(ThetaKind kind, double x, const TruncationPolicy& policy)
{
    const ThetaEval ev = theta_eval(kind, PositiveReal(x), policy.direct());
    return {ev.value(), ev.error(), ev.parts.terms};
}

inline BoundedValue direct_log_deriv(ThetaKind kind, double x, const TruncationPolicy& policy)
{
    return log_derivs_direct(kind, x, 1, policy.target_abs_tol, policy.max_terms, 0.0)[1].bounded();
}

/// x^r f(x) = g(1/x) at the value level.
inline ResidualReport premise(IdentityKind id, double r, const DualFunction& f, const DualFunction& g, double x)
{
    const BoundedValue fv = f.value(x);
    const BoundedValue gv = g.value(1.0 / x);
    const double w = std::pow(x, r);
    return make_report(id, x, w * fv.value, gv.value, w * fv.error_bound + 2.0 * kUnitRoundoff * w * std::abs(fv.value),
                       gv.error_bound);
}

/// x f'(x)/f(x) + (1/x) g'(1/x)/g(1/x) = -r.
inline ResidualReport conclusion(IdentityKind id, double r, const DualFunction& f, const DualFunction& g, double x)
{
    const BoundedValue fd = f.log_deriv(x);
    const BoundedValue gd = g.log_deriv(1.0 / x);
    const double lhs = x * fd.value + gd.value / x;
    const double err = x * fd.error_bound + gd.error_bound / x +
                       2.0 * kUnitRoundoff * (std::abs(x * fd.value) + std::abs(gd.value / x));
    return make_report(id, x, lhs, -r, err, 0.0);
}

inline DualFunction theta_dual(ThetaKind kind, const TruncationPolicy& policy)
{
    return {[=](double t) { return direct_value(kind, t, policy); },
            [=](double t) { return direct_log_deriv(kind, t, policy); }};
}

inline ResidualReport check_poisson(IdentityKind id, ThetaKind f, ThetaKind g, double x, const TruncationPolicy& p)
{
    return premise(id, 0.5, theta_dual(f, p), theta_dual(g, p), x);
}

inline ResidualReport check_log_deriv(IdentityKind id, ThetaKind f, ThetaKind g, double x, const TruncationPolicy& p)
{
    return conclusion(id, 0.5, theta_dual(f, p), theta_dual(g, p), x);
}

} // namespace detail

/// Lemma form: if x^r f(x) = g(1/x) then x f'/f(x) + (1/x) g'/g(1/x) = -r.
/// The premise is checked at x first; HypothesisFailed if it does not hold.
inline ResidualReport check_generalized_jacobi(double r, const DualFunction& f, const DualFunction& g, PositiveReal x)
{
    const ResidualReport pre = detail::premise(IdentityKind::GeneralizedJacobi, r, f, g, x.value());
    if (!pre.pass()) {
        throw Error(ErrorKind::HypothesisFailed, "x^r f(x) = g(1/x) fails at x = " + number_text(x.value()) +
                                                     " (residual " + number_text(pre.residual) + ")");
    }
    return detail::conclusion(IdentityKind::GeneralizedJacobi, r, f, g, x.value());
}

inline ResidualReport check_generalized_jacobi(double r, ThetaKind f_kind, ThetaKind g_kind, PositiveReal x,
                                               const TruncationPolicy& policy = {})
{
    return check_generalized_jacobi(r, detail::theta_dual(f_kind, policy), detail::theta_dual(g_kind, policy), x);
}

/// g(x) = theta3(beta x) theta3(x/beta) / (theta3(alpha x) theta3(x/alpha)).
inline BoundedValue ratio_g(double alpha, double beta, PositiveReal x, const TruncationPolicy& policy = {})
{
    if (!(alpha >= 1.0) || !(beta >= alpha) || !std::isfinite(beta)) {
        throw Error(ErrorKind::Domain, "ratio_g needs 1 <= alpha <= beta");
    }
    const double t = x.value();
    const BoundedValue a = theta_series(ThetaKind::Theta3, PositiveReal(beta * t), policy);
    const BoundedValue b = theta_series(ThetaKind::Theta3, PositiveReal(t / beta), policy);
    const BoundedValue c = theta_series(ThetaKind::Theta3, PositiveReal(alpha * t), policy);
    const BoundedValue d = theta_series(ThetaKind::Theta3, PositiveReal(t / alpha), policy);
    const double value = (a.value * b.value) / (c.value * d.value);
    // theta3 >= 1, so relative errors are at most the absolute ones.
    const double rel = a.error_bound / a.value + b.error_bound / b.value + c.error_bound / c.value +
                       d.error_bound / d.value + 6.0 * kUnitRoundoff;
    return {value, detail::rel_to_abs(value, 1.01 * rel), std::max({a.terms_used, b.terms_used, c.terms_used, d.terms_used})};
}

/// Residual of one identity at x.  Identities with several instances report
/// the worst instance (TripleProductEquivalence over z in {0, 1/4, 1/2};
/// GeneralizedJacobi over the pairs theta3/theta3, theta2/theta4,
/// theta4/theta2 with r = 1/2 and theta1+ with r = 3/2).  RatioUnimodal
/// checks the symmetry g(x) = g(1/x) for the default (alpha, beta); the
/// unimodality itself is a grid property, see ratio_unimodal_scan.
inline ResidualReport check_identity(IdentityKind id, PositiveReal xp, const TruncationPolicy& policy = {})
{
    const double x = xp.value();
    const TruncationPolicy p = policy.direct();
    using TK = ThetaKind;
    switch (id) {
    case IdentityKind::PoissonTheta3: return detail::check_poisson(id, TK::Theta3, TK::Theta3, x, p);
    case IdentityKind::PoissonTheta2To4: return detail::check_poisson(id, TK::Theta2, TK::Theta4, x, p);
    case IdentityKind::PoissonTheta4To2: return detail::check_poisson(id, TK::Theta4, TK::Theta2, x, p);
    case IdentityKind::LogDerivTheta3: return detail::check_log_deriv(id, TK::Theta3, TK::Theta3, x, p);
    case IdentityKind::LogDerivTheta2Theta4: return detail::check_log_deriv(id, TK::Theta2, TK::Theta4, x, p);
    case IdentityKind::LogDerivTheta4Theta2: return detail::check_log_deriv(id, TK::Theta4, TK::Theta2, x, p);
    case IdentityKind::TripleProductEquivalence: {
        ResidualReport worst{};
        bool first = true;
        for (double z : {0.0, 0.25, 0.5}) {
            const BoundedValue s = big_theta_real(z, xp, p);
            // The product is never transformed and converges slowly for
            // small x, so it gets a looser (still << 1e-10) tolerance.
            const BoundedValue q = big_theta_product(z, xp, p.with_tol(std::max(p.target_abs_tol, 1e-11)));
            const ResidualReport rep = detail::make_report(id, x, s.value, q.value, s.error_bound, q.error_bound);
            worst = first ? rep : detail::worse(worst, rep);
            first = false;
        }
        return worst;
    }
    case IdentityKind::Theta1Factorization: {
        const BoundedValue t2 = detail::direct_value(TK::Theta2, x, p);
        const BoundedValue t3 = detail::direct_value(TK::Theta3, x, p);
        const BoundedValue t4 = detail::direct_value(TK::Theta4, x, p);
        const BoundedValue t1 = detail::direct_value(TK::Theta1Plus, x, p);
        const double lhs = t2.value * t3.value * t4.value;
        const double err = t2.error_bound * std::abs(t3.value * t4.value) +
                           t3.error_bound * std::abs(t2.value * t4.value) +
                           t4.error_bound * std::abs(t2.value * t3.value) + 2.0 * kUnitRoundoff * std::abs(lhs);
        return detail::make_report(id, x, lhs, t1.value, err, t1.error_bound);
    }
    case IdentityKind::GeneralizedJacobi: {
        ResidualReport worst = check_generalized_jacobi(0.5, TK::Theta3, TK::Theta3, xp, p);
        worst = detail::worse(worst, check_generalized_jacobi(0.5, TK::Theta2, TK::Theta4, xp, p));
        worst = detail::worse(worst, check_generalized_jacobi(0.5, TK::Theta4, TK::Theta2, xp, p));
        worst = detail::worse(worst, check_generalized_jacobi(1.5, TK::Theta1Plus, TK::Theta1Plus, xp, p));
        return worst;
    }
    case IdentityKind::RatioUnimodal: {
        const BoundedValue a = ratio_g(kRatioAlpha, kRatioBeta, xp, policy);
        const BoundedValue b = ratio_g(kRatioAlpha, kRatioBeta, xp.reciprocal(), policy);
        return detail::make_report(id, x, a.value, b.value, a.error_bound, b.error_bound);
    }
    }
    throw Error(ErrorKind::Domain, "unknown identity");
}

/// Scan of ratio_g over a grid.  Passes iff the grid maximum sits at a point
/// nearest x = 1 and no consecutive step goes against the expected trend
/// (up below 1, down above 1) by more than the summed error bounds.  Far
/// from 1 the curve is flat to below rounding, so steps there are not
/// required to be resolved.  Pairs straddling 1 are skipped: g(x) = g(1/x)
/// makes them ties on symmetric grids.
inline ScanReport ratio_unimodal_scan(double alpha, double beta, const std::vector<double>& grid,
                                      const TruncationPolicy& policy = {})
{
    ScanReport rep;
    rep.curve = "ratio_g";
    double nearest = std::numeric_limits<double>::infinity();
    for (double x : grid) {
        const BoundedValue v = ratio_g(alpha, beta, PositiveReal(x), policy);
        rep.points.push_back({x, v.value, v.error_bound});
        nearest = std::min(nearest, std::abs(std::log(x)));
    }
    rep.argmax = detail::argmax_of(rep.points);
    for (std::size_t i = 1; i < rep.points.size(); ++i) {
        const ScanPoint& a = rep.points[i - 1];
        const ScanPoint& b = rep.points[i];
        if (a.x < 1.0 && b.x > 1.0) {
            continue;
        }
        const double d = b.x <= 1.0 ? b.value - a.value : a.value - b.value;
        detail::record(rep, i, d + (a.error + b.error));
    }
    if (std::abs(std::log(grid[rep.argmax])) > nearest * (1.0 + 1e-9)) {
        rep.pass = false;
    }
    return rep;
}

} // namespace thetadet
