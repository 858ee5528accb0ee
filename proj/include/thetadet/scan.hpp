// Finite-grid regression scans: monotonicity, sign and bound checks over a
// grid of x values, with margins that account for evaluation error.
#pragma once

#include "thetadet/core.hpp"
#include "thetadet/logscale.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace thetadet {

enum class GridSpacing { Log, Linear };

/// n points from lo to hi inclusive.
inline std::vector<double> make_grid(double lo, double hi, int n, GridSpacing spacing = GridSpacing::Log)
{
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi) || n < 2) {
        throw Error(ErrorKind::Domain, "grid needs 0 < lo < hi and n >= 2");
    }
    std::vector<double> xs(static_cast<std::size_t>(n));
    const double a = spacing == GridSpacing::Log ? std::log(lo) : lo;
    const double b = spacing == GridSpacing::Log ? std::log(hi) : hi;
    for (int i = 0; i < n; ++i) {
        const double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
        xs[static_cast<std::size_t>(i)] = spacing == GridSpacing::Log ? std::exp(t) : t;
    }
    xs.front() = lo;
    xs.back() = hi;
    return xs;
}

inline std::vector<double> log_grid(double lo, double hi, int n) { return make_grid(lo, hi, n, GridSpacing::Log); }

enum class Trend { StrictlyIncreasing, StrictlyDecreasing };
enum class Sign { Positive, Negative };

struct ScanPoint {
    double x = 0.0;
    double value = 0.0;
    double error = 0.0;
};

/// Outcome of one scan.  min_margin is the smallest slack over the checked
/// relations (consecutive differences, signs or bounds) after subtracting
/// error allowances; the scan passes iff it is positive.
struct ScanReport {
    std::string curve;
    std::vector<ScanPoint> points;
    bool pass = true;
    double min_margin = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> first_violation;
    std::size_t argmax = 0;
};

using AnchoredCurve = std::function<Anchored(double)>;

/// Anchored value times a factor c.
inline Anchored scaled(const Anchored& v, double c)
{
    Anchored out{0.0, v.offset * c, 0.0, 0.0, v.terms};
    detail::set_anchor(out, detail::anchor_mul(detail::anchor_of(v), c));
    out.error = std::abs(c) * v.error + kUnitRoundoff * std::abs(out.offset);
    return out;
}

namespace detail {

inline void record(ScanReport& rep, std::size_t i, double margin)
{
    if (margin < rep.min_margin) {
        rep.min_margin = margin;
    }
    if (!(margin > 0.0)) {
        rep.pass = false;
        if (!rep.first_violation) {
            rep.first_violation = i;
        }
    }
}

inline std::size_t argmax_of(const std::vector<ScanPoint>& pts)
{
    const auto it = std::max_element(pts.begin(), pts.end(),
                                     [](const ScanPoint& a, const ScanPoint& b) { return a.value < b.value; });
    return static_cast<std::size_t>(it - pts.begin());
}

} // namespace detail

/// Strict monotonicity on consecutive grid points.  A step counts only if
/// the difference exceeds 10x the summed error bounds (plus one rounding of
/// the anchors when they differ).
inline ScanReport scan_monotone(const std::string& name, const std::vector<double>& grid, const AnchoredCurve& f,
                                Trend trend)
{
    ScanReport rep;
    rep.curve = name;
    rep.points.reserve(grid.size());
    std::optional<Anchored> prev;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Anchored cur = f(grid[i]);
        rep.points.push_back({grid[i], cur.value(), cur.error});
        if (prev) {
            double d = (cur.anchor - prev->anchor) + (cur.offset - prev->offset);
            if (trend == Trend::StrictlyDecreasing) {
                d = -d;
            }
            // Equal anchors are the same closed-form constant, so their
            // rounding cancels exactly in the difference.
            double allowance = 10.0 * (cur.error + prev->error);
            if (cur.anchor != prev->anchor) {
                allowance += 10.0 * (cur.anchor_error + prev->anchor_error) +
                             2.0 * kUnitRoundoff * std::abs(cur.anchor - prev->anchor);
            }
            detail::record(rep, i, d - allowance);
        }
        prev = cur;
    }
    rep.argmax = detail::argmax_of(rep.points);
    return rep;
}

/// Every grid value has the requested sign with |value| > error.
inline ScanReport scan_sign(const std::string& name, const std::vector<double>& grid, const AnchoredCurve& f,
                            Sign sign)
{
    ScanReport rep;
    rep.curve = name;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Anchored v = f(grid[i]);
        rep.points.push_back({grid[i], v.value(), v.error});
        // Compare -anchor with offset so tiny offsets next to a nonzero
        // anchor are resolved.
        const double s = sign == Sign::Positive ? v.offset - (-v.anchor) : (-v.anchor) - v.offset;
        detail::record(rep, i, s - v.error - v.anchor_error - kUnitRoundoff * std::abs(s));
    }
    rep.argmax = detail::argmax_of(rep.points);
    return rep;
}

/// lo < value < hi at every grid point, with error subtracted from both sides.
inline ScanReport scan_between(const std::string& name, const std::vector<double>& grid, const AnchoredCurve& f,
                               double lo, double hi)
{
    ScanReport rep;
    rep.curve = name;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Anchored v = f(grid[i]);
        rep.points.push_back({grid[i], v.value(), v.error});
        // Each side is (anchor - bound) + offset with its own exact rounding.
        const double a_lo = v.anchor - lo;
        const double a_hi = hi - v.anchor;
        const double below = a_lo + v.offset;
        const double above = a_hi - v.offset;
        const double common = v.error + v.anchor_error;
        const double m_lo = below - detail::add_rounding(v.anchor, -lo, a_lo) - detail::add_rounding(a_lo, v.offset, below);
        const double m_hi = above - detail::add_rounding(hi, -v.anchor, a_hi) - detail::add_rounding(a_hi, -v.offset, above);
        detail::record(rep, i, std::min(m_lo, m_hi) - common);
    }
    rep.argmax = detail::argmax_of(rep.points);
    return rep;
}

// Named curves used by the monotonicity results.

/// x theta'/theta.
inline AnchoredCurve x_log_deriv_curve(ThetaKind kind, const TruncationPolicy& policy = {})
{
    return [=](double x) { return xddx_log_theta_anchored(kind, DerivOrder(1), PositiveReal(x), policy); };
}

/// theta'/theta.
inline AnchoredCurve log_deriv_curve(ThetaKind kind, const TruncationPolicy& policy = {})
{
    return [=](double x) { return log_deriv_anchored(kind, PositiveReal(x), policy); };
}

/// x^2 theta'/theta.
inline AnchoredCurve x2_log_deriv_curve(ThetaKind kind, const TruncationPolicy& policy = {})
{
    return [=](double x) { return scaled(xddx_log_theta_anchored(kind, DerivOrder(1), PositiveReal(x), policy), x); };
}

/// (x d/dx)^n log theta.
inline AnchoredCurve xddx_curve(ThetaKind kind, int n, const TruncationPolicy& policy = {})
{
    return [=](double x) { return xddx_log_theta_anchored(kind, DerivOrder(n), PositiveReal(x), policy); };
}

/// x^2 d^2/dx^2 log theta: x^2 g2 on the direct route, L2 - L1 when
/// transported (the direct form has no anchor to cancel).
inline AnchoredCurve x2_second_log_deriv_curve(ThetaKind kind, const TruncationPolicy& policy = {})
{
    return [=](double x) {
        if (!detail::transport(policy, x)) {
            const detail::DerivArray g =
                detail::log_derivs_direct(kind, x, 2, policy.target_abs_tol, policy.max_terms, 0.0);
            return scaled(scaled(g[2], x), x);
        }
        const detail::DerivArray L = detail::log_scale_derivs(kind, x, 2, policy);
        Anchored out{0.0, L[2].offset - L[1].offset, 0.0, 0.0, L[2].terms};
        detail::set_anchor(out, detail::anchor_add(detail::anchor_of(L[2]), detail::anchor_mul(detail::anchor_of(L[1]), -1.0)));
        out.error = L[1].error + L[2].error + kUnitRoundoff * std::abs(out.offset);
        return out;
    };
}

} // namespace thetadet
