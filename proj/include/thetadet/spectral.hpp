// Spectral route to the torus determinant: explicit eigenvalues, heat
// traces, lattice zeta sums for s > 1 and Z'(0) by a Mellin split at t = 1.
//
// With Theta(t) = sum exp(-t lambda) = theta3(4 pi t/alpha) theta3(4 pi t alpha)
// and the unit-area Weyl term 1/(4 pi t):
//
//   Z'(0) = I1 + I2 - 1/(4 pi) - gamma,
//   I1 = int_0^1 (Theta(t) - 1/(4 pi t)) dt/t,   I2 = int_1^inf (Theta(t) - 1) dt/t.
//
// Near t = 0 the first integrand is evaluated through the reflection
//   Theta(t) - 1/(4 pi t) = (theta3(alpha/(4 pi t)) theta3(1/(4 pi t alpha)) - 1) / (4 pi t).
#pragma once

#include "thetadet/core.hpp"
#include "thetadet/eta.hpp"
#include "thetadet/theta.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdlib>
#include <string>

namespace thetadet {

/// Lattice indices |m|, |n| <= radius.
class LatticeCutoff {
public:
    explicit LatticeCutoff(int radius) : radius_(radius)
    {
        if (radius < 1) {
            throw Error(ErrorKind::Domain, "lattice cutoff radius must be >= 1");
        }
    }

    [[nodiscard]] int radius() const noexcept { return radius_; }

private:
    int radius_;
};

struct HeatTraceValue {
    double t = 0.0;
    double value = 1.0;
    double tail_bound = 0.0;  // truncation plus rounding
};

/// 4 pi^2 (m^2/alpha + n^2 alpha).
inline double eigenvalue(long m, long n, TorusShape shape)
{
    const double a = shape.alpha.value();
    const double dm = static_cast<double>(m);
    const double dn = static_cast<double>(n);
    return 4.0 * kPi * kPi * (dm * dm / a + dn * dn * a);
}

namespace detail {

inline void require_positive_time(double t)
{
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw Error(ErrorKind::Domain, "diffusion time t must be finite and > 0");
    }
}

/// 2 sum_{k > R} e^{-c k^2} <= 2 e^{-c (R+1)^2} / (1 - e^{-c (2R+3)}).
inline double gaussian_tail(double c, int R)
{
    const double r1 = static_cast<double>(R) + 1.0;
    return 2.0 * std::exp(-c * r1 * r1) / -std::expm1(-c * (2.0 * R + 3.0));
}

inline double truncated_gaussian_sum(double c, int R)
{
    CompensatedSum<double> s;
    for (int k = R; k >= 1; --k) {
        s.add(2.0 * std::exp(-c * k * k));
    }
    s.add(1.0);
    return s.value();
}

} // namespace detail

/// Brute-force double sum over the lattice box.
inline HeatTraceValue heat_trace_direct(TorusShape shape, double t, LatticeCutoff cutoff)
{
    detail::require_positive_time(t);
    const int R = cutoff.radius();
    detail::CompensatedSum<double> sum;
    for (int m = -R; m <= R; ++m) {
        for (int n = -R; n <= R; ++n) {
            const double lt = t * eigenvalue(m, n, shape);
            sum.add(std::exp(-lt), 4.0 + 2.0 * lt);
        }
    }
    // Factorized tail: S_a S_b - S_a^R S_b^R <= T_a (S_b^R + T_b) + S_a^R T_b.
    const double a = shape.alpha.value();
    const double ca = 4.0 * kPi * kPi * t / a;
    const double cb = 4.0 * kPi * kPi * t * a;
    const double ta = detail::gaussian_tail(ca, R);
    const double tb = detail::gaussian_tail(cb, R);
    const double sa = detail::truncated_gaussian_sum(ca, R);
    const double sb = detail::truncated_gaussian_sum(cb, R);
    const double tail = ta * (sb + tb) + sa * tb;
    return {t, sum.value(), tail + sum.rounding_bound(kUnitRoundoff)};
}

/// theta3(4 pi t/alpha) theta3(4 pi t alpha).
inline BoundedValue heat_trace_theta(TorusShape shape, double t, const TruncationPolicy& policy = {})
{
    detail::require_positive_time(t);
    const double a = shape.alpha.value();
    const BoundedValue u = theta_series(ThetaKind::Theta3, PositiveReal(4.0 * kPi * t / a), policy);
    const BoundedValue v = theta_series(ThetaKind::Theta3, PositiveReal(4.0 * kPi * t * a), policy);
    const double value = u.value * v.value;
    const double err = u.error_bound * v.value + v.error_bound * u.value + u.error_bound * v.error_bound +
                       2.0 * kUnitRoundoff * value;
    return {value, err, std::max(u.terms_used, v.terms_used)};
}

namespace detail {

/// theta3(a) theta3(b) - 1 without cancellation.
inline BoundedValue theta3_pair_minus_one(double a, double b, const TruncationPolicy& policy)
{
    const BoundedValue u = theta_minus_one(ThetaKind::Theta3, PositiveReal(a), policy);
    const BoundedValue v = theta_minus_one(ThetaKind::Theta3, PositiveReal(b), policy);
    const double value = u.value + v.value + u.value * v.value;
    const double err = u.error_bound * (1.0 + v.value) + v.error_bound * (1.0 + u.value) +
                       u.error_bound * v.error_bound + 3.0 * kUnitRoundoff * value;
    return {value, err, std::max(u.terms_used, v.terms_used)};
}

} // namespace detail

/// Theta(t) - 1/(4 pi t) by the reflected form; -> 0 as t -> 0+.
inline BoundedValue heat_trace_minus_weyl(TorusShape shape, double t, const TruncationPolicy& policy = {})
{
    detail::require_positive_time(t);
    const double a = shape.alpha.value();
    const double w = 1.0 / (4.0 * kPi * t);
    const BoundedValue p = detail::theta3_pair_minus_one(a * w, w / a, policy);
    return {w * p.value, w * p.error_bound + 2.0 * kUnitRoundoff * w * p.value, p.terms_used};
}

/// Theta(t) - 1 (zero mode removed).
inline BoundedValue heat_trace_minus_one(TorusShape shape, double t, const TruncationPolicy& policy = {})
{
    detail::require_positive_time(t);
    const double a = shape.alpha.value();
    return detail::theta3_pair_minus_one(4.0 * kPi * t / a, 4.0 * kPi * t * a, policy);
}

/// Truncated Z(s) = sum' lambda^{-s}, s > 1.  The tail over max(|m|,|n|) > R
/// is bounded by (4 pi^2 c)^{-s} 8 R^{2-2s}/(2s - 2), c = min(alpha, 1/alpha).
inline BoundedValue lattice_zeta(TorusShape shape, double s, LatticeCutoff cutoff)
{
    if (!(s > 1.0) || !std::isfinite(s)) {
        throw Error(ErrorKind::Domain, "lattice_zeta needs s > 1");
    }
    const int R = cutoff.radius();
    detail::CompensatedSum<double> sum;
    // Outer shells first so small terms accumulate before large ones.
    for (int k = R; k >= 1; --k) {
        for (int m = -k; m <= k; ++m) {
            for (int n : {-k, k}) {
                sum.add(std::pow(eigenvalue(m, n, shape), -s), 4.0 + 2.0 * s);
            }
        }
        for (int n = -k + 1; n <= k - 1; ++n) {
            for (int m : {-k, k}) {
                sum.add(std::pow(eigenvalue(m, n, shape), -s), 4.0 + 2.0 * s);
            }
        }
    }
    const double a = shape.alpha.value();
    const double c = std::min(a, 1.0 / a);
    const double tail = std::pow(4.0 * kPi * kPi * c, -s) * 8.0 * std::pow(static_cast<double>(R), 2.0 - 2.0 * s) /
                        (2.0 * s - 2.0);
    return {sum.value(), tail + sum.rounding_bound(kUnitRoundoff), sum.count()};
}

/// Eisenstein normalization E = (2 pi)^{2s} Z(s).
inline BoundedValue eisenstein_sum(TorusShape shape, double s, LatticeCutoff cutoff)
{
    const BoundedValue z = lattice_zeta(shape, s, cutoff);
    const double f = std::pow(2.0 * kPi, 2.0 * s);
    return {f * z.value, f * z.error_bound + 2.0 * kUnitRoundoff * f * z.value, z.terms_used};
}

/// exp(-Z'(0)) by the Mellin split; independent of the eta closed form.
inline DeterminantResult zeta_det(TorusShape shape, double quad_tol)
{
    if (!(quad_tol > 0.0)) {
        throw Error(ErrorKind::Domain, "quad_tol must be > 0");
    }
    // Integrands are O(1) binary64 values; refinement cannot beat their rounding.
    constexpr double kQuadFloor = 64.0 * kUnitRoundoff;
    if (quad_tol < kQuadFloor) {
        throw Error(ErrorKind::QuadratureFailure, "zeta_det: quad_tol " + number_text(quad_tol) +
                                                      " is below the rounding floor " + number_text(kQuadFloor));
    }
    TruncationPolicy policy;
    policy.target_abs_tol = 1e-16;
    const double a = shape.alpha.value();
    const double c = 4.0 * kPi * kPi * std::min(a, 1.0 / a);  // smallest nonzero eigenvalue

    using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
    constexpr unsigned kMaxDepth = 15;
    const double rel_tol = quad_tol / 16.0;

    double err1 = 0.0;
    auto f1 = [&](double t) { return heat_trace_minus_weyl(shape, t, policy).value / t; };
    const double i1 = Quad::integrate(f1, 0.0, 1.0, kMaxDepth, rel_tol, &err1);

    // Cut I2 at T: the discarded tail is <= (Theta(T) - 1)/(c T).
    double upper = 1.0;
    double tail = 0.0;
    for (int it = 0; it < 64; ++it) {
        upper *= 2.0;
        tail = heat_trace_minus_one(shape, upper, policy).value / (c * upper);
        if (tail <= quad_tol / 16.0) {
            break;
        }
    }
    double err2 = 0.0;
    auto f2 = [&](double t) { return heat_trace_minus_one(shape, t, policy).value / t; };
    const double i2 = Quad::integrate(f2, 1.0, upper, kMaxDepth, rel_tol, &err2);

    const double total_err = err1 + err2 + tail;
    if (!std::isfinite(i1) || !std::isfinite(i2) || !(total_err <= quad_tol)) {
        throw Error(ErrorKind::QuadratureFailure, "zeta_det: quadrature error " + number_text(total_err) +
                                                      " exceeds quad_tol " + number_text(quad_tol));
    }
    const double gamma = boost::math::constants::euler<double>();
    const double zp = i1 + i2 - 1.0 / (4.0 * kPi) - gamma;
    DeterminantResult out;
    out.alpha = shape.alpha;
    out.det_value = std::exp(-zp);
    out.height = zp;
    out.route = DeterminantRoute::SpectralZeta;
    out.error_bound = detail::rel_to_abs(out.det_value, total_err + 8.0 * kUnitRoundoff);
    return out;
}

} // namespace thetadet
