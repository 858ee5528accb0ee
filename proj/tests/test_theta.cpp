#include "oracles.hpp"

#include "thetadet/theta.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace thetadet;

namespace {

TruncationPolicy tol(double t) { return TruncationPolicy{}.with_tol(t); }

const ThetaKind kAllKinds[] = {ThetaKind::Theta2, ThetaKind::Theta3, ThetaKind::Theta4, ThetaKind::Theta1Plus};

oracle::Kind to_oracle(ThetaKind k)
{
    switch (k) {
    case ThetaKind::Theta2: return oracle::Kind::T2;
    case ThetaKind::Theta3: return oracle::Kind::T3;
    case ThetaKind::Theta4: return oracle::Kind::T4;
    default: return oracle::Kind::T1P;
    }
}

} // namespace

TEST(PositiveReal, RejectsNonPositiveAndNonFinite)
{
    EXPECT_THROW(PositiveReal{0.0}, Error);
    EXPECT_THROW(PositiveReal{-1.0}, Error);
    EXPECT_THROW(PositiveReal{std::nan("")}, Error);
    EXPECT_THROW(PositiveReal{std::numeric_limits<double>::infinity()}, Error);
    EXPECT_DOUBLE_EQ(PositiveReal(2.0).reciprocal().value(), 0.5);
}

TEST(TruncationPolicy, Validates)
{
    EXPECT_THROW(theta_series(ThetaKind::Theta3, PositiveReal(1.0), tol(0.0)), Error);
    TruncationPolicy p;
    p.max_terms = 0;
    EXPECT_THROW(theta_series(ThetaKind::Theta3, PositiveReal(1.0), p), Error);
}

TEST(ThetaSeries, Theta3AtLargeArgumentIsOne)
{
    const BoundedValue v = theta_series(ThetaKind::Theta3, PositiveReal(50.0), tol(1e-15));
    EXPECT_NEAR(v.value, 1.0, 1e-15);
    EXPECT_LE(v.error_bound, 1e-15);
    EXPECT_GE(v.terms_used, 1);
}

TEST(ThetaSeries, Theta2AtOneMatchesExtendedOracle)
{
    const BoundedValue v = theta_series(ThetaKind::Theta2, PositiveReal(1.0), tol(1e-13));
    const double ref = oracle::d(oracle::theta(oracle::Kind::T2, 1.0));
    EXPECT_LE(std::abs(v.value - ref), 1e-13);
    EXPECT_LE(std::abs(v.value - ref), v.error_bound);
}

TEST(ThetaSeries, Theta3AtSelfDualPoint)
{
    const BoundedValue v = theta_series(ThetaKind::Theta3, PositiveReal(1.0), tol(1e-13));
    // theta3(1) = pi^{1/4} / Gamma(3/4).
    const double exact = std::pow(M_PI, 0.25) / std::tgamma(0.75);
    EXPECT_NEAR(v.value, exact, 1e-13);
}

TEST(ThetaSeries, Theta1PlusFactorizes)
{
    const PositiveReal x(1.0);
    const double t1 = theta_series(ThetaKind::Theta1Plus, x, tol(1e-13)).value;
    const double prod = theta_series(ThetaKind::Theta2, x, tol(1e-13)).value *
                        theta_series(ThetaKind::Theta3, x, tol(1e-13)).value *
                        theta_series(ThetaKind::Theta4, x, tol(1e-13)).value;
    EXPECT_NEAR(t1, prod, 3e-13);
}

TEST(ThetaSeries, MatchesOracleAcrossRangeWithinReportedBound)
{
    for (ThetaKind k : kAllKinds) {
        for (double x : {0.05, 0.1, 0.3, 0.7, 1.0, 1.5, 3.0, 8.0, 20.0}) {
            const BoundedValue v = theta_series(k, PositiveReal(x), tol(1e-14));
            EXPECT_LE(oracle::gap(v.value, oracle::theta(to_oracle(k), x)), v.error_bound) << to_string(k) << " x=" << x;
            EXPECT_LE(v.error_bound, 1e-14);
        }
    }
}

TEST(ThetaSeries, DirectRouteAgreesWithDualRoute)
{
    for (ThetaKind k : kAllKinds) {
        for (double x : {0.2, 0.5, 0.9}) {
            const BoundedValue a = theta_series(k, PositiveReal(x), tol(1e-13));
            const BoundedValue b = theta_series(k, PositiveReal(x), tol(1e-13).direct());
            EXPECT_LE(std::abs(a.value - b.value), a.error_bound + b.error_bound) << to_string(k) << " x=" << x;
        }
    }
}

TEST(ThetaSeries, ExtendedPrecisionTracksOracle)
{
    // The result is rounded to binary64, so the best possible bound is about
    // one rounding of the value; the extended kernel should get there.
    TruncationPolicy p = tol(1e-15);
    p.extended_precision = true;
    for (ThetaKind k : kAllKinds) {
        const BoundedValue v = theta_series(k, PositiveReal(1.3), p);
        const double ref = oracle::d(oracle::theta(to_oracle(k), 1.3));
        EXPECT_LE(std::abs(v.value - ref), v.error_bound) << to_string(k);
        EXPECT_LE(std::abs(v.value - ref), 2.3e-16 * std::abs(ref)) << to_string(k);
    }
}

TEST(ThetaSeries, ToleranceBelowRoundingIsRefused)
{
    TruncationPolicy p = tol(1e-28);
    p.extended_precision = true;
    try {
        (void)theta_series(ThetaKind::Theta3, PositiveReal(1.3), p);
        FAIL() << "expected TolUnreachable";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TolUnreachable);
    }
}

TEST(ThetaSeries, TolUnreachableWhenTermsRunOut)
{
    TruncationPolicy p = tol(1e-15).direct();
    p.max_terms = 1;
    try {
        (void)theta_series(ThetaKind::Theta3, PositiveReal(0.05), p);
        FAIL() << "expected TolUnreachable";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TolUnreachable);
    }
}

TEST(ThetaSeries, OrderingAndLimits)
{
    for (double x : {0.05, 0.2, 1.0, 4.0, 20.0}) {
        const PositiveReal px(x);
        EXPECT_GT(theta_series(ThetaKind::Theta2, px).value, 0.0);
        // Compared through theta - 1, which stays resolvable at large x.
        EXPECT_GT(theta_minus_one(ThetaKind::Theta3, px).value, 0.0);
        EXPECT_GT(theta_series(ThetaKind::Theta4, px).value, 0.0);
        EXPECT_LT(theta_minus_one(ThetaKind::Theta4, px).value, 0.0);
        EXPECT_GT(theta_series(ThetaKind::Theta1Plus, px).value, 0.0);
    }
    EXPECT_NEAR(theta_series(ThetaKind::Theta2, PositiveReal(40.0)).value, 0.0, 1e-13);
    EXPECT_NEAR(theta_series(ThetaKind::Theta4, PositiveReal(40.0)).value, 1.0, 1e-13);
}

TEST(ThetaSeries, HalvingToleranceStaysInsideOldBound)
{
    for (ThetaKind k : kAllKinds) {
        for (double x : {0.1, 1.0, 5.0}) {
            double t = 1e-4;
            BoundedValue prev = theta_series(k, PositiveReal(x), tol(t));
            for (int i = 0; i < 30; ++i) {
                t *= 0.5;
                const BoundedValue next = theta_series(k, PositiveReal(x), tol(t));
                EXPECT_LE(std::abs(next.value - prev.value), prev.error_bound + 1e-16) << to_string(k) << " x=" << x;
                prev = next;
            }
        }
    }
}

TEST(ThetaProduct, Theta4AtTwoMatchesSeries)
{
    const BoundedValue p = theta_product(ThetaKind::Theta4, PositiveReal(2.0), tol(1e-12));
    const BoundedValue s = theta_series(ThetaKind::Theta4, PositiveReal(2.0), tol(1e-12));
    EXPECT_NEAR(p.value, s.value, 2e-12);
}

TEST(ThetaProduct, Theta1PlusAtThreeMatchesSeries)
{
    const BoundedValue p = theta_product(ThetaKind::Theta1Plus, PositiveReal(3.0), tol(1e-12));
    const BoundedValue s = theta_series(ThetaKind::Theta1Plus, PositiveReal(3.0), tol(1e-12));
    EXPECT_NEAR(p.value, s.value, 2e-12);
}

TEST(ThetaProduct, Theta2SmallArgumentMatchesDual)
{
    const BoundedValue p = theta_product(ThetaKind::Theta2, PositiveReal(0.1), tol(1e-10));
    const BoundedValue t4 = theta_series(ThetaKind::Theta4, PositiveReal(10.0), tol(1e-10));
    EXPECT_LE(std::abs(std::sqrt(0.1) * p.value - t4.value), std::sqrt(0.1) * p.error_bound + t4.error_bound + 1e-15);
}

TEST(ThetaProduct, AgreesWithSeriesOnGrid)
{
    for (ThetaKind k : kAllKinds) {
        for (double x = 0.05; x <= 20.0; x *= 1.37) {
            const BoundedValue p = theta_product(k, PositiveReal(x), tol(1e-11));
            const BoundedValue s = theta_series(k, PositiveReal(x), tol(1e-13));
            EXPECT_LE(std::abs(p.value - s.value), p.error_bound + s.error_bound) << to_string(k) << " x=" << x;
        }
    }
}

TEST(LogTheta, MatchesOracle)
{
    for (ThetaKind k : kAllKinds) {
        for (double x : {0.1, 1.0, 7.0, 30.0}) {
            const BoundedValue v = log_theta(k, PositiveReal(x), tol(1e-13));
            EXPECT_LE(oracle::gap(v.value, log(oracle::theta(to_oracle(k), x))), v.error_bound) << to_string(k) << " x=" << x;
        }
    }
}

TEST(ThetaMinusOne, KeepsRelativeAccuracyAtLargeArgument)
{
    const BoundedValue v = theta_minus_one(ThetaKind::Theta3, PositiveReal(10.0));
    const double ref = 2.0 * std::exp(-10.0 * M_PI);
    EXPECT_NEAR(v.value / ref, 1.0, 1e-12);
    EXPECT_THROW(theta_minus_one(ThetaKind::Theta2, PositiveReal(1.0)), Error);
}

TEST(BigTheta, SpecialisesToTheta3AndTheta4)
{
    const PositiveReal one(1.0);
    EXPECT_NEAR(big_theta_real(0.0, one).value, theta_series(ThetaKind::Theta3, one).value, 1e-13);
    EXPECT_NEAR(big_theta_real(0.5, one).value, theta_series(ThetaKind::Theta4, one).value, 1e-13);
}

TEST(BigTheta, IntermediateZLiesBetweenExtremes)
{
    const PositiveReal two(2.0);
    const double v = big_theta_real(0.3, two).value;
    EXPECT_GT(v, theta_series(ThetaKind::Theta4, two).value);
    EXPECT_LT(v, theta_series(ThetaKind::Theta3, two).value);
}

TEST(BigTheta, PeriodicAndEven)
{
    for (double x : {0.05, 0.4, 1.0, 6.0}) {
        for (double z : {0.1, 0.27, 0.5, 0.83}) {
            const BoundedValue a = big_theta_real(z, PositiveReal(x));
            const BoundedValue b = big_theta_real(z + 1.0, PositiveReal(x));
            const BoundedValue c = big_theta_real(-z, PositiveReal(x));
            EXPECT_LE(std::abs(a.value - b.value), a.error_bound + b.error_bound + 1e-15);
            EXPECT_LE(std::abs(a.value - c.value), a.error_bound + c.error_bound + 1e-15);
        }
    }
    EXPECT_THROW(big_theta_real(INFINITY, PositiveReal(1.0)), Error);
}

TEST(BigTheta, ProductFormAgrees)
{
    for (double x : {0.1, 0.8, 3.0}) {
        for (double z : {0.0, 0.2, 0.5}) {
            const BoundedValue s = big_theta_real(z, PositiveReal(x), tol(1e-13));
            const BoundedValue p = big_theta_product(z, PositiveReal(x), tol(1e-11));
            EXPECT_LE(std::abs(s.value - p.value), s.error_bound + p.error_bound) << "x=" << x << " z=" << z;
        }
    }
}
