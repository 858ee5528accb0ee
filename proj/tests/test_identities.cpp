#include "oracles.hpp"

#include "thetadet/identities.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace thetadet;

TEST(Identities, PoissonTheta3AtOneIsExact)
{
    const ResidualReport r = check_identity(IdentityKind::PoissonTheta3, PositiveReal(1.0));
    EXPECT_EQ(r.residual, 0.0);
    EXPECT_TRUE(r.pass());
}

TEST(Identities, Theta1FactorizationAtPointSeven)
{
    const ResidualReport r = check_identity(IdentityKind::Theta1Factorization, PositiveReal(0.7));
    EXPECT_TRUE(r.pass());
    EXPECT_LT(r.allowed, 1e-11);
    // Both sides against the 50-digit oracle.
    const oracle::Big prod = oracle::theta(oracle::Kind::T2, 0.7) * oracle::theta(oracle::Kind::T3, 0.7) *
                             oracle::theta(oracle::Kind::T4, 0.7);
    EXPECT_LT(oracle::gap(r.lhs, prod), 1e-14);
    EXPECT_LT(oracle::gap(r.rhs, oracle::theta(oracle::Kind::T1P, 0.7)), 1e-14);
}

TEST(Identities, LogDerivTheta2Theta4AtThree)
{
    const ResidualReport r = check_identity(IdentityKind::LogDerivTheta2Theta4, PositiveReal(3.0));
    EXPECT_EQ(r.rhs, -0.5);
    EXPECT_LE(r.residual, 1e-11);
    EXPECT_TRUE(r.pass());
    const double expected = 3.0 * oracle::d(oracle::log_derivs(oracle::Kind::T2, 3.0)[1]) +
                            oracle::d(oracle::log_derivs(oracle::Kind::T4, 1.0 / 3.0)[1]) / 3.0;
    EXPECT_NEAR(r.lhs, expected, 1e-13);
}

TEST(Identities, AllKindsPassOnPaperGrid)
{
    double worst_allowance = 0.0;
    for (IdentityKind id : kAllIdentities) {
        for (double x : log_grid(0.05, 20.0, 200)) {
            const ResidualReport r = check_identity(id, PositiveReal(x));
            EXPECT_TRUE(r.pass()) << to_string(id) << " x=" << x << " residual=" << r.residual << " allowed=" << r.allowed;
            EXPECT_GE(r.residual, 0.0);
            worst_allowance = std::max(worst_allowance, r.allowed);
        }
    }
    EXPECT_LE(worst_allowance, 1e-10);
}

TEST(Identities, ResidualsAreNotVacuous)
{
    // A wrong right-hand side must be caught: theta3 is not self-dual with r = 1.
    const DualFunction t3 = detail::theta_dual(ThetaKind::Theta3, TruncationPolicy{});
    const ResidualReport bad = detail::premise(IdentityKind::PoissonTheta3, 1.0, t3, t3, 2.0);
    EXPECT_FALSE(bad.pass());
}

TEST(GeneralizedJacobi, Theta3SelfPair)
{
    const ResidualReport r = check_generalized_jacobi(0.5, ThetaKind::Theta3, ThetaKind::Theta3, PositiveReal(2.0));
    EXPECT_LE(r.residual, 1e-11);
    EXPECT_TRUE(r.pass());
}

TEST(GeneralizedJacobi, Theta2Theta4Pair)
{
    const ResidualReport r = check_generalized_jacobi(0.5, ThetaKind::Theta2, ThetaKind::Theta4, PositiveReal(0.4));
    EXPECT_LE(r.residual, 1e-11);
    EXPECT_TRUE(r.pass());
}

TEST(GeneralizedJacobi, Theta1PlusWithThreeHalves)
{
    const ResidualReport r =
        check_generalized_jacobi(1.5, ThetaKind::Theta1Plus, ThetaKind::Theta1Plus, PositiveReal(0.8));
    EXPECT_TRUE(r.pass());
}

TEST(GeneralizedJacobi, FlatStubWithZeroWeight)
{
    // theta3 at x = 50 stands in for the constant function 1.
    const DualFunction one{[](double) { return theta_series(ThetaKind::Theta3, PositiveReal(50.0)); },
                           [](double) { return log_deriv(ThetaKind::Theta3, PositiveReal(50.0)); }};
    const ResidualReport r = check_generalized_jacobi(0.0, one, one, PositiveReal(50.0));
    // theta3 is not exactly flat, so the conclusion only holds to ~1e-68.
    EXPECT_NEAR(r.lhs, 0.0, 1e-12);
    EXPECT_LE(r.residual, 1e-12);
}

TEST(GeneralizedJacobi, FalsePremiseIsRejected)
{
    try {
        (void)check_generalized_jacobi(0.5, ThetaKind::Theta2, ThetaKind::Theta3, PositiveReal(2.0));
        FAIL() << "expected HypothesisFailed";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::HypothesisFailed);
    }
}

TEST(RatioG, TrivialParameters)
{
    for (double x : {0.1, 1.0, 3.3}) {
        EXPECT_EQ(ratio_g(1.0, 1.0, PositiveReal(x)).value, 1.0);
    }
}

TEST(RatioG, Symmetry)
{
    const BoundedValue a = ratio_g(1.2, 2.0, PositiveReal(1.7));
    const BoundedValue b = ratio_g(1.2, 2.0, PositiveReal(1.0 / 1.7));
    EXPECT_NEAR(a.value, b.value, 1e-11);
}

TEST(RatioG, DecreasingAboveOne)
{
    const double g1 = ratio_g(1.2, 2.0, PositiveReal(1.0)).value;
    const double g15 = ratio_g(1.2, 2.0, PositiveReal(1.5)).value;
    const double g3 = ratio_g(1.2, 2.0, PositiveReal(3.0)).value;
    EXPECT_GT(g1, g15);
    EXPECT_GT(g15, g3);
}

TEST(RatioG, Preconditions)
{
    EXPECT_THROW(ratio_g(0.9, 2.0, PositiveReal(1.0)), Error);
    EXPECT_THROW(ratio_g(2.0, 1.5, PositiveReal(1.0)), Error);
}

TEST(RatioG, UnimodalForRandomParameters)
{
    std::mt19937 rng(20241015);
    std::uniform_real_distribution<double> u(1.0, 4.0);
    const auto grid = log_grid(0.05, 20.0, 200);
    for (int i = 0; i < 20; ++i) {
        double a = u(rng);
        double b = u(rng);
        if (a > b) {
            std::swap(a, b);
        }
        if (b - a < 1e-3) {
            b = a + 0.5;
        }
        const ScanReport r = ratio_unimodal_scan(a, b, grid);
        EXPECT_TRUE(r.pass) << "alpha=" << a << " beta=" << b << " min_margin=" << r.min_margin;
        EXPECT_NEAR(std::log(grid[r.argmax]), 0.0, 0.5 * std::log(grid[1] / grid[0]) + 1e-12);
    }
}

TEST(RatioG, ScanNeedsMaximumAtOne)
{
    const std::vector<double> grid = log_grid(0.2, 5.0, 41);
    const ScanReport r = ratio_unimodal_scan(1.2, 2.0, grid);
    ASSERT_TRUE(r.pass);
    EXPECT_NEAR(grid[r.argmax], 1.0, 1e-12);
    // alpha = beta gives g = 1 everywhere: no maximum at 1, so no pass.
    EXPECT_FALSE(ratio_unimodal_scan(1.5, 1.5, grid).pass);
}

TEST(TripleProduct, SeriesAndProductAgreeAtIntegerAndHalfZ)
{
    for (double x : log_grid(0.05, 20.0, 40)) {
        for (double z : {0.0, 0.5}) {
            const BoundedValue s = big_theta_real(z, PositiveReal(x));
            const BoundedValue p = big_theta_product(z, PositiveReal(x), TruncationPolicy{}.with_tol(1e-11));
            EXPECT_LE(std::abs(s.value - p.value), s.error_bound + p.error_bound) << "x=" << x << " z=" << z;
        }
    }
}
