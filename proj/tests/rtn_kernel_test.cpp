#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qutrit_eur/rtn_kernel.hpp"
#include "test_support.hpp"

using namespace qutrit_eur;

TEST(RtnParams, RejectsBadRates) {
    EXPECT_THROW(RtnParams(0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(RtnParams(-1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(RtnParams(1.0, -1.0), std::invalid_argument);
    EXPECT_NO_THROW(RtnParams(1.0, 0.0));
}

TEST(RtnParams, RelativeStrength) {
    EXPECT_DOUBLE_EQ(RtnParams(1.0, 4.0).g(), 0.25);
    EXPECT_EQ(RtnParams(1.0, 0.0).g(), std::numeric_limits<double>::infinity());
    EXPECT_DOUBLE_EQ(RtnParams(3.0, 0.0).to_dimensionless(2.0), 6.0);   // gamma t when static
    EXPECT_DOUBLE_EQ(RtnParams::from_relative(0.5, 2.0).gamma(), 1.0);
}

TEST(Regime, Classification) {
    const RtnParams p(1.0, 2.0);
    EXPECT_EQ(regime(1, p), HarmonicRegime::OverDamped);
    EXPECT_EQ(regime(4, p), HarmonicRegime::UnderDamped);
    EXPECT_EQ(regime(2, p), HarmonicRegime::Critical);
    EXPECT_EQ(regime(1, RtnParams(1.0, 1.0 + 1e-13)), HarmonicRegime::Critical);
    EXPECT_EQ(regime(1, RtnParams(1.0, 1.0 + 1e-9)), HarmonicRegime::OverDamped);
    EXPECT_THROW(regime(0, p), std::invalid_argument);
}

TEST(Kernel, OneAtTimeZero) {
    for (int n = 1; n <= 4; ++n)
        for (double g : {0.05, 1.0, 2.0, 10.0}) EXPECT_EQ(kernel_d(n, 0.0, RtnParams::from_relative(g)), 1.0);
}

TEST(Kernel, StaticNoiseIsCosine) {
    const RtnParams p(1.0, 0.0);
    for (double t : {0.1, 0.7, 2.5, 11.0}) EXPECT_NEAR(kernel_d(1, t, p), std::cos(t), 1e-15);
}

TEST(Kernel, FrozenOverDampedValue) {
    // e^{-2} (cosh sqrt3 + (2/sqrt3) sinh sqrt3)
    const RtnParams p(1.0, 2.0);
    const double direct = std::exp(-2.0) * (std::cosh(std::sqrt(3.0)) + 2.0 / std::sqrt(3.0) * std::sinh(std::sqrt(3.0)));
    EXPECT_NEAR(kernel_d(1, 1.0, p), 0.8222634239018095, 1e-14);
    EXPECT_NEAR(kernel_d(1, 1.0, p), direct, 1e-15);
}

// RK4 integration of the telegraph characteristic-function ODE, all branches.
TEST(Kernel, MatchesCharacteristicFunctionOde) {
    struct Case { int n; double gamma, lambda, t; };
    const Case cases[] = {{1, 1.0, 2.0, 1.0},  {2, 1.0, 2.0, 1.5},   {4, 1.0, 2.0, 0.8}, {1, 0.1, 1.0, 7.0},
                          {2, 5.0, 1.0, 2.0},  {4, 10.0, 1.0, 0.6},  {1, 3.0, 0.0, 1.1}, {3, 0.4, 1.2, 4.0}};
    for (const auto& c : cases) {
        const auto ode = fixtures::kernel_ode(c.n, c.t, c.gamma, c.lambda);
        EXPECT_NEAR(kernel_d(c.n, c.t, RtnParams(c.gamma, c.lambda)), ode.real(), 1e-9)
            << "n=" << c.n << " gamma=" << c.gamma << " lambda=" << c.lambda;
        EXPECT_NEAR(kernel_sin(c.n, c.t, RtnParams(c.gamma, c.lambda)), ode.imag(), 1e-12);
    }
}

TEST(Kernel, SinAverageIsZero) {
    const RtnParams p(1.0, 0.7);
    EXPECT_EQ(kernel_sin(1, 0.5, p), 0.0);
    EXPECT_EQ(kernel_sin(4, 3.0, p), 0.0);
    EXPECT_EQ(kernel_sin(2, 0.0, p), 0.0);
}

TEST(Kernel, CriticalLimit) {
    const RtnParams p(1.0, 2.0);
    for (double t : {0.3, 1.0, 4.0}) EXPECT_DOUBLE_EQ(kernel_d(2, t, p), std::exp(-2.0 * t) * (1.0 + 2.0 * t));
    const auto ode = fixtures::kernel_ode(2, 1.3, 1.0, 2.0);
    EXPECT_NEAR(kernel_d(2, 1.3, p), ode.real(), 1e-9);
}

TEST(Kernel, ContinuousAcrossCriticalPoint) {
    for (int n : {1, 2, 4}) {
        const double gamma = 0.7;
        const double lam_c = n * gamma;
        for (double rel : {1.0 + 1e-9, 1.0 - 1e-9}) {
            const RtnParams p(gamma, lam_c * rel);
            for (double lt = 0.0; lt <= 20.0; lt += 0.25) {
                const double t = lt / p.lambda();
                const double crit = std::exp(-lam_c * t) * (1.0 + lam_c * t);
                EXPECT_NEAR(kernel_d(n, t, p), crit, 1e-6) << "n=" << n << " lt=" << lt;
            }
        }
    }
}

TEST(Kernel, BoundedByOne) {
    for (int n = 1; n <= 4; ++n)
        for (double g : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
            const RtnParams p = RtnParams::from_relative(g);
            for (double lt = 0.0; lt <= 100.0; lt += 0.05) EXPECT_LE(std::abs(kernel_d(n, lt, p)), 1.0 + 1e-15);
        }
}

TEST(Kernel, OverDampedMonotoneAndPositive) {
    for (double g : {0.01, 0.05, 0.1, 0.2}) {
        const RtnParams p = RtnParams::from_relative(g);
        for (int n = 1; n <= 4; ++n) {
            ASSERT_EQ(regime(n, p), HarmonicRegime::OverDamped);
            double prev = 1.0;
            for (double lt = 0.01; lt <= 100.0; lt += 0.01) {
                const double d = kernel_d(n, lt, p);
                EXPECT_GT(d, 0.0);
                EXPECT_LT(d, prev);
                prev = d;
            }
        }
    }
}

TEST(Kernel, UnderDampedFirstZeroSatisfiesCotCondition) {
    const RtnParams p(5.0, 1.0);
    const double delta = std::sqrt(25.0 - 1.0);
    // first zero of cos(dt) + (l/d) sin(dt): cot(d t*) = -l/d  =>  d t* = pi - atan(d / l)
    const double t_star = (M_PI - std::atan(delta / 1.0)) / delta;
    EXPECT_GT(kernel_d(1, t_star - 1e-6, p), 0.0);
    EXPECT_LT(kernel_d(1, t_star + 1e-6, p), 0.0);
    EXPECT_NEAR(kernel_d(1, t_star, p), 0.0, 1e-12);
    EXPECT_NEAR(1.0 / std::tan(delta * t_star), -1.0 / delta, 1e-12);
    // and no earlier sign change
    for (double t = 0.0; t < t_star - 1e-6; t += 1e-3) EXPECT_GT(kernel_d(1, t, p), 0.0);
}

TEST(Kernel, DependsOnHarmonicOnlyThroughProduct) {
    for (double g : {0.05, 0.3, 0.5, 2.0, 7.0})
        for (double t : {0.0, 0.4, 1.0, 3.3, 12.0}) {
            EXPECT_EQ(kernel_d(2, t, RtnParams(g, 1.0)), kernel_d(1, t, RtnParams(2 * g, 1.0)));
            EXPECT_EQ(kernel_d(4, t, RtnParams(g, 1.0)), kernel_d(2, t, RtnParams(2 * g, 1.0)));
        }
}

TEST(Kernel, LongTimesDoNotOverflow) {
    const RtnParams p(0.001, 1.0);
    const double d = kernel_d(1, 5000.0, p);
    EXPECT_TRUE(std::isfinite(d));
    EXPECT_GT(d, 0.0);
    EXPECT_LT(d, 1.0);
}

TEST(Kernel, RejectsBadArguments) {
    const RtnParams p(1.0, 1.0);
    EXPECT_THROW(kernel_d(0, 1.0, p), std::invalid_argument);
    EXPECT_THROW(kernel_d(1, -1.0, p), std::invalid_argument);
}
