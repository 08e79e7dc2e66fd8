#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qutrit_eur/entropy_uncertainty.hpp"
#include "test_support.hpp"

using namespace qutrit_eur;

namespace {

const double kLog2_3 = std::log2(3.0);

BipartiteState maximally_mixed() { return BipartiteState(Mat9::Identity() / 9.0); }

} // namespace

TEST(VonNeumann, KnownSpectra) {
    EXPECT_NEAR(von_neumann(Operator3(Mat3::Identity() / 3.0)), kLog2_3, 1e-14);
    EXPECT_NEAR(von_neumann(max_entangled_state()), 0.0, 1e-12);

    Mat9 d = Mat9::Zero();
    for (int i = 0; i < 4; ++i) d(i, i) = 1.0 / 6.0;
    for (int i = 4; i < 8; ++i) d(i, i) = 1.0 / 12.0;
    // direct Shannon sum: 4 (1/6) log2 6 + 4 (1/12) log2 12
    const double direct = 4.0 / 6.0 * std::log2(6.0) + 4.0 / 12.0 * std::log2(12.0);
    EXPECT_NEAR(direct, 2.918295834054489, 1e-14);
    EXPECT_NEAR(von_neumann(d), 4.0 / 3.0 + kLog2_3, 1e-13);
}

TEST(VonNeumann, RejectsInvalidInput) {
    EXPECT_THROW(von_neumann(Mat3(Mat3::Identity() / 2.0)), invalid_state);
    Mat3 neg = Mat3::Zero();
    neg(0, 0) = 1.1;
    neg(1, 1) = -0.1;
    EXPECT_THROW(von_neumann(neg), invalid_state);
    Mat3 tiny = Mat3::Zero();
    tiny(0, 0) = 1.0 + 1e-11;
    tiny(1, 1) = -1e-11;    // within the clipping floor
    EXPECT_NEAR(von_neumann(tiny), 0.0, 1e-9);
}

TEST(ConditionalEntropy, SxVanishesAlongEvolution) {
    for (double g : {0.1, 2.0, 10.0})
        for (auto topo : {Topology::Independent, Topology::Common})
            for (double t : {0.0, 0.3, 1.0, 4.0}) {
                const auto rho = evolve(max_entangled_state(), t, RtnParams::from_relative(g), topo);
                EXPECT_NEAR(conditional_entropy(rho, sx_basis()), 0.0, 1e-10);
            }
}

TEST(ConditionalEntropy, PerfectCorrelationsAtStart) {
    EXPECT_NEAR(conditional_entropy(max_entangled_state(), sz_basis()), 0.0, 1e-12);
}

TEST(ConditionalEntropy, MaximallyMixed) {
    EXPECT_NEAR(conditional_entropy(maximally_mixed(), sx_basis()), kLog2_3, 1e-12);
    EXPECT_NEAR(conditional_entropy(maximally_mixed(), sz_basis()), kLog2_3, 1e-12);
}

TEST(Spectrum, PerfectMemory) {
    auto ev = measured_spectrum({1.0, 1.0});
    std::sort(ev.begin(), ev.end());
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(ev[i], 0.0, 1e-15);
    for (int i = 6; i < 9; ++i) EXPECT_NEAR(ev[i], 1.0 / 3.0, 1e-15);
}

TEST(Spectrum, FullyDecayed) {
    auto ev = measured_spectrum({0.0, 0.0});
    std::sort(ev.begin(), ev.end());
    EXPECT_EQ(ev[0], 0.0);
    for (int i = 1; i < 5; ++i) EXPECT_NEAR(ev[i], 1.0 / 12.0, 1e-15);
    for (int i = 5; i < 9; ++i) EXPECT_NEAR(ev[i], 1.0 / 6.0, 1e-15);
}

TEST(Spectrum, SumsToOneOnAttainableSet) {
    for (double g : {0.05, 0.2, 1.0, 2.0, 5.0, 10.0})
        for (auto topo : {Topology::Independent, Topology::Common})
            for (double t = 0.0; t <= 30.0; t += 0.1) {
                const auto ev = measured_spectrum(factors(t, RtnParams::from_relative(g), topo));
                double sum = 0.0;
                for (double x : ev) {
                    sum += x;
                    EXPECT_GE(x, -1e-12);
                }
                EXPECT_NEAR(sum, 1.0, 1e-12);
            }
}

// The closed form agrees with the numerically diagonalised S_z-measured state.
TEST(Spectrum, MatchesDiagonalisedState) {
    for (double g : {0.1, 2.0, 5.0})
        for (auto topo : {Topology::Independent, Topology::Common})
            for (double t : {0.2, 0.9, 3.1}) {
                const RtnParams p = RtnParams::from_relative(g);
                const auto rho = evolve(max_entangled_state(), t, p, topo);
                auto numeric = hermitian_eigenvalues(measure_dephase(rho, sz_basis()).matrix());
                auto closed = measured_spectrum(factors(t, p, topo));
                std::sort(numeric.begin(), numeric.end());
                std::sort(closed.begin(), closed.end());
                for (int i = 0; i < 9; ++i) EXPECT_NEAR(numeric[i], closed[i], 1e-12);
            }
}

TEST(Spectrum, RejectsUnattainableFactors) {
    // 2 alpha^2 > beta + 1 drives the smaller root negative
    EXPECT_THROW(measured_spectrum({0.9, -0.5}), spectrum_invalid);
    EXPECT_THROW(measured_spectrum({1.5, 0.0}), spectrum_invalid);
}

TEST(UncertaintyFast, Anchors) {
    EXPECT_NEAR(uncertainty_fast({1.0, 1.0}), 0.0, 1e-14);
    EXPECT_NEAR(uncertainty_fast({0.0, 0.0}), 4.0 / 3.0, 1e-14);
}

// (alpha, beta) = (0, 1) is reached by static independent noise at gamma t = pi/2.
TEST(UncertaintyFast, CrossValidatedAtStaticNoisePoint) {
    const RtnParams p(1.0, 0.0);
    const double t = std::numbers::pi / 2.0;
    const auto f = factors(t, p, Topology::Independent);
    EXPECT_NEAR(f.alpha, 0.0, 1e-15);
    EXPECT_NEAR(f.beta, 1.0, 1e-15);
    const double general = uncertainty_general(evolve(max_entangled_state(), t, p, Topology::Independent),
                                               sx_basis(), sz_basis());
    EXPECT_NEAR(uncertainty_fast({0.0, 1.0}), 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(general, uncertainty_fast(f), 1e-9);
}

TEST(UncertaintyGeneral, SimpleStates) {
    EXPECT_NEAR(uncertainty_general(max_entangled_state(), sx_basis(), sz_basis()), 0.0, 1e-12);
    EXPECT_NEAR(uncertainty_general(maximally_mixed(), sx_basis(), sz_basis()), 2.0 * kLog2_3, 1e-12);
}

TEST(UncertaintyGeneral, AgreesWithFastPath) {
    for (double g : {0.05, 0.1, 0.2, 2.0, 5.0, 10.0})
        for (auto topo : {Topology::Independent, Topology::Common}) {
            const RtnParams p = RtnParams::from_relative(g);
            for (double t = 0.0; t <= 30.0; t += 0.73) {
                const double fast = uncertainty_fast(factors(t, p, topo));
                const double general = uncertainty_general(evolve(max_entangled_state(), t, p, topo), sx_basis(),
                                                           sz_basis());
                EXPECT_NEAR(fast, general, 1e-9) << "g=" << g << " t=" << t;
            }
        }
}

TEST(BertaBound, Anchors) {
    EXPECT_NEAR(berta_rhs(max_entangled_state(), sx_basis(), sz_basis()), 1.0 - kLog2_3, 1e-12);
    EXPECT_NEAR(berta_rhs(maximally_mixed(), sx_basis(), sz_basis()), 1.0 + kLog2_3, 1e-12);
}

TEST(BertaBound, HoldsOnEvolvedAndRandomStates) {
    for (double g : {0.1, 2.0, 10.0})
        for (auto topo : {Topology::Independent, Topology::Common})
            for (double t = 0.0; t <= 10.0; t += 0.25) {
                const auto rho = evolve(max_entangled_state(), t, RtnParams::from_relative(g), topo);
                EXPECT_LE(berta_rhs(rho, sx_basis(), sz_basis()),
                          uncertainty_general(rho, sx_basis(), sz_basis()) + 1e-9);
            }
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 30; ++trial) {
        const auto rho = fixtures::as_state(fixtures::random_density9(gen));
        const auto x = eigenbasis(Operator3(fixtures::random_hermitian3(gen)));
        const auto z = eigenbasis(Operator3(fixtures::random_hermitian3(gen)));
        EXPECT_LE(berta_rhs(rho, x, z), uncertainty_general(rho, x, z) + 1e-9);
    }
}

TEST(UncertaintyPoint, FastAndGeneralRecordsAgree) {
    const DephasingChannel ch(RtnParams::from_relative(5.0), Topology::Common);
    for (double t : {0.0, 0.15, 0.8}) {
        const auto a = uncertainty_point_fast(t, ch);
        const auto b = uncertainty_point_general(t, ch);
        EXPECT_EQ(a.u_l, a.h_x_cond + a.h_z_cond);
        EXPECT_NEAR(a.u_l, b.u_l, 1e-9);
        EXPECT_NEAR(a.berta_rhs, b.berta_rhs, 1e-12);
        EXPECT_GE(a.u_l, a.berta_rhs - 1e-9);
        EXPECT_EQ(a.t_dimensionless, t);
    }
}

TEST(UncertaintyPoint, Limits) {
    for (auto topo : {Topology::Independent, Topology::Common}) {
        const DephasingChannel ch(RtnParams::from_relative(3.0), topo);
        EXPECT_NEAR(uncertainty_point_fast(0.0, ch).u_l, 0.0, 1e-12);
        EXPECT_NEAR(uncertainty_point_fast(60.0, ch).u_l, 4.0 / 3.0, 1e-12);
    }
}
