#include "risaoi/noma.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace risaoi;

ChannelSet unit_channels(int ris) {
    ChannelSet cs;
    cs.elements = 1;
    cs.directStrong = {1.0};
    cs.directWeak = {1.0};
    for (int n = 0; n < ris; ++n) {
        cs.weakToRis.push_back(CVector::Ones(1));
        cs.risToBs.push_back(CVector::Ones(1));
    }
    return cs;
}

EffectiveChannels unit_effective() {
    EffectiveChannels e;
    e.strongDirectGain = 1.0;
    e.weakCompositeAll = 1.0;
    e.weakCompositeAssigned = 1.0;
    return e;
}

TEST(EffectiveChannels, ZeroPhaseUnitChannelsSum) {
    const auto cs = unit_channels(2);
    PhaseConfig pc{{CVector::Ones(1), CVector::Ones(1)}};
    RisAssignment a{{{0}}, 1, 2};
    const auto e = compose_effective_channels(cs, pc, &a, 0, 0);
    EXPECT_EQ(e.weakCompositeAll, cplx(3.0, 0.0));
    EXPECT_EQ(e.weakCompositeAssigned, cplx(3.0, 0.0));
    EXPECT_EQ(e.assignedReflection, cplx(1.0, 0.0));
    EXPECT_EQ(e.strongDirectGain, 1.0);
}

TEST(EffectiveChannels, NoRisLeavesDirectLink) {
    auto cs = unit_channels(0);
    cs.directWeak = {cplx(0.3, -0.4)};
    const auto e = compose_effective_channels(cs, PhaseConfig{}, nullptr, 0, 0);
    EXPECT_EQ(e.weakCompositeAll, cplx(0.3, -0.4));
    EXPECT_EQ(e.weakCompositeAssigned, cplx(0.3, -0.4));
}

TEST(Sinr, Strong) {
    auto e = unit_effective();
    EXPECT_DOUBLE_EQ(sinr_strong(10.0, 0.0, e, 1.0), 10.0);
    EXPECT_DOUBLE_EQ(sinr_strong(10.0, 3.0, e, 1.0), 2.5);
    EXPECT_DOUBLE_EQ(sinr_strong(0.0, 3.0, e, 1.0), 0.0);
}

TEST(Sinr, Weak) {
    auto e = unit_effective();
    EXPECT_DOUBLE_EQ(sinr_weak(0.0, e, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(sinr_weak(3.0, e, 1.0), 3.0);
    e.weakCompositeAssigned = cplx(0.7, 1.1);
    EXPECT_DOUBLE_EQ(sinr_weak(4.0, e, 0.3), 2.0 * sinr_weak(2.0, e, 0.3));
}

TEST(PowerBounds, WorkedExample) {
    const auto pb = power_bounds(10.0, unit_effective(), 2.0, 1.0, 100.0);
    EXPECT_DOUBLE_EQ(pb.pMin, 2.0);
    EXPECT_DOUBLE_EQ(pb.pMax, 4.0);
    EXPECT_TRUE(pb.feasible);
    const auto e = unit_effective();
    EXPECT_GE(sinr_strong(10.0, 3.0, e, 1.0), 2.0);
    EXPECT_GE(sinr_weak(3.0, e, 1.0), 2.0);
}

TEST(PowerBounds, StrongAtThresholdLeavesNoRoom) {
    const auto pb = power_bounds(2.0, unit_effective(), 2.0, 1.0, 100.0);
    EXPECT_EQ(pb.pMax, 0.0);
    EXPECT_FALSE(pb.feasible);
}

TEST(PowerBounds, ClampedToBudget) {
    const auto pb = power_bounds(10.0, unit_effective(), 2.0, 1.0, 3.0);
    EXPECT_DOUBLE_EQ(pb.pMax, 3.0);
    EXPECT_TRUE(pb.pMaxFromBudget);
}

TEST(PowerBounds, DeadWeakChannelIsInfeasible) {
    auto e = unit_effective();
    e.weakCompositeAssigned = 0.0;
    const auto pb = power_bounds(10.0, e, 2.0, 1.0, 100.0);
    EXPECT_TRUE(std::isinf(pb.pMin));
    EXPECT_FALSE(pb.feasible);
}

TEST(PowerBounds, IntervalEquivalentToBothThresholds) {
    Engine eng(41);
    std::uniform_real_distribution<double> lu(-2.0, 2.0);
    int checked = 0;
    while (checked < 1000) {
        const double zeta = std::pow(10.0, lu(eng)), sigma2 = std::pow(10.0, lu(eng));
        const double ps = std::pow(10.0, 2.0 + lu(eng)), budget = std::pow(10.0, 1.0 + lu(eng));
        EffectiveChannels e;
        e.strongDirectGain = std::pow(10.0, lu(eng));
        e.weakCompositeAll = complex_normal(eng);
        e.weakCompositeAssigned = e.weakCompositeAll;
        const auto pb = power_bounds(ps, e, zeta, sigma2, budget);
        EXPECT_EQ(pb.feasible, pb.pMin <= pb.pMax);
        EXPECT_GE(pb.pMin, 0.0);
        EXPECT_LE(pb.pMax, budget);
        if (!pb.feasible) continue;
        ++checked;
        for (int i = 0; i < 10; ++i) {
            const double pw = pb.pMin + (pb.pMax - pb.pMin) * i / 9.0;
            EXPECT_TRUE(meets_threshold(sinr_strong(ps, pw, e, sigma2), zeta));
            EXPECT_TRUE(meets_threshold(sinr_weak(pw, e, sigma2), zeta));
        }
        EXPECT_FALSE(meets_threshold(sinr_weak(pb.pMin * 0.99, e, sigma2), zeta));
        if (!pb.pMaxFromBudget)
            for (double f : {1.01, 2.0, 10.0})
                EXPECT_FALSE(meets_threshold(sinr_strong(ps, pb.pMax * f, e, sigma2), zeta));
    }
}

TEST(EvaluatePair, FeasibleUsesMinimumPower) {
    const auto e = unit_effective();
    const auto pb = power_bounds(10.0, e, 2.0, 1.0, 100.0);
    const auto o = evaluate_pair(10.0, e, pb, 2.0, 1.0, 100.0);
    EXPECT_TRUE(o.strongSuccess);
    EXPECT_TRUE(o.weakSuccess);
    EXPECT_DOUBLE_EQ(o.chosenWeakPower, 2.0);
}

TEST(EvaluatePair, InfeasibleKeepsStrongAlive) {
    // Weak link too poor for the budget; strong passes with the weak device silent.
    auto e = unit_effective();
    e.weakCompositeAssigned = e.weakCompositeAll = 0.01;
    const double budget = 10.0;
    const auto pb = power_bounds(budget, e, 2.0, 1.0, budget);
    ASSERT_FALSE(pb.feasible);
    const auto o = evaluate_pair(budget, e, pb, 2.0, 1.0, budget);
    EXPECT_TRUE(o.strongSuccess);
    EXPECT_FALSE(o.weakSuccess);
    EXPECT_EQ(o.chosenWeakPower, 0.0);
}

TEST(EvaluatePair, HopelessPairFailsBoth) {
    auto e = unit_effective();
    e.strongDirectGain = 0.1;
    e.weakCompositeAssigned = e.weakCompositeAll = 0.01;
    const double budget = 10.0;
    const auto pb = power_bounds(budget, e, 2.0, 1.0, budget);
    ASSERT_GT(pb.pMin, budget);
    const auto o = evaluate_pair(budget, e, pb, 2.0, 1.0, budget);
    EXPECT_FALSE(o.strongSuccess);
    EXPECT_FALSE(o.weakSuccess);
}

TEST(EvaluatePair, WeakSuccessNeverExceedsBudget) {
    Engine eng(42);
    std::uniform_real_distribution<double> lu(-3.0, 3.0);
    for (int t = 0; t < 2000; ++t) {
        EffectiveChannels e;
        e.strongDirectGain = std::pow(10.0, lu(eng));
        e.weakCompositeAll = e.weakCompositeAssigned = complex_normal(eng) * std::pow(10.0, lu(eng) / 2.0);
        const double budget = std::pow(10.0, lu(eng)), zeta = std::pow(10.0, lu(eng) / 3.0);
        const auto pb = power_bounds(budget, e, zeta, 1.0, budget);
        const auto o = evaluate_pair(budget, e, pb, zeta, 1.0, budget);
        if (o.weakSuccess) EXPECT_LE(o.chosenWeakPower, budget);
        EXPECT_EQ(o.strongSuccess, meets_threshold(o.strongSinr, zeta));
        EXPECT_EQ(o.weakSuccess, meets_threshold(o.weakSinr, zeta));
    }
}

TEST(Units, DbConversions) {
    EXPECT_NEAR(dbm_to_watts(12.0), std::pow(10.0, -1.8), 1e-15);
    EXPECT_NEAR(dbm_to_watts(12.0), 0.01585, 1e-5);
    EXPECT_DOUBLE_EQ(db_to_linear(0.0), 1.0);
    EXPECT_NEAR(dbm_to_watts(-110.0), 1e-14, 1e-28);
}

}  // namespace
