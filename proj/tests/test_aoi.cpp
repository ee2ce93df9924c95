#include "risaoi/aoi.hpp"
#include "risaoi/selftest.hpp"

#include <gtest/gtest.h>

namespace {

using namespace risaoi;

SystemConfig small_config() {
    SystemConfig c;
    c.topology.clusters = 4;
    c.topology.risCount = 3;
    c.elements = 4;
    c.assignedRis = 2;
    c.horizon = 6;
    c.budgetWatts = dbm_to_watts(12.0);
    c.thresholdLinear = db_to_linear(45.0);
    c.noiseWatts = dbm_to_watts(-110.0);
    c.phase.grCandidates = 30;
    return c;
}

AoiState advance_constant(int clusters, Age initial, int slots, bool success) {
    AoiState st(clusters, initial);
    Engine unused(0);
    for (int t = 0; t < slots; ++t)
        cluster_and_advance(
            st, [&](int, int) { return PairOutcome{success, success}; }, ClusteringMode::Hungarian, unused);
    return st;
}

TEST(AoiState, AllSuccessResetsToOne) {
    const auto st = advance_constant(5, 4, 1, true);
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(st.strong()[i], 1);
        EXPECT_EQ(st.weak()[i], 1);
    }
}

TEST(AoiState, AllFailIncrements) {
    const auto st = advance_constant(5, 4, 1, false);
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(st.strong()[i], 5);
        EXPECT_EQ(st.weak()[i], 5);
    }
}

TEST(AoiState, AlwaysSuccessAveragesOne) {
    EXPECT_DOUBLE_EQ(advance_constant(10, 1, 100, true).average_sum_aoi(), 1.0);
}

TEST(AoiState, AlwaysFailArithmeticSeries) {
    for (int t : {1, 7, 100}) EXPECT_DOUBLE_EQ(advance_constant(10, 1, t, false).average_sum_aoi(), (t + 3) / 2.0);
}

TEST(AoiState, RenewalMeanAge) {
    for (double p : {0.2, 0.5, 0.9}) {
        const auto r = selftest::aoi_renewal(p, 100000, 10, 61);
        EXPECT_TRUE(r.pass) << r.detail;
    }
}

TEST(AoiState, SawtoothPaths) {
    AoiState st(6, 1);
    Engine coins(62), unused(0);
    std::bernoulli_distribution coin(0.3);
    auto prev_s = st.strong(), prev_w = st.weak();
    for (int t = 0; t < 500; ++t) {
        std::vector<char> s(6), w(6);
        for (int i = 0; i < 6; ++i) {
            s[i] = coin(coins);
            w[i] = coin(coins);
        }
        st.advance(s, w);
        for (int i = 0; i < 6; ++i) {
            EXPECT_TRUE(st.strong()[i] == 1 || st.strong()[i] == prev_s[i] + 1);
            EXPECT_TRUE(st.weak()[i] == 1 || st.weak()[i] == prev_w[i] + 1);
        }
        prev_s = st.strong();
        prev_w = st.weak();
    }
    EXPECT_GE(st.average_sum_aoi(), 1.0);
}

TEST(Horizon, SameSeedBitIdentical) {
    const auto c = small_config();
    for (Scheme s : kAllSchemes) {
        const auto a = run_horizon(c, s, 5), b = run_horizon(c, s, 5);
        EXPECT_EQ(a.averageSumAoi, b.averageSumAoi) << scheme_name(s);
        EXPECT_GE(a.averageSumAoi, 1.0);
    }
}

TEST(Horizon, SchemesSeeIdenticalChannels) {
    const auto c = small_config();
    std::vector<std::vector<std::uint64_t>> hashes;
    for (Scheme s : kAllSchemes) {
        const auto r = run_horizon(c, s, 9, true);
        ASSERT_EQ(static_cast<int>(r.traces.size()), c.horizon);
        std::vector<std::uint64_t> h;
        for (const auto& tr : r.traces) h.push_back(tr.channelHash);
        hashes.push_back(h);
    }
    for (const auto& h : hashes) EXPECT_EQ(h, hashes.front());
}

TEST(Horizon, TracesFollowAgeRecursion) {
    const auto c = small_config();
    const auto r = run_horizon(c, Scheme::Proposed, 3, true);
    std::vector<Age> s(c.topology.clusters, 1), w(c.topology.clusters, 1);
    double sum = 0.0;
    for (const auto& tr : r.traces) {
        EXPECT_TRUE(tr.clusters.is_permutation());
        for (int i = 0; i < c.topology.clusters; ++i) {
            s[i] = predicted_age(s[i], tr.strongSuccess[i]);
            w[i] = predicted_age(w[i], tr.weakSuccess[i]);
            sum += static_cast<double>(s[i] + w[i]);
        }
        EXPECT_EQ(tr.strongAges, s);
        EXPECT_EQ(tr.weakAges, w);
    }
    EXPECT_NEAR(r.averageSumAoi, sum / (2.0 * c.topology.clusters * c.horizon), 1e-12);
}

TEST(Horizon, NoRisIgnoresPhases) {
    auto c = small_config();
    const double base = run_horizon(c, Scheme::NoRis, 4).averageSumAoi;
    c.elements = 9;
    c.phase.grCandidates = 5;
    EXPECT_EQ(run_horizon(c, Scheme::NoRis, 4).averageSumAoi, base);
}

TEST(Horizon, ZeroAssignedRisMatchesNoRis) {
    auto c = small_config();
    c.assignedRis = 0;
    const double none = run_horizon(c, Scheme::NoRis, 2).averageSumAoi;
    EXPECT_EQ(run_horizon(c, Scheme::Proposed, 2).averageSumAoi, none);
    EXPECT_EQ(run_horizon(c, Scheme::RaOcRps, 2).averageSumAoi, none);
}

TEST(Horizon, OptimizedPhasesBeatRandomPerSlot) {
    auto c = small_config();
    c.assignedRis = 1;
    const auto topo = sample_topology(c.topology, 12);
    const auto a = assign_k_nearest(topo, c.assignedRis);
    for (int slot = 1; slot <= 3; ++slot) {
        const auto cs = sample_channels(topo, c.fading, c.elements, slot, 12);
        const auto opt = optimize_ris_phases(cs, a, c.phase, 12);
        const auto rnd = random_phases(c.topology.risCount, c.elements, slot, 12);
        for (int w = 0; w < c.topology.clusters; ++w) {
            const double go = std::norm(compose_effective_channels(cs, opt, &a, 0, w).assignedReflection +
                                        cs.directWeak[w]);
            const double gr = std::norm(compose_effective_channels(cs, rnd, &a, 0, w).assignedReflection +
                                        cs.directWeak[w]);
            // Only a device alone on its RIS has a per-device guarantee.
            if (a.served_by(a.perWeak[w][0]).size() == 1) EXPECT_GE(go, gr);
        }
    }
}

TEST(PhaseCache, SharedPhasesGiveSameResult) {
    auto c = small_config();
    PhaseCache cache;
    const double plain = run_horizon(c, Scheme::Proposed, 7).averageSumAoi;
    EXPECT_EQ(run_horizon(c, Scheme::Proposed, 7, false, &cache).averageSumAoi, plain);
    EXPECT_EQ(cache.size(), static_cast<std::size_t>(c.horizon));
    EXPECT_EQ(run_horizon(c, Scheme::Proposed, 7, false, &cache).averageSumAoi, plain);
    c.budgetWatts *= 2.0;
    run_horizon(c, Scheme::Proposed, 7, false, &cache);
    EXPECT_EQ(cache.size(), static_cast<std::size_t>(c.horizon));
    c.elements = 5;
    run_horizon(c, Scheme::Proposed, 7, false, &cache);
    EXPECT_EQ(cache.size(), static_cast<std::size_t>(2 * c.horizon));
}

}  // namespace
