#include "risaoi/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace {

using namespace risaoi;

TopologyParams small_params(int clusters, int ris) {
    TopologyParams p;
    p.clusters = clusters;
    p.risCount = ris;
    return p;
}

double ground_distance(const Point3& p) { return std::hypot(p.x, p.y); }

TEST(Topology, SameSeedSamePositions) {
    const auto a = sample_topology(small_params(1, 1), 7);
    const auto b = sample_topology(small_params(1, 1), 7);
    EXPECT_EQ(a.strong, b.strong);
    EXPECT_EQ(a.weak, b.weak);
    EXPECT_EQ(a.ris, b.ris);
    EXPECT_NE(a.weak, sample_topology(small_params(1, 1), 8).weak);
}

TEST(Topology, DevicesRespectRegions) {
    TopologyParams p = small_params(100, 100);
    const auto t = sample_topology(p, 3);
    ASSERT_EQ(t.clusters(), 100);
    ASSERT_EQ(t.risCount(), 100);
    EXPECT_EQ(t.bs, (Point3{0.0, 0.0, p.bsHeight}));
    for (int k = 0; k < 100; ++k) {
        EXPECT_LE(ground_distance(t.strong[k]), p.dS);
        EXPECT_LE(ground_distance(t.weak[k]), p.dW);
        EXPECT_GE(ground_distance(t.weak[k]), p.dS);
        EXPECT_LE(ground_distance(t.ris[k]), p.dR);
        EXPECT_EQ(t.strong[k].z, 0.0);
        EXPECT_EQ(t.weak[k].z, 0.0);
        EXPECT_EQ(t.ris[k].z, p.risHeight);
    }
}

TEST(Topology, StrongDevicesWithinFiveMetres) {
    TopologyParams p = small_params(10000, 1);
    p.dS = 5.0;
    p.dW = 145.0;
    p.dR = 150.0;
    const auto t = sample_topology(p, 11);
    for (const auto& s : t.strong) EXPECT_LE(ground_distance(s), 5.0);
}

TEST(Topology, AnglesStayInSector) {
    TopologyParams p = small_params(10000, 1);
    const auto t = sample_topology(p, 12);
    double lo = 10.0, hi = -10.0;
    for (const auto& w : t.weak) {
        const double a = std::atan2(w.y, w.x);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    EXPECT_GE(lo, 0.0);
    EXPECT_LE(hi, p.centralAngle);
    EXPECT_GT(hi - lo, 0.95 * p.centralAngle);
}

TEST(Topology, RejectsBadRadii) {
    TopologyParams p;
    p.dS = 150.0;
    EXPECT_THROW(sample_topology(p, 1), std::invalid_argument);
    p = TopologyParams{};
    p.dW = 200.0;
    EXPECT_THROW(sample_topology(p, 1), std::invalid_argument);
}

TEST(PathLoss, ReferenceDistance) {
    FadingParams f;
    f.referencePathLossDb = -30.0;
    EXPECT_DOUBLE_EQ(path_loss_gain(1.0, 2.2, f), 1e-3);
    EXPECT_DOUBLE_EQ(path_loss_gain(1.0, 3.5, f), 1e-3);
}

TEST(PathLoss, StatedFormula) {
    FadingParams f;
    f.referencePathLossDb = -30.0;
    EXPECT_NEAR(path_loss_gain(10.0, 2.2, f), std::pow(10.0, -5.2), 1e-18);
    EXPECT_NEAR(path_loss_gain(10.0, 2.2, f), 6.31e-6, 1e-8);
    EXPECT_NEAR(path_loss_gain(100.0, 3.5, f), 1e-10, 1e-22);
}

TEST(PathLoss, ClampsBelowOneMetre) {
    FadingParams f;
    EXPECT_DOUBLE_EQ(path_loss_gain(0.2, 3.5, f), path_loss_gain(1.0, 3.5, f));
}

TEST(Rician, MixtureWeights) {
    CVector los(3);
    los << cplx(1, 0), cplx(0, 1), cplx(-1, 0);
    Engine a(4), b(4);
    const CVector h = detail::rician_vector(a, 1.0, 2.0, los);
    for (int l = 0; l < 3; ++l) {
        const cplx nlos = complex_normal(b);
        EXPECT_NEAR(std::abs(h(l) - (std::sqrt(2.0 / 3.0) * los(l) + std::sqrt(1.0 / 3.0) * nlos)), 0.0, 1e-15);
    }
}

TEST(Rician, ZeroKIsRayleigh) {
    CVector los = CVector::Ones(4);
    Engine a(5), b(5);
    const CVector h = detail::rician_vector(a, 4.0, 0.0, los);
    for (int l = 0; l < 4; ++l) EXPECT_NEAR(std::abs(h(l) - 2.0 * complex_normal(b)), 0.0, 1e-15);
}

struct LinkPowers {
    std::vector<double> strong, weak, risBs, weakRis;
};

LinkPowers sample_normalised_powers(int slots) {
    TopologyParams p = small_params(1, 1);
    FadingParams f;
    const auto t = sample_topology(p, 2);
    const double gs = path_loss_gain(distance(t.strong[0], t.bs), f.exponents.strongToBs, f);
    const double gw = path_loss_gain(distance(t.weak[0], t.bs), f.exponents.weakToBs, f);
    const double gr = path_loss_gain(distance(t.ris[0], t.bs), f.exponents.risToBs, f);
    const double gwr = path_loss_gain(distance(t.weak[0], t.ris[0]), f.exponents.weakToRis, f);
    LinkPowers out;
    for (int s = 1; s <= slots; ++s) {
        const auto cs = sample_channels(t, f, 1, s, 2);
        out.strong.push_back(std::norm(cs.directStrong[0]) / gs);
        out.weak.push_back(std::norm(cs.directWeak[0]) / gw);
        out.risBs.push_back(std::norm(cs.risToBs[0](0)) / gr);
        out.weakRis.push_back(std::norm(cs.weak_to_ris(0, 0)(0)) / gwr);
    }
    return out;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double lag_one_autocorrelation(const std::vector<double>& v) {
    const double m = mean(v);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        den += (v[i] - m) * (v[i] - m);
        if (i + 1 < v.size()) num += (v[i] - m) * (v[i + 1] - m);
    }
    return num / den;
}

TEST(Channels, UnitMeanSmallScalePowerAndSlotIndependence) {
    const auto p = sample_normalised_powers(100000);
    for (const auto* v : {&p.strong, &p.weak, &p.risBs, &p.weakRis}) {
        EXPECT_NEAR(mean(*v), 1.0, 0.02);
        EXPECT_LT(std::abs(lag_one_autocorrelation(*v)), 0.02);
    }
}

TEST(Channels, DeterministicPerSeedAndSlot) {
    const auto t = sample_topology(TopologyParams{}, 9);
    FadingParams f;
    const auto a = sample_channels(t, f, 30, 4, 9);
    const auto b = sample_channels(t, f, 30, 4, 9);
    EXPECT_EQ(channel_hash(a), channel_hash(b));
    EXPECT_NE(channel_hash(a), channel_hash(sample_channels(t, f, 30, 5, 9)));
    ASSERT_EQ(a.weakToRis.size(), 50u);
    for (const auto& v : a.weakToRis) EXPECT_EQ(v.size(), 30);
    for (const auto& v : a.risToBs) {
        EXPECT_EQ(v.size(), 30);
        for (int l = 0; l < 30; ++l) EXPECT_GT(std::abs(v(l)), 0.0);
    }
}

TEST(Channels, NestedInElementCount) {
    const auto t = sample_topology(TopologyParams{}, 10);
    FadingParams f;
    const auto small = sample_channels(t, f, 10, 1, 10);
    const auto large = sample_channels(t, f, 50, 1, 10);
    for (int n = 0; n < 5; ++n) EXPECT_EQ(small.risToBs[n], large.risToBs[n].head(10));
    EXPECT_EQ(small.directWeak, large.directWeak);
}

}  // namespace
