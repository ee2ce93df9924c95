#include "risaoi/linalg.hpp"
#include "risaoi/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace risaoi;

CHermitian random_psd(Engine& eng, int n, int rank) {
    CMatrix f(n, rank);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < rank; ++j) f(i, j) = complex_normal(eng);
    return CHermitian::from_hermitian_part(f * f.adjoint());
}

TEST(Eigendecompose, IdentityHasUnitSpectrum) {
    const auto ed = eigendecompose(RSymmetric::identity(3));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(ed.eigenvalues(i), 1.0, 1e-14);
}

TEST(Eigendecompose, DiagonalSortedDescending) {
    RMatrix m(2, 2);
    m << -1, 0, 0, 2;
    const auto ed = eigendecompose(RSymmetric(m));
    EXPECT_NEAR(ed.eigenvalues(0), 2.0, 1e-14);
    EXPECT_NEAR(ed.eigenvalues(1), -1.0, 1e-14);
}

TEST(Eigendecompose, SwapMatrix) {
    RMatrix m(2, 2);
    m << 0, 1, 1, 0;
    const auto ed = eigendecompose(RSymmetric(m));
    EXPECT_NEAR(ed.eigenvalues(0), 1.0, 1e-14);
    EXPECT_NEAR(ed.eigenvalues(1), -1.0, 1e-14);
}

TEST(Eigendecompose, ReconstructsRandomHermitian) {
    Engine eng(3);
    for (int n = 1; n <= 16; ++n) {
        CMatrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = complex_normal(eng);
        const auto h = CHermitian::from_hermitian_part(a);
        const auto ed = eigendecompose(h);
        const CMatrix back = ed.eigenvectors * ed.eigenvalues.asDiagonal() * ed.eigenvectors.adjoint();
        EXPECT_LE((back - h.dense()).norm(), 1e-9 * h.dense().norm()) << "n=" << n;
        for (int i = 1; i < n; ++i) EXPECT_GE(ed.eigenvalues(i - 1), ed.eigenvalues(i));
    }
}

TEST(PsdSquareRoot, Identity) {
    const auto r = psd_square_root(CHermitian::identity(4));
    EXPECT_LE((r.dense() - CMatrix::Identity(4, 4)).norm(), 1e-12);
}

TEST(PsdSquareRoot, Diagonal) {
    RMatrix m(2, 2);
    m << 4, 0, 0, 9;
    const auto r = psd_square_root(RSymmetric(m));
    EXPECT_NEAR(r.dense()(0, 0), 2.0, 1e-12);
    EXPECT_NEAR(r.dense()(1, 1), 3.0, 1e-12);
    EXPECT_NEAR(r.dense()(0, 1), 0.0, 1e-12);
}

TEST(PsdSquareRoot, AllOnesIsRankOne) {
    const auto r = psd_square_root(RSymmetric(RMatrix::Ones(2, 2)));
    EXPECT_LE((r.dense() - RMatrix::Ones(2, 2) / std::sqrt(2.0)).norm(), 1e-12);
}

TEST(PsdSquareRoot, RoundTripRandomPsd) {
    Engine eng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 16;
        const auto m = random_psd(eng, n, 1 + trial % n);
        const auto r = psd_square_root(m);
        EXPECT_LE((r.dense() * r.dense() - m.dense()).norm(), 1e-8 * m.dense().norm()) << "trial " << trial;
    }
}

TEST(PsdSquareRoot, ClampsTinyNegativeRejectsLarge) {
    RMatrix m(2, 2);
    m << 1, 0, 0, -1e-9;
    EXPECT_NO_THROW(psd_square_root(RSymmetric(m)));
    m(1, 1) = -1e-3;
    EXPECT_THROW(psd_square_root(RSymmetric(m)), std::domain_error);
}

TEST(HermitianMatrix, RejectsAsymmetricInput) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 1) = cplx(1.0, 0.0);
    EXPECT_THROW(CHermitian{m}, std::invalid_argument);
    EXPECT_THROW(CHermitian{CMatrix(2, 3)}, std::invalid_argument);
}

TEST(RealEmbedding, PreservesTraceProducts) {
    Engine eng(9);
    const auto a = random_psd(eng, 5, 2);
    const auto b = random_psd(eng, 5, 3);
    const double direct = (a.dense() * b.dense()).trace().real();
    const double embedded = (real_embedding(a).dense() * real_embedding(b).dense()).trace() / 2.0;
    EXPECT_NEAR(direct, embedded, 1e-10 * std::abs(direct));
    EXPECT_LE((complex_from_embedding(real_embedding(a)).dense() - a.dense()).norm(), 1e-12);
}

}  // namespace
