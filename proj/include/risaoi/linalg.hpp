#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace risaoi {

using cplx = std::complex<double>;

template <typename T>
using DenseMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using DenseVector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using CMatrix = DenseMatrix<cplx>;
using CVector = DenseVector<cplx>;
using RMatrix = DenseMatrix<double>;
using RVector = DenseVector<double>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename T>
concept HermitianScalar = std::is_same_v<T, double> || std::is_same_v<T, cplx>;

// Entry-wise Hermitian tolerance for accepting caller data.
inline constexpr double kHermitianTolerance = 1e-12;
// Eigenvalues above this are "numerically PSD".
inline constexpr double kPsdClampTolerance = 1e-8;
// Eigenvalues below this signal a genuinely indefinite input.
inline constexpr double kPsdRejectTolerance = 1e-6;

/// Square matrix equal to its conjugate transpose. The stored entries are
/// exactly Hermitian; inputs within kHermitianTolerance are symmetrized.
template <HermitianScalar T>
class HermitianMatrix {
public:
    using Scalar = T;
    using Dense = DenseMatrix<T>;

    HermitianMatrix() = default;

    explicit HermitianMatrix(Dense m) : m_(std::move(m)) {
        if (m_.rows() < 1 || m_.rows() != m_.cols())
            throw std::invalid_argument("HermitianMatrix: matrix must be square with dim >= 1");
        if (!m_.allFinite())
            throw std::invalid_argument("HermitianMatrix: non-finite entry");
        const double asym = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
        if (asym > kHermitianTolerance)
            throw std::invalid_argument("HermitianMatrix: asymmetry " + std::to_string(asym) +
                                        " exceeds tolerance");
        Dense sym = (m_ + m_.adjoint()) * 0.5;
        m_ = std::move(sym);
    }

    static HermitianMatrix identity(Eigen::Index n) { return HermitianMatrix(Dense::Identity(n, n)); }
    static HermitianMatrix zero(Eigen::Index n) { return HermitianMatrix(Dense::Zero(n, n)); }
    /// e_i e_i^T
    static HermitianMatrix unit_diagonal(Eigen::Index n, Eigen::Index i) {
        Dense d = Dense::Zero(n, n);
        d(i, i) = T(1);
        return HermitianMatrix(std::move(d));
    }
    /// Trusted construction: symmetrizes without checking.
    static HermitianMatrix from_hermitian_part(const Dense& m) {
        HermitianMatrix h;
        h.m_ = (m + m.adjoint()) * 0.5;
        return h;
    }

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const Dense& dense() const noexcept { return m_; }
    T operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    /// Re tr(this * other), the real inner product of Hermitian matrices.
    double inner(const HermitianMatrix& other) const {
        return std::real((m_.array() * other.m_.conjugate().array()).sum());
    }

    friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
        return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
    }

private:
    Dense m_;
};

using CHermitian = HermitianMatrix<cplx>;
using RSymmetric = HermitianMatrix<double>;

template <HermitianScalar T>
struct EigenDecomposition {
    RVector eigenvalues;        // descending
    DenseMatrix<T> eigenvectors;  // column k pairs with eigenvalues(k)
};

template <HermitianScalar T>
EigenDecomposition<T> eigendecompose(const HermitianMatrix<T>& m) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix<T>> es(m.dense());
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: eigensolver failed to converge");
    // Eigen returns ascending order.
    EigenDecomposition<T> out;
    out.eigenvalues = es.eigenvalues().reverse();
    out.eigenvectors = es.eigenvectors().rowwise().reverse();
    return out;
}

/// Principal square root of a (numerically) PSD matrix. Eigenvalues in
/// [-kPsdRejectTolerance, 0) are clamped to zero; anything more negative is
/// rejected because it means the producer of `m` failed.
template <HermitianScalar T>
HermitianMatrix<T> psd_square_root(const HermitianMatrix<T>& m) {
    const auto ed = eigendecompose(m);
    const double scale = std::max(1.0, ed.eigenvalues.cwiseAbs().maxCoeff());
    const double lmin = ed.eigenvalues.minCoeff();
    if (lmin < -kPsdRejectTolerance * scale)
        throw std::domain_error("psd_square_root: eigenvalue " + std::to_string(lmin) +
                                " is not PSD");
    RVector root = ed.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    DenseMatrix<T> r = ed.eigenvectors * root.asDiagonal() * ed.eigenvectors.adjoint();
    return HermitianMatrix<T>::from_hermitian_part(r);
}

template <HermitianScalar T>
double min_eigenvalue(const HermitianMatrix<T>& m) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix<T>> es(m.dense(), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/// Real symmetric 2n x 2n image [[Re, -Im], [Im, Re]] of a Hermitian matrix.
/// Eigenvalues are preserved (each with doubled multiplicity) and
/// tr(A B) = tr(embed(A) embed(B)) / 2.
inline RSymmetric real_embedding(const CHermitian& h) {
    const auto n = h.dim();
    RMatrix r(2 * n, 2 * n);
    const RMatrix re = h.dense().real();
    const RMatrix im = h.dense().imag();
    r.topLeftCorner(n, n) = re;
    r.bottomRightCorner(n, n) = re;
    r.topRightCorner(n, n) = -im;
    r.bottomLeftCorner(n, n) = im;
    return RSymmetric::from_hermitian_part(r);
}

/// Inverse of real_embedding for matrices of the embedded form; the
/// Hermitian part is recovered by averaging the two copies.
inline CHermitian complex_from_embedding(const RSymmetric& r) {
    const auto n2 = r.dim();
    if (n2 % 2 != 0) throw std::invalid_argument("complex_from_embedding: odd dimension");
    const auto n = n2 / 2;
    const RMatrix& d = r.dense();
    RMatrix re = 0.5 * (d.topLeftCorner(n, n) + d.bottomRightCorner(n, n));
    RMatrix im = 0.5 * (d.bottomLeftCorner(n, n) - d.topRightCorner(n, n));
    CMatrix c(n, n);
    c.real() = re;
    c.imag() = im;
    return CHermitian::from_hermitian_part(c);
}

}  // namespace risaoi
