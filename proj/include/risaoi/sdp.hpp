#pragma once

// Dense primal-dual interior-point solver for small semidefinite programs
//
//     maximize    tr(C X)
//     subject to  tr(A_k X)  = b_k      k = 1..E
//                 tr(G_m X) >= h_m      m = 1..I
//                 X Hermitian PSD
//
// Internally the problem is put in standard primal form with one slack per
// inequality (a nonnegative orthant block next to the PSD block) and solved
// with an infeasible-start HKM path-following method using Mehrotra
// predictor-corrector steps. Constraint matrices are factored once into sums
// of signed rank-one terms so the Schur complement costs O(q^2 + n^2 q)
// instead of O(m n^3); the unit-diagonal constraints that dominate the
// phase-shift relaxation are rank one.

#include "risaoi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace risaoi {

template <HermitianScalar T>
struct SdpConstraint {
    HermitianMatrix<T> matrix;
    double rhs = 0.0;
};

template <HermitianScalar T>
struct SdpProblem {
    HermitianMatrix<T> objective;  // maximize tr(objective * X)
    std::vector<SdpConstraint<T>> equalities;    // tr(A X) = b
    std::vector<SdpConstraint<T>> inequalities;  // tr(G X) >= h

    Eigen::Index dim() const noexcept { return objective.dim(); }

    void validate() const {
        const auto n = dim();
        if (n < 1) throw std::invalid_argument("SdpProblem: dim must be >= 1");
        if (equalities.empty())
            throw std::invalid_argument("SdpProblem: at least one equality constraint is required");
        auto check = [n](const auto& list, const char* what) {
            for (std::size_t k = 0; k < list.size(); ++k) {
                if (list[k].matrix.dim() != n)
                    throw std::invalid_argument(std::string("SdpProblem: ") + what + " constraint " +
                                                std::to_string(k) + " has mismatched dimension");
                if (!std::isfinite(list[k].rhs))
                    throw std::invalid_argument(std::string("SdpProblem: ") + what + " constraint " +
                                                std::to_string(k) + " has non-finite rhs");
            }
        };
        check(equalities, "equality");
        check(inequalities, "inequality");
    }
};

enum class SdpStatus { Optimal, MaxIterations, Infeasible };

inline const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "Optimal";
        case SdpStatus::MaxIterations: return "MaxIterations";
        case SdpStatus::Infeasible: return "Infeasible";
    }
    return "?";
}

template <HermitianScalar T>
struct SdpSolution {
    HermitianMatrix<T> primal;
    double objectiveValue = 0.0;  // tr(C X) at the returned primal
    double dualObjective = 0.0;
    /// |primal - dual| / (1 + |primal| + |dual|)
    double dualityGap = std::numeric_limits<double>::infinity();
    /// max_k |residual_k| / (1 + |rhs_k|), slacks included
    double primalInfeasibility = std::numeric_limits<double>::infinity();
    /// ||C - sum y A - Z||_F / (1 + ||C||_F)
    double dualInfeasibility = std::numeric_limits<double>::infinity();
    SdpStatus status = SdpStatus::MaxIterations;
    int iterations = 0;
};

inline constexpr double kDefaultSdpTolerance = 1e-7;
inline constexpr int kDefaultSdpMaxIterations = 100;

namespace detail {

// Constraint matrices as sums of signed rank-one terms
// A_k = sum_r w_r v_r v_r^H. Terms whose vector is a unit vector e_i (the
// diagonal constraints) are kept apart from dense terms, which turns most
// of the O(n^2 q) work into gathers.
template <HermitianScalar T>
class FactoredConstraints {
public:
    FactoredConstraints(const std::vector<const DenseMatrix<T>*>& mats, Eigen::Index n) : n_(n) {
        Terms dense;
        for (int k = 0; k < static_cast<int>(mats.size()); ++k) append(*mats[k], k, dense);
        dense_.resize(n, static_cast<Eigen::Index>(dense.vectors.size()));
        for (std::size_t r = 0; r < dense.vectors.size(); ++r) dense_.col(r) = dense.vectors[r];
        owner_.insert(owner_.end(), dense.owner.begin(), dense.owner.end());
        weight_.insert(weight_.end(), dense.weight.begin(), dense.weight.end());
    }

    Eigen::Index size() const { return static_cast<Eigen::Index>(owner_.size()); }
    int owner(Eigen::Index r) const { return owner_[r]; }
    double weight(Eigen::Index r) const { return weight_[r]; }

    /// V^H X V for Hermitian X, unit terms first.
    DenseMatrix<T> project(const DenseMatrix<T>& x) const {
        const auto nu = static_cast<Eigen::Index>(unitRow_.size());
        const auto nd = dense_.cols();
        DenseMatrix<T> out(nu + nd, nu + nd);
        for (Eigen::Index a = 0; a < nu; ++a)
            for (Eigen::Index b = 0; b < nu; ++b) out(a, b) = x(unitRow_[a], unitRow_[b]);
        if (nd > 0) {
            const DenseMatrix<T> xd = x * dense_;
            for (Eigen::Index a = 0; a < nu; ++a) out.row(a).tail(nd) = xd.row(unitRow_[a]);
            out.bottomLeftCorner(nd, nu) = out.topRightCorner(nu, nd).adjoint();
            out.bottomRightCorner(nd, nd).noalias() = dense_.adjoint() * xd;
        }
        return out;
    }

    /// Re tr(A_k W) for every constraint k, W not necessarily Hermitian.
    RVector traces(const DenseMatrix<T>& w, int m) const {
        RVector t = RVector::Zero(m);
        const auto nu = static_cast<Eigen::Index>(unitRow_.size());
        for (Eigen::Index a = 0; a < nu; ++a) t(owner_[a]) += weight_[a] * std::real(w(unitRow_[a], unitRow_[a]));
        if (dense_.cols() > 0) {
            const DenseMatrix<T> wd = w * dense_;
            for (Eigen::Index r = 0; r < dense_.cols(); ++r)
                t(owner_[nu + r]) += weight_[nu + r] * std::real(dense_.col(r).dot(wd.col(r)));
        }
        return t;
    }

    /// sum_k coeff_k A_k.
    DenseMatrix<T> combine(const RVector& coeff) const {
        const auto nu = static_cast<Eigen::Index>(unitRow_.size());
        DenseMatrix<T> acc;
        if (dense_.cols() > 0) {
            RVector scale(dense_.cols());
            for (Eigen::Index r = 0; r < dense_.cols(); ++r) scale(r) = weight_[nu + r] * coeff(owner_[nu + r]);
            acc.noalias() = dense_ * scale.asDiagonal() * dense_.adjoint();
            acc = (acc + acc.adjoint()).eval() * 0.5;
        } else {
            acc = DenseMatrix<T>::Zero(n_, n_);
        }
        for (Eigen::Index a = 0; a < nu; ++a) acc(unitRow_[a], unitRow_[a]) += weight_[a] * coeff(owner_[a]);
        return acc;
    }

private:
    struct Terms {
        std::vector<DenseVector<T>> vectors;
        std::vector<int> owner;
        std::vector<double> weight;
    };

    // Isolated diagonal entries become unit terms; the rest of the support
    // is eigendecomposed with negligible eigenvalues dropped.
    void append(const DenseMatrix<T>& a, int owner, Terms& dense) {
        std::vector<Eigen::Index> support;
        for (Eigen::Index i = 0; i < n_; ++i) {
            bool off = false;
            for (Eigen::Index j = 0; j < n_ && !off; ++j) off = j != i && a(i, j) != T(0);
            if (off) {
                support.push_back(i);
            } else if (a(i, i) != T(0)) {
                unitRow_.push_back(i);
                owner_.push_back(owner);
                weight_.push_back(std::real(a(i, i)));
            }
        }
        if (support.empty()) return;
        const auto s = static_cast<Eigen::Index>(support.size());
        DenseMatrix<T> sub(s, s);
        for (Eigen::Index i = 0; i < s; ++i)
            for (Eigen::Index j = 0; j < s; ++j) sub(i, j) = a(support[i], support[j]);
        Eigen::SelfAdjointEigenSolver<DenseMatrix<T>> es(sub);
        const RVector& lam = es.eigenvalues();
        const double cutoff = 1e-14 * std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
        for (Eigen::Index k = 0; k < s; ++k) {
            if (std::abs(lam(k)) <= cutoff) continue;
            DenseVector<T> v = DenseVector<T>::Zero(n_);
            for (Eigen::Index i = 0; i < s; ++i) v(support[i]) = es.eigenvectors()(i, k);
            dense.vectors.push_back(std::move(v));
            dense.owner.push_back(owner);
            dense.weight.push_back(lam(k));
        }
    }

    Eigen::Index n_;
    std::vector<Eigen::Index> unitRow_;
    std::vector<int> owner_;      // unit terms first, then dense terms
    std::vector<double> weight_;
    DenseMatrix<T> dense_;
};

// Re tr(A W) for Hermitian A and general W.
template <HermitianScalar T>
double trace_inner(const DenseMatrix<T>& a, const DenseMatrix<T>& w) {
    return std::real((a.array() * w.transpose().array()).sum());
}

// Smallest eigenvalue of the symmetric tridiagonal (diag, off) by Sturm
// bisection to relative accuracy ~1e-12.
inline double tridiagonal_min_eigenvalue(const RVector& diag, const RVector& off) {
    const Eigen::Index k = diag.size();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Eigen::Index i = 0; i < k; ++i) {
        const double r = (i > 0 ? std::abs(off(i - 1)) : 0.0) + (i + 1 < k ? std::abs(off(i)) : 0.0);
        lo = std::min(lo, diag(i) - r);
        hi = std::max(hi, diag(i) + r);
    }
    // Number of eigenvalues below x.
    auto count_below = [&](double x) {
        int c = 0;
        double d = 1.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            const double o2 = i > 0 ? off(i - 1) * off(i - 1) : 0.0;
            d = diag(i) - x - (i > 0 ? o2 / d : 0.0);
            if (d == 0.0) d = -1e-300;
            if (d < 0.0) ++c;
        }
        return c;
    };
    const double width = std::max(hi - lo, 1e-300);
    for (int it = 0; it < 200 && hi - lo > 1e-13 * width; ++it) {
        const double mid = 0.5 * (lo + hi);
        (count_below(mid) >= 1 ? hi : lo) = mid;
    }
    return lo;
}

// Smallest eigenvalue of Hermitian S by Lanczos with full
// reorthogonalisation. Exact (up to rounding) once the Krylov space spans
// the whole space; otherwise an upper bound that callers must safeguard.
template <HermitianScalar T>
double lanczos_min_eigenvalue(const DenseMatrix<T>& s, int maxSteps) {
    const Eigen::Index n = s.rows();
    const Eigen::Index k_max = std::min<Eigen::Index>(n, maxSteps);
    DenseMatrix<T> q(n, k_max);
    DenseVector<T> v(n), w(n), h(k_max);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = T(1.0 + 0.5 * std::sin(1.7 * static_cast<double>(i) + 0.3));
    v.normalize();
    RVector alpha(k_max), beta(k_max);
    const double scale = std::max(s.norm(), 1e-300);
    Eigen::Index k = 0;
    while (k < k_max) {
        q.col(k) = v;
        w.noalias() = s * v;
        alpha(k) = std::real(v.dot(w));
        h.head(k + 1).noalias() = q.leftCols(k + 1).adjoint() * w;
        w.noalias() -= q.leftCols(k + 1) * h.head(k + 1);
        h.head(k + 1).noalias() = q.leftCols(k + 1).adjoint() * w;
        w.noalias() -= q.leftCols(k + 1) * h.head(k + 1);
        beta(k) = w.norm();
        ++k;
        if (beta(k - 1) <= 1e-13 * scale) break;
        v = w / beta(k - 1);
    }
    return tridiagonal_min_eigenvalue(alpha.head(k), beta.head(k - 1));
}

// Estimate of the largest alpha with X + alpha dX PSD, X = L L^H positive
// definite: -1 / lambda_min(L^-1 dX L^-H), or infinity.
template <HermitianScalar T>
double max_psd_step(const Eigen::LLT<DenseMatrix<T>>& chol, const DenseMatrix<T>& dx) {
    DenseMatrix<T> tmp = chol.matrixL().solve(dx);
    DenseMatrix<T> s = chol.matrixL().solve(tmp.adjoint());
    s = (s + s.adjoint()).eval() * 0.5;
    const double lmin = lanczos_min_eigenvalue<T>(s, 20);
    return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

// Shrinks alpha until X + alpha dX admits a Cholesky factor.
template <HermitianScalar T>
double safeguard_psd_step(const DenseMatrix<T>& x, const DenseMatrix<T>& dx, double alpha) {
    for (int tries = 0; tries < 60 && alpha > 0.0; ++tries) {
        Eigen::LLT<DenseMatrix<T>> llt(x + alpha * dx);
        if (llt.info() == Eigen::Success) return alpha;
        alpha *= 0.8;
    }
    return 0.0;
}

inline double max_orthant_step(const RVector& s, const RVector& ds) {
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (ds(i) < 0.0) a = std::min(a, -s(i) / ds(i));
    return a;
}

}  // namespace detail

template <HermitianScalar T>
SdpSolution<T> solve_sdp(const SdpProblem<T>& problem, double tolerance = kDefaultSdpTolerance,
                         int maxIterations = kDefaultSdpMaxIterations) {
    using Mat = DenseMatrix<T>;
    using Vec = DenseVector<T>;
    if (!(tolerance > 0.0)) throw std::invalid_argument("solve_sdp: tolerance must be positive");
    if (maxIterations < 1) throw std::invalid_argument("solve_sdp: maxIterations must be >= 1");
    problem.validate();

    const Eigen::Index n = problem.dim();
    const int n_eq = static_cast<int>(problem.equalities.size());
    const int n_in = static_cast<int>(problem.inequalities.size());
    const int m = n_eq + n_in;
    const int p = n_in;  // slack count

    // Standard form: minimize tr(Cm X) s.t. tr(A_k X) + a_k . s = b_k.
    const Mat cm = -problem.objective.dense();
    std::vector<const Mat*> a(m);
    RVector b(m);
    std::vector<int> slack_of(m, -1);  // a_k = -e_{slack_of[k]}
    for (int k = 0; k < n_eq; ++k) {
        a[k] = &problem.equalities[k].matrix.dense();
        b(k) = problem.equalities[k].rhs;
    }
    for (int k = 0; k < n_in; ++k) {
        a[n_eq + k] = &problem.inequalities[k].matrix.dense();
        b(n_eq + k) = problem.inequalities[k].rhs;
        slack_of[n_eq + k] = k;
    }

    const detail::FactoredConstraints<T> fc(a, n);
    const Eigen::Index q = fc.size();

    // Starting point scaled to the data.
    const double c_norm = cm.norm();
    double max_a_norm = 0.0, x_scale = 10.0;
    for (int k = 0; k < m; ++k) {
        const double an = a[k]->norm() + (slack_of[k] >= 0 ? 1.0 : 0.0);
        max_a_norm = std::max(max_a_norm, an);
        x_scale = std::max(x_scale, static_cast<double>(n) * (1.0 + std::abs(b(k))) / (1.0 + an));
    }
    x_scale = std::max(x_scale, std::sqrt(static_cast<double>(n)));
    const double z_scale =
        std::max({10.0, std::sqrt(static_cast<double>(n)), max_a_norm, c_norm});

    Mat x = Mat::Identity(n, n) * x_scale;
    Mat z = Mat::Identity(n, n) * z_scale;
    RVector s = RVector::Constant(p, x_scale);
    RVector zs = RVector::Constant(p, z_scale);
    RVector y = RVector::Zero(m);

    const double total_dim = static_cast<double>(n + p);
    SdpSolution<T> out;

    auto sum_ya = [&](const RVector& coeff) { return fc.combine(coeff); };
    auto traces = [&](const Mat& w) { return fc.traces(w, m); };
    auto sum_ya_slack = [&](const RVector& coeff) {
        RVector acc = RVector::Zero(p);
        for (int k = 0; k < m; ++k)
            if (slack_of[k] >= 0) acc(slack_of[k]) -= coeff(k);
        return acc;
    };

    // Verdict when the iteration cannot continue: a large remaining primal
    // residual means no feasible point was reached.
    auto stuck_status = [&] {
        return out.primalInfeasibility > std::sqrt(tolerance) ? SdpStatus::Infeasible : SdpStatus::MaxIterations;
    };

    int stalled = 0;
    for (int iter = 0; iter <= maxIterations; ++iter) {
        // Residuals.
        RVector rp = b - traces(x);
        for (int k = 0; k < m; ++k)
            if (slack_of[k] >= 0) rp(k) += s(slack_of[k]);
        const Mat ya = sum_ya(y);
        Mat rd = cm - ya - z;
        rd = (rd + rd.adjoint()).eval() * 0.5;
        const RVector rd_lp = -sum_ya_slack(y) - zs;  // c = 0 for slacks

        const double pobj = detail::trace_inner<T>(cm, x);
        const double dobj = b.dot(y);
        const double comp = detail::trace_inner<T>(x, z) + s.dot(zs);
        const double mu = comp / total_dim;

        double pinf = 0.0;
        for (int k = 0; k < m; ++k) pinf = std::max(pinf, std::abs(rp(k)) / (1.0 + std::abs(b(k))));
        const double dinf =
            std::sqrt(rd.squaredNorm() + rd_lp.squaredNorm()) / (1.0 + c_norm);
        const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

        out.primal = HermitianMatrix<T>::from_hermitian_part(x);
        out.objectiveValue = -pobj;
        out.dualObjective = -dobj;
        out.dualityGap = gap;
        out.primalInfeasibility = pinf;
        out.dualInfeasibility = dinf;
        out.iterations = iter;

        if (gap <= tolerance && pinf <= tolerance && dinf <= tolerance) {
            out.status = SdpStatus::Optimal;
            return out;
        }
        // Dual ray: the dual objective grows without bound while sum y_k A_k
        // stays (relatively) negative semidefinite, so no primal point exists.
        if (dobj > 0.0) {
            const double lam_max = std::max(
                Eigen::SelfAdjointEigenSolver<Mat>(ya, Eigen::EigenvaluesOnly).eigenvalues()(n - 1),
                p > 0 ? sum_ya_slack(y).maxCoeff() : 0.0);
            if (lam_max <= 1e-8 * dobj && dobj > 1e6 * (1.0 + c_norm)) {
                out.status = SdpStatus::Infeasible;
                return out;
            }
        }
        if (!x.allFinite() || !z.allFinite() || x.norm() > 1e14 * (1.0 + x_scale) || stalled >= 5) {
            out.status = stuck_status();
            return out;
        }
        if (iter == maxIterations) break;

        Eigen::LLT<Mat> chol_z(z);
        Eigen::LLT<Mat> chol_x(x);
        if (chol_z.info() != Eigen::Success || chol_x.info() != Eigen::Success) {
            out.status = stuck_status();
            return out;
        }
        const Mat zinv = chol_z.solve(Mat::Identity(n, n));

        // Schur complement M_ij = Re tr(A_i X A_j Z^-1) + a_i^T diag(s/z) a_j.
        const Mat pv = fc.project(x);
        const Mat qv = fc.project(zinv);
        RMatrix schur = RMatrix::Zero(m, m);
        for (Eigen::Index r = 0; r < q; ++r) {
            const int i = fc.owner(r);
            const double wr = fc.weight(r);
            for (Eigen::Index t = 0; t < q; ++t) {
                schur(i, fc.owner(t)) += wr * fc.weight(t) * std::real(pv(r, t) * qv(t, r));
            }
        }
        for (int k = 0; k < m; ++k)
            if (slack_of[k] >= 0) schur(k, k) += s(slack_of[k]) / zs(slack_of[k]);
        schur = (schur + schur.transpose()).eval() * 0.5;
        Eigen::LDLT<RMatrix> schur_f(schur);
        if (schur_f.info() != Eigen::Success) {
            out.status = stuck_status();
            return out;
        }

        const Mat x_rd_zinv = x * rd * zinv;

        struct Direction {
            Mat dx, dz;
            RVector dy, ds, dzs;
        };
        // Solves the Newton system for centering sigma with optional
        // second-order correction from a predictor direction.
        auto direction = [&](double sigma, const Direction* pred) {
            const double smu = sigma * mu;
            Mat w = smu * zinv - x_rd_zinv;
            RVector w_lp = (smu - s.array() * rd_lp.array()).matrix().cwiseQuotient(zs);
            Mat second_order;
            if (pred) {
                second_order.noalias() = pred->dx * pred->dz * zinv;
                w -= second_order;
                w_lp -= (pred->ds.array() * pred->dzs.array() / zs.array()).matrix();
            }
            RVector rhs = b - traces(w);
            for (int k = 0; k < m; ++k)
                if (slack_of[k] >= 0) rhs(k) += w_lp(slack_of[k]);
            Direction d;
            d.dy = schur_f.solve(rhs);
            d.dz = rd - sum_ya(d.dy);
            d.dz = (d.dz + d.dz.adjoint()).eval() * 0.5;
            d.dzs = rd_lp - sum_ya_slack(d.dy);
            Mat g = x * d.dz * zinv;
            if (pred) g += second_order;
            d.dx = smu * zinv - x - 0.5 * (g + g.adjoint());
            RVector corr = RVector::Zero(p);
            if (pred) corr = pred->ds.cwiseProduct(pred->dzs);
            d.ds = ((smu - (s.array() * zs.array()) - s.array() * d.dzs.array() - corr.array()) /
                    zs.array())
                       .matrix();
            return d;
        };
        auto steps = [&](const Direction& d, double gamma, bool verify) {
            const double ap = std::min(detail::max_psd_step<T>(chol_x, d.dx), detail::max_orthant_step(s, d.ds));
            const double ad = std::min(detail::max_psd_step<T>(chol_z, d.dz), detail::max_orthant_step(zs, d.dzs));
            std::pair out_steps{std::min(1.0, gamma * ap), std::min(1.0, gamma * ad)};
            if (verify) {
                out_steps.first = detail::safeguard_psd_step<T>(x, d.dx, out_steps.first);
                out_steps.second = detail::safeguard_psd_step<T>(z, d.dz, out_steps.second);
            }
            return out_steps;
        };

        const Direction pred = direction(0.0, nullptr);
        const auto [ap0, ad0] = steps(pred, 1.0, false);
        const double mu_aff = (detail::trace_inner<T>(x + ap0 * pred.dx, z + ad0 * pred.dz) +
                               (s + ap0 * pred.ds).dot(zs + ad0 * pred.dzs)) /
                              total_dim;
        double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
        sigma = std::clamp(sigma, 0.0, 1.0);

        const Direction corr = direction(sigma, &pred);
        const double gamma = 0.9 + 0.09 * std::min(ap0, ad0);
        const auto [ap, ad] = steps(corr, gamma, true);

        stalled = (std::max(ap, ad) < 1e-8) ? stalled + 1 : 0;

        x += ap * corr.dx;
        x = (x + x.adjoint()).eval() * 0.5;
        s += ap * corr.ds;
        y += ad * corr.dy;
        z += ad * corr.dz;
        z = (z + z.adjoint()).eval() * 0.5;
        zs += ad * corr.dzs;
    }
    out.status = stuck_status();
    return out;
}

/// Real symmetric image of a complex Hermitian SDP via the 2n x 2n
/// embedding. Optimal values coincide; constraints are halved so that
/// tr(embed(A) embed(X)) / 2 = tr(A X) holds term by term.
inline SdpProblem<double> embed_real(const SdpProblem<cplx>& problem) {
    auto half = [](const CHermitian& h) {
        return RSymmetric::from_hermitian_part(real_embedding(h).dense() * 0.5);
    };
    SdpProblem<double> r;
    r.objective = half(problem.objective);
    for (const auto& c : problem.equalities) r.equalities.push_back({half(c.matrix), c.rhs});
    for (const auto& c : problem.inequalities) r.inequalities.push_back({half(c.matrix), c.rhs});
    return r;
}

}  // namespace risaoi
