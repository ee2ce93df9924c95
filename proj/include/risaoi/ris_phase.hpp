#pragma once

#include "risaoi/channel.hpp"
#include "risaoi/linalg.hpp"
#include "risaoi/rng.hpp"
#include "risaoi/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace risaoi {

/// Which RISs serve each weak device.
struct RisAssignment {
    std::vector<std::vector<int>> perWeak;  // ascending-distance order for k-nearest
    int k = 0;
    int risCount = 0;

    /// Weak devices served by RIS n, ascending.
    std::vector<int> served_by(int n) const {
        std::vector<int> out;
        for (int w = 0; w < static_cast<int>(perWeak.size()); ++w)
            if (std::find(perWeak[w].begin(), perWeak[w].end(), n) != perWeak[w].end()) out.push_back(w);
        return out;
    }
};

inline RisAssignment assign_k_nearest(const Topology& topology, int k) {
    const int ris = topology.risCount();
    if (k < 1 || k > ris)
        throw std::invalid_argument("assign_k_nearest: k must satisfy 1 <= k <= N (k=" + std::to_string(k) +
                                    ", N=" + std::to_string(ris) + ")");
    RisAssignment a;
    a.k = k;
    a.risCount = ris;
    for (const auto& w : topology.weak) {
        std::vector<int> idx(ris);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) {
            return distance(w, topology.ris[x]) < distance(w, topology.ris[y]);
        });
        idx.resize(k);
        a.perWeak.push_back(std::move(idx));
    }
    return a;
}

/// k distinct RISs per weak device drawn uniformly at random.
inline RisAssignment assign_random(int clusters, int risCount, int k, Engine& eng) {
    if (k < 1 || k > risCount) throw std::invalid_argument("assign_random: k must satisfy 1 <= k <= N");
    RisAssignment a;
    a.k = k;
    a.risCount = risCount;
    for (int w = 0; w < clusters; ++w) {
        std::vector<int> idx(risCount);
        std::iota(idx.begin(), idx.end(), 0);
        for (int j = 0; j < k; ++j) {
            std::uniform_int_distribution<int> pick(j, risCount - 1);
            std::swap(idx[j], idx[pick(eng)]);
        }
        idx.resize(k);
        a.perWeak.push_back(std::move(idx));
    }
    return a;
}

/// Reflection coefficients e^{j theta_l} of every RIS element, one vector
/// per RIS. An empty config means no RIS takes part.
struct PhaseConfig {
    std::vector<CVector> perRis;

    bool unit_modulus(double tol = 1e-10) const {
        for (const auto& v : perRis)
            for (Eigen::Index l = 0; l < v.size(); ++l)
                if (std::abs(std::abs(v(l)) - 1.0) > tol) return false;
        return true;
    }
};

inline CVector random_phase_vector(int elements, Engine& eng) {
    CVector v(elements);
    for (int l = 0; l < elements; ++l) v(l) = std::polar(1.0, 2.0 * std::numbers::pi * uniform01(eng));
    return v;
}

/// Uniform phases for every RIS, one keyed stream per (slot, RIS).
inline PhaseConfig random_phases(int risCount, int elements, int slot, std::uint64_t seed) {
    PhaseConfig pc;
    for (int n = 0; n < risCount; ++n) {
        Engine e = keyed_engine(seed, StreamPurpose::RandomPhases,
                                {static_cast<std::uint64_t>(slot), static_cast<std::uint64_t>(n)});
        pc.perRis.push_back(random_phase_vector(elements, e));
    }
    return pc;
}

/// Cascaded coefficients Z_l = conj(h_{R->b,l}) h_{w->R,l}; the reflected
/// signal under coefficients phi is sum_l phi_l Z_l.
inline CVector cascade(const CVector& weakToRis, const CVector& risToBs) {
    if (weakToRis.size() != risToBs.size()) throw std::invalid_argument("cascade: length mismatch");
    return risToBs.conjugate().cwiseProduct(weakToRis);
}

inline cplx reflected(const CVector& phases, const CVector& cascaded) { return (phases.array() * cascaded.array()).sum(); }

/// |sum_l phi_l Z_l + h_{w->b}|^2
inline double combined_gain(const CVector& phases, const CVector& cascaded, cplx direct) {
    return std::norm(reflected(phases, cascaded) + direct);
}

/// Lifted quadratic form Theta for u_bar = [u; 1] with phi = conj(u):
/// u_bar^H Theta u_bar + |h|^2 = |sum_l phi_l Z_l + h|^2.
///
///     Theta = [ Z Z^H        Z conj(h) ]
///             [ h Z^H        0         ]
inline CHermitian build_lifted_matrix(cplx weakDirect, const CVector& weakToRis, const CVector& risToBs) {
    const CVector z = cascade(weakToRis, risToBs);
    const auto len = z.size();
    CMatrix theta = CMatrix::Zero(len + 1, len + 1);
    theta.topLeftCorner(len, len) = z * z.adjoint();
    theta.topRightCorner(len, 1) = z * std::conj(weakDirect);
    theta.bottomLeftCorner(1, len) = weakDirect * z.adjoint();
    return CHermitian::from_hermitian_part(theta);
}

struct PhaseOptimizerSettings {
    int grCandidates = 1000;
    double sdpTolerance = kDefaultSdpTolerance;
    int sdpMaxIterations = kDefaultSdpMaxIterations;
};

/// Per-RIS diagnostics.
struct RisPhaseReport {
    std::vector<int> served;
    double minGain = 0.0;     // achieved min over served devices of the combined gain
    double upperBound = 0.0;  // SDR bound on that min (0 when not solved)
    SdpStatus sdpStatus = SdpStatus::Optimal;
    bool solved = false;      // SDR + randomization was used
    bool fallback = false;    // random search replaced a failed SDR
};

/// One served device as seen by a single RIS.
struct ServedLink {
    CVector cascaded;  // Z
    cplx direct;       // h_{w->b}
};

namespace detail {

inline double min_gain(const CVector& phases, const std::vector<ServedLink>& links) {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& s : links) g = std::min(g, combined_gain(phases, s.cascaded, s.direct));
    return g;
}

inline CVector best_random_phases(const std::vector<ServedLink>& links, int elements, int candidates,
                                  Engine& eng, double& best) {
    CVector best_v = random_phase_vector(elements, eng);
    best = detail::min_gain(best_v, links);
    for (int c = 1; c < candidates; ++c) {
        CVector v = random_phase_vector(elements, eng);
        const double g = detail::min_gain(v, links);
        if (g > best) {
            best = g;
            best_v = std::move(v);
        }
    }
    return best_v;
}

// Unit-modulus coefficients from a lifted candidate x = [u; t]: phi_l = conj(u_l / t) / |u_l / t|.
inline CVector phases_from_lifted(const CVector& x) {
    const auto len = x.size() - 1;
    // phi_l = conj(x_l / t) / |x_l / t|; only the direction of x_l conj(t) matters.
    const cplx t = std::norm(x(len)) > 0.0 ? x(len) : cplx(1.0, 0.0);
    CVector phi(len);
    for (Eigen::Index l = 0; l < len; ++l) {
        const cplx u = std::conj(x(l) * std::conj(t));
        const double m = std::norm(u);
        phi(l) = m > 0.0 ? u / std::sqrt(m) : cplx(1.0, 0.0);
    }
    return phi;
}

}  // namespace detail

/// Max-min SDR for one RIS:
///
///     maximize xi  s.t.  tr(Theta_w U) + |h_w|^2 >= xi  for each served w,
///                        diag(U) = 1,  U PSD  ((L+1) x (L+1))
///
/// xi is carried as an extra diagonal entry of the PSD variable (xi >= 0
/// holds at the optimum because every combined gain is a squared modulus).
/// Channels are normalised so the largest lifted vector has unit norm.
/// Returns the SDP solution on the normalised scale and the scale factor.
inline SdpProblem<cplx> max_min_relaxation(const std::vector<ServedLink>& links, double& gainScale) {
    if (links.empty()) throw std::invalid_argument("max_min_relaxation: no served devices");
    const auto len = links.front().cascaded.size();
    double norm2 = 0.0;
    for (const auto& s : links) norm2 = std::max(norm2, s.cascaded.squaredNorm() + std::norm(s.direct));
    gainScale = norm2 > 0.0 ? 1.0 / norm2 : 1.0;
    const double amp = std::sqrt(gainScale);

    const auto dim = len + 2;
    const auto xi = len + 1;
    SdpProblem<cplx> p;
    p.objective = CHermitian::unit_diagonal(dim, xi);
    for (Eigen::Index i = 0; i <= len; ++i) p.equalities.push_back({CHermitian::unit_diagonal(dim, i), 1.0});
    for (const auto& s : links) {
        const CVector z = s.cascaded * amp;
        const cplx h = s.direct * amp;
        CMatrix g = CMatrix::Zero(dim, dim);
        g.topLeftCorner(len, len) = z * z.adjoint();
        g.block(0, len, len, 1) = z * std::conj(h);
        g.block(len, 0, 1, len) = h * z.adjoint();
        g(xi, xi) = -1.0;
        p.inequalities.push_back({CHermitian::from_hermitian_part(g), -std::norm(h)});
    }
    return p;
}

/// SDR followed by Gaussian randomization for a single RIS serving `links`.
/// Candidates are x = U^{1/2} r with r ~ CN(0, I), drawn through the
/// eigen-factor of U (same distribution, fewer flops); the principal
/// eigenvector is always tried as well. If the SDP fails, the best of the
/// same number of uniform random phase vectors is used.
inline CVector optimize_single_ris(const std::vector<ServedLink>& links, int elements,
                                   const PhaseOptimizerSettings& settings, Engine& eng,
                                   RisPhaseReport* report = nullptr) {
    if (settings.grCandidates < 1) throw std::invalid_argument("optimize_single_ris: grCandidates must be >= 1");
    RisPhaseReport rep;
    if (links.empty()) {
        CVector v = random_phase_vector(elements, eng);
        if (report) *report = rep;
        return v;
    }
    double scale = 1.0;
    SdpSolution<cplx> sol;
    bool ok = false;
    try {
        const auto prob = max_min_relaxation(links, scale);
        sol = solve_sdp(prob, settings.sdpTolerance, settings.sdpMaxIterations);
        ok = sol.status != SdpStatus::Infeasible;
    } catch (const std::exception&) {
        ok = false;
    }
    rep.sdpStatus = sol.status;

    CVector best;
    double best_gain = -1.0;
    if (ok) {
        rep.solved = true;
        rep.upperBound = std::max(sol.dualObjective, sol.objectiveValue) / scale;
        const CHermitian lifted = CHermitian::from_hermitian_part(sol.primal.dense().topLeftCorner(elements + 1, elements + 1));
        const auto ed = eigendecompose(lifted);
        const double lmax = std::max(ed.eigenvalues(0), 0.0);
        Eigen::Index rank = 0;
        while (rank < ed.eigenvalues.size() && ed.eigenvalues(rank) > 1e-9 * lmax) ++rank;
        rank = std::max<Eigen::Index>(rank, 1);
        CMatrix factor = ed.eigenvectors.leftCols(rank);
        for (Eigen::Index c = 0; c < rank; ++c) factor.col(c) *= std::sqrt(std::max(ed.eigenvalues(c), 0.0));

        auto consider = [&](const CVector& x) {
            CVector phi = detail::phases_from_lifted(x);
            const double g = detail::min_gain(phi, links);
            if (g > best_gain) {
                best_gain = g;
                best = std::move(phi);
            }
        };
        consider(ed.eigenvectors.col(0));
        CVector r(rank);
        for (int c = 0; c < settings.grCandidates; ++c) {
            for (Eigen::Index j = 0; j < rank; ++j) r(j) = complex_normal(eng);
            consider(factor * r);
        }
    } else {
        rep.fallback = true;
        best = detail::best_random_phases(links, elements, settings.grCandidates, eng, best_gain);
    }
    rep.minGain = best_gain;
    if (report) *report = rep;
    return best;
}

/// Optimizes every RIS independently over the weak devices assigned to it.
/// RISs serving nobody receive uniform random phases. Each RIS draws from
/// its own (seed, slot, RIS) stream, so results do not depend on the order
/// in which RISs are processed.
inline PhaseConfig optimize_ris_phases(const ChannelSet& channels, const RisAssignment& assignment,
                                       const PhaseOptimizerSettings& settings, std::uint64_t seed,
                                       std::vector<RisPhaseReport>* reports = nullptr) {
    const int ris = channels.risCount();
    if (assignment.risCount != ris || static_cast<int>(assignment.perWeak.size()) != channels.clusters())
        throw std::invalid_argument("optimize_ris_phases: assignment does not match channel dimensions");
    PhaseConfig pc;
    if (reports) reports->assign(ris, {});
    const auto uslot = static_cast<std::uint64_t>(channels.slot);
    for (int n = 0; n < ris; ++n) {
        const auto served = assignment.served_by(n);
        if (served.empty()) {
            Engine e = keyed_engine(seed, StreamPurpose::RandomPhases, {uslot, static_cast<std::uint64_t>(n)});
            pc.perRis.push_back(random_phase_vector(channels.elements, e));
            continue;
        }
        std::vector<ServedLink> links;
        for (int w : served)
            links.push_back({cascade(channels.weak_to_ris(w, n), channels.risToBs[n]), channels.directWeak[w]});
        Engine e = keyed_engine(seed, StreamPurpose::GaussianRandomization, {uslot, static_cast<std::uint64_t>(n)});
        RisPhaseReport rep;
        pc.perRis.push_back(optimize_single_ris(links, channels.elements, settings, e, &rep));
        rep.served = served;
        if (reports) (*reports)[n] = std::move(rep);
    }
    return pc;
}

}  // namespace risaoi
