#pragma once

// Oracle checks against brute force or closed forms. The CLI `selftest`
// runs them at reduced sizes; the acceptance suite runs full sizes.

#include "risaoi/aoi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace risaoi::selftest {

struct CheckResult {
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

namespace detail {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline long long brute_force_min(const SquareMatrix<long long>& c) {
    std::vector<int> perm(c.size());
    std::iota(perm.begin(), perm.end(), 0);
    long long best = std::numeric_limits<long long>::max();
    do {
        long long t = 0;
        for (std::size_t i = 0; i < perm.size(); ++i) t += c(i, perm[i]);
        best = std::min(best, t);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace detail

/// Hungarian total vs exhaustive permutation minimum, integer costs.
inline CheckResult hungarian_optimality(int trials, std::uint64_t seed) {
    detail::Stopwatch sw;
    Engine eng(seed);
    std::uniform_int_distribution<int> dim(2, 8);
    std::uniform_int_distribution<long long> entry(0, 50);
    int mismatches = 0, invalid = 0;
    for (int t = 0; t < trials; ++t) {
        const int n = dim(eng);
        SquareMatrix<long long> c(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) c(i, j) = entry(eng);
        const auto a = hungarian_solve(c);
        if (!a.is_permutation()) ++invalid;
        else if (assignment_cost(c, a) != detail::brute_force_min(c)) ++mismatches;
    }
    CheckResult r;
    r.seconds = sw.seconds();
    r.pass = mismatches == 0 && invalid == 0;
    std::ostringstream os;
    os << trials << " matrices, " << mismatches << " suboptimal, " << invalid << " invalid";
    r.detail = os.str();
    return r;
}

/// Inside [pMin, pMax] both thresholds hold; 1% beyond either bound the
/// matching threshold fails. Draws are repeated until `draws` feasible
/// intervals with a SINR-limited pMax have been checked.
inline CheckResult power_interval(int draws, std::uint64_t seed) {
    detail::Stopwatch sw;
    Engine eng(seed);
    std::uniform_real_distribution<double> log_u(-2.0, 2.0);
    int checked = 0, violations = 0, attempts = 0;
    while (checked < draws && attempts < 1000 * draws) {
        ++attempts;
        const double zeta = std::pow(10.0, log_u(eng));
        const double sigma2 = std::pow(10.0, log_u(eng));
        const double ps = std::pow(10.0, 2.0 + log_u(eng));
        EffectiveChannels eff;
        eff.strongDirectGain = std::pow(10.0, log_u(eng));
        eff.assignedReflection = complex_normal(eng);
        eff.weakCompositeAssigned = complex_normal(eng) + eff.assignedReflection;
        eff.weakCompositeAll = eff.weakCompositeAssigned + 0.3 * complex_normal(eng);
        const double budget = 1e300;
        const PowerBounds pb = power_bounds(ps, eff, zeta, sigma2, budget);
        if (!pb.feasible || pb.pMaxFromBudget || !(pb.pMin < pb.pMax)) continue;
        ++checked;
        for (int i = 0; i < 10; ++i) {
            const double pw = pb.pMin + (pb.pMax - pb.pMin) * i / 9.0;
            if (!meets_threshold(sinr_strong(ps, pw, eff, sigma2), zeta)) ++violations;
            if (!meets_threshold(sinr_weak(pw, eff, sigma2), zeta)) ++violations;
        }
        if (meets_threshold(sinr_strong(ps, pb.pMax * 1.01, eff, sigma2), zeta)) ++violations;
        if (meets_threshold(sinr_weak(pb.pMin * 0.99, eff, sigma2), zeta)) ++violations;
    }
    CheckResult r;
    r.seconds = sw.seconds();
    r.pass = checked == draws && violations == 0;
    std::ostringstream os;
    os << checked << " feasible draws, " << violations << " violations";
    r.detail = os.str();
    return r;
}

/// Single served device: post-randomization gain vs the aligned-phase
/// optimum (sum_l |z_l| + |h|)^2.
inline CheckResult sdr_single_user(int instances, std::uint64_t seed, double relTol = 0.01) {
    detail::Stopwatch sw;
    Engine eng(seed);
    std::uniform_int_distribution<int> len(1, 16);
    PhaseOptimizerSettings settings;
    double worst = 0.0;
    int failures = 0;
    for (int t = 0; t < instances; ++t) {
        const int l = len(eng);
        CVector z(l);
        for (int i = 0; i < l; ++i) z(i) = complex_normal(eng);
        const cplx h = complex_normal(eng);
        double opt = std::abs(h);
        for (int i = 0; i < l; ++i) opt += std::abs(z(i));
        opt *= opt;
        Engine gr(seed + 1000003ULL * (t + 1));
        const CVector phi = optimize_single_ris({{z, h}}, l, settings, gr);
        const double rel = std::abs(combined_gain(phi, z, h) - opt) / opt;
        worst = std::max(worst, rel);
        if (!(rel <= relTol)) ++failures;
    }
    CheckResult r;
    r.seconds = sw.seconds();
    r.pass = failures == 0;
    std::ostringstream os;
    os << instances << " instances, worst relative gap " << worst << ", " << failures << " beyond " << relTol;
    r.detail = os.str();
    return r;
}

/// Several served devices: post-randomization min-gain vs the best of
/// `samples` uniform random phase vectors.
inline CheckResult sdr_multi_user(int instances, int samples, std::uint64_t seed, double factor = 0.98) {
    detail::Stopwatch sw;
    Engine eng(seed);
    std::uniform_int_distribution<int> len(2, 8);
    std::uniform_int_distribution<int> users(2, 3);
    PhaseOptimizerSettings settings;
    double worst_ratio = std::numeric_limits<double>::infinity();
    int failures = 0;
    for (int t = 0; t < instances; ++t) {
        const int l = len(eng);
        std::vector<ServedLink> links(users(eng));
        for (auto& s : links) {
            s.cascaded.resize(l);
            for (int i = 0; i < l; ++i) s.cascaded(i) = complex_normal(eng);
            s.direct = complex_normal(eng);
        }
        Engine gr(seed + 7919ULL * (t + 1));
        const CVector phi = optimize_single_ris(links, l, settings, gr);
        double achieved = std::numeric_limits<double>::infinity();
        for (const auto& s : links) achieved = std::min(achieved, combined_gain(phi, s.cascaded, s.direct));
        double best = 0.0;
        CVector v(l);
        for (int k = 0; k < samples; ++k) {
            for (int i = 0; i < l; ++i) v(i) = std::polar(1.0, 2.0 * std::numbers::pi * uniform01(eng));
            double g = std::numeric_limits<double>::infinity();
            for (const auto& s : links) g = std::min(g, combined_gain(v, s.cascaded, s.direct));
            best = std::max(best, g);
        }
        worst_ratio = std::min(worst_ratio, achieved / best);
        if (!(achieved >= factor * best)) ++failures;
    }
    CheckResult r;
    r.seconds = sw.seconds();
    r.pass = failures == 0;
    std::ostringstream os;
    os << instances << " instances, worst achieved/random-best " << worst_ratio << ", " << failures << " below "
       << factor;
    r.detail = os.str();
    return r;
}

/// maximize tr(CX), diag(X) = 1: duality gap and upper bound over sampled
/// rank-one feasible points.
inline CheckResult sdp_validity(int instances, int samples, std::uint64_t seed, double gapTol = 1e-6) {
    detail::Stopwatch sw;
    Engine eng(seed);
    std::uniform_int_distribution<int> dim(2, 12);
    int failures = 0;
    double worst_gap = 0.0, worst_excess = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < instances; ++t) {
        const int n = dim(eng);
        CMatrix c(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) c(i, j) = complex_normal(eng);
        SdpProblem<cplx> p;
        p.objective = CHermitian::from_hermitian_part(c);
        for (int i = 0; i < n; ++i) p.equalities.push_back({CHermitian::unit_diagonal(n, i), 1.0});
        const auto sol = solve_sdp(p);
        bool ok = sol.status == SdpStatus::Optimal && sol.dualityGap <= gapTol;
        worst_gap = std::max(worst_gap, sol.dualityGap);
        const CMatrix& cd = p.objective.dense();
        CVector x(n);
        for (int k = 0; k < samples; ++k) {
            for (int i = 0; i < n; ++i) x(i) = std::polar(1.0, 2.0 * std::numbers::pi * uniform01(eng));
            const double v = std::real(x.dot(cd * x));
            const double excess = v - sol.objectiveValue;
            worst_excess = std::max(worst_excess, excess);
            if (excess > gapTol * (1.0 + std::abs(sol.objectiveValue))) ok = false;
        }
        if (!ok) ++failures;
    }
    CheckResult r;
    r.seconds = sw.seconds();
    r.pass = failures == 0;
    std::ostringstream os;
    os << instances << " instances, worst gap " << worst_gap << ", max sampled excess over objective "
       << worst_excess << ", " << failures << " failures";
    r.detail = os.str();
    return r;
}

/// Every device succeeds independently with probability p each slot; the
/// long-run mean age must approach 1/p.
inline CheckResult aoi_renewal(double p, long slots, int clusters, std::uint64_t seed, double relTol = 0.05) {
    detail::Stopwatch sw;
    AoiState state(clusters, 1);
    Engine draws = keyed_engine(seed, StreamPurpose::Stub);
    Engine clustering = keyed_engine(seed, StreamPurpose::RandomClustering);
    std::bernoulli_distribution coin(p);
    std::vector<char> s_ok(clusters), w_ok(clusters);
    for (long t = 0; t < slots; ++t) {
        for (int i = 0; i < clusters; ++i) {
            s_ok[i] = coin(draws);
            w_ok[i] = coin(draws);
        }
        cluster_and_advance(
            state, [&](int s, int w) { return PairOutcome{s_ok[s] != 0, w_ok[w] != 0}; }, ClusteringMode::Hungarian,
            clustering);
    }
    const double mean = state.average_sum_aoi();
    const double expected = 1.0 / p;
    CheckResult r;
    r.seconds = sw.seconds();
    r.pass = std::abs(mean - expected) <= relTol * expected;
    std::ostringstream os;
    os << "p=" << p << ": mean age " << mean << " vs " << expected;
    r.detail = os.str();
    return r;
}

}  // namespace risaoi::selftest
