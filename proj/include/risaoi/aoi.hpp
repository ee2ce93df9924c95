#pragma once

#include "risaoi/channel.hpp"
#include "risaoi/clustering.hpp"
#include "risaoi/noma.hpp"
#include "risaoi/ris_phase.hpp"

#include <charconv>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace risaoi {

enum class Scheme { Proposed, RaOcRps, RaRcRps, NoRis };

inline constexpr Scheme kAllSchemes[] = {Scheme::Proposed, Scheme::RaOcRps, Scheme::RaRcRps, Scheme::NoRis};

inline std::string_view scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Proposed: return "proposed";
        case Scheme::RaOcRps: return "ra-oc-rps";
        case Scheme::RaRcRps: return "ra-rc-rps";
        case Scheme::NoRis: return "no-ris";
    }
    return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
    for (Scheme s : kAllSchemes)
        if (scheme_name(s) == name) return s;
    return std::nullopt;
}

enum class RisAssignmentMode { KNearest, Random, None };
enum class PhaseMode { Optimized, Random, None };
enum class ClusteringMode { Hungarian, Random };

struct SchemePolicy {
    RisAssignmentMode assignment;
    PhaseMode phases;
    ClusteringMode clustering;

    static SchemePolicy of(Scheme s) {
        switch (s) {
            case Scheme::Proposed: return {RisAssignmentMode::KNearest, PhaseMode::Optimized, ClusteringMode::Hungarian};
            case Scheme::RaOcRps: return {RisAssignmentMode::Random, PhaseMode::Random, ClusteringMode::Hungarian};
            case Scheme::RaRcRps: return {RisAssignmentMode::Random, PhaseMode::Random, ClusteringMode::Random};
            case Scheme::NoRis: return {RisAssignmentMode::None, PhaseMode::None, ClusteringMode::Hungarian};
        }
        throw std::invalid_argument("unknown scheme");
    }
};

/// Physical and algorithmic settings in linear units.
struct SystemConfig {
    TopologyParams topology;
    FadingParams fading;
    int elements = 30;           // L
    int assignedRis = 3;         // k; 0 disables every reflected path
    int horizon = 100;           // T
    double budgetWatts = 0.0;    // P_max
    double thresholdLinear = 0.0;
    double noiseWatts = 0.0;
    Age initialAge = 1;
    PhaseOptimizerSettings phase;

    void validate() const {
        topology.validate();
        fading.validate();
        if (elements < 1) throw std::invalid_argument("config: L must be >= 1");
        if (assignedRis < 0 || assignedRis > topology.risCount)
            throw std::invalid_argument("config: k must satisfy 0 <= k <= N");
        if (horizon < 1) throw std::invalid_argument("config: T must be >= 1");
        if (!(budgetWatts > 0.0) || !(thresholdLinear > 0.0) || !(noiseWatts > 0.0))
            throw std::invalid_argument("config: budget, threshold and noise must be positive");
        if (initialAge < 1) throw std::invalid_argument("config: initial age must be >= 1");
    }
};

/// Ages after the latest slot plus the running time average of their mean.
class AoiState {
public:
    AoiState(int clusters, Age initialAge)
        : strong_(clusters, initialAge), weak_(clusters, initialAge) {
        if (clusters < 1 || initialAge < 1) throw std::invalid_argument("AoiState: invalid initialization");
    }

    const std::vector<Age>& strong() const noexcept { return strong_; }
    const std::vector<Age>& weak() const noexcept { return weak_; }
    int clusters() const noexcept { return static_cast<int>(strong_.size()); }
    int slots() const noexcept { return slots_; }
    /// Sum of all device ages over all slots so far.
    long long age_total() const noexcept { return ageTotal_; }

    /// (1/T) sum_t (1/2I) sum over clustered pairs of (Y_s(t) + Y_w(t)).
    double average_sum_aoi() const {
        return slots_ > 0 ? static_cast<double>(ageTotal_) / (2.0 * static_cast<double>(strong_.size()) * slots_)
                          : 0.0;
    }

    /// Applies one slot: every device resets to 1 on success, else ages by
    /// one. Success flags are indexed by device within its own set.
    void advance(const std::vector<char>& strongSuccess, const std::vector<char>& weakSuccess) {
        const auto n = strong_.size();
        if (strongSuccess.size() != n || weakSuccess.size() != n)
            throw std::invalid_argument("AoiState::advance: outcome size mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            strong_[i] = predicted_age(strong_[i], strongSuccess[i] != 0);
            weak_[i] = predicted_age(weak_[i], weakSuccess[i] != 0);
            ageTotal_ += strong_[i] + weak_[i];
        }
        ++slots_;
    }

private:
    std::vector<Age> strong_;
    std::vector<Age> weak_;
    int slots_ = 0;
    long long ageTotal_ = 0;
};

struct SlotTrace {
    int slot = 0;
    std::uint64_t channelHash = 0;
    ClusterAssignment clusters;
    std::vector<double> risMinGain;  // per RIS: achieved min combined gain over its served devices
    std::vector<double> weakCompositeGain;  // |composite|^2 per weak device
    std::vector<char> strongSuccess;
    std::vector<char> weakSuccess;
    std::vector<Age> strongAges;  // after the update
    std::vector<Age> weakAges;
};

/// Clusters devices from the I x I outcome grid and advances the ages.
/// `evaluate(s, w)` yields the PairOutcome of pairing strong s with weak w.
/// The clustering rng is only consumed for ClusteringMode::Random.
template <typename PairEvaluator>
SlotTrace cluster_and_advance(AoiState& state, PairEvaluator&& evaluate, ClusteringMode mode, Engine& clusteringRng) {
    const int n = state.clusters();
    SquareMatrix<PairOutcome> grid(n);
    for (int s = 0; s < n; ++s)
        for (int w = 0; w < n; ++w) grid(s, w) = evaluate(s, w);
    const CostMatrix cost = build_cost_matrix(state.strong(), state.weak(), grid);
    SlotTrace tr;
    tr.clusters = mode == ClusteringMode::Hungarian ? hungarian_solve(cost.entries) : random_clustering(n, clusteringRng);
    tr.strongSuccess.assign(n, 0);
    tr.weakSuccess.assign(n, 0);
    for (int s = 0; s < n; ++s) {
        const int w = tr.clusters.weakOf[s];
        tr.strongSuccess[s] = grid(s, w).strongSuccess;
        tr.weakSuccess[w] = grid(s, w).weakSuccess;
    }
    state.advance(tr.strongSuccess, tr.weakSuccess);
    tr.strongAges = state.strong();
    tr.weakAges = state.weak();
    return tr;
}

/// Optimized phases keyed by everything they depend on. Phases are a pure
/// function of (topology, fading, L, k, optimizer settings, seed, slot), so
/// runs that differ only in power, threshold, noise or horizon can share
/// them. Safe for concurrent use.
class PhaseCache {
public:
    struct Entry {
        PhaseConfig phases;
        std::vector<double> risMinGain;
    };

    static std::string fingerprint(const SystemConfig& c) {
        std::string out;
        auto put = [&out](double v) {
            char buf[32];
            auto r = std::to_chars(buf, buf + sizeof buf, v);
            out.append(buf, r.ptr);
            out.push_back('|');
        };
        const auto& t = c.topology;
        for (double v : {double(t.clusters), double(t.risCount), t.dS, t.dW, t.dR, t.centralAngle, t.bsHeight, t.risHeight})
            put(v);
        const auto& f = c.fading;
        for (double v : {f.ricianK, f.exponents.risToBs, f.exponents.weakToRis, f.exponents.strongToBs,
                         f.exponents.weakToBs, f.referencePathLossDb})
            put(v);
        for (double v : {double(c.elements), double(c.assignedRis), double(c.phase.grCandidates),
                         c.phase.sdpTolerance, double(c.phase.sdpMaxIterations)})
            put(v);
        return out;
    }

    std::shared_ptr<const Entry> find(const std::string& key) const {
        std::lock_guard lock(mutex_);
        auto it = map_.find(key);
        return it == map_.end() ? nullptr : it->second;
    }

    void insert(const std::string& key, std::shared_ptr<const Entry> e) {
        std::lock_guard lock(mutex_);
        map_.emplace(key, std::move(e));
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return map_.size();
    }

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::shared_ptr<const Entry>> map_;
};

/// Full per-slot pipeline: RIS assignment and phases, every candidate pair's
/// power interval and outcome, clustering, age update.
inline SlotTrace step_slot(AoiState& state, const ChannelSet& channels, const Topology& topology, Scheme scheme,
                           const SystemConfig& config, std::uint64_t seed, PhaseCache* cache = nullptr,
                           const std::string* fingerprint = nullptr) {
    const SchemePolicy policy = SchemePolicy::of(scheme);
    const int n = state.clusters();
    if (channels.clusters() != n) throw std::invalid_argument("step_slot: channel set does not match state");
    const auto uslot = static_cast<std::uint64_t>(channels.slot);

    const bool use_ris = policy.phases != PhaseMode::None && config.assignedRis >= 1 && channels.risCount() >= 1;
    std::optional<RisAssignment> assignment;
    PhaseConfig phases;
    std::vector<double> ris_min_gain;
    if (use_ris) {
        if (policy.assignment == RisAssignmentMode::KNearest) {
            assignment = assign_k_nearest(topology, config.assignedRis);
        } else {
            Engine e = keyed_engine(seed, StreamPurpose::RandomAssignment, {uslot});
            assignment = assign_random(n, channels.risCount(), config.assignedRis, e);
        }
        if (policy.phases == PhaseMode::Optimized) {
            std::string key;
            std::shared_ptr<const PhaseCache::Entry> hit;
            if (cache) {
                key = (fingerprint ? *fingerprint : PhaseCache::fingerprint(config)) + std::to_string(seed) + ':' +
                      std::to_string(channels.slot);
                hit = cache->find(key);
            }
            if (!hit) {
                auto e = std::make_shared<PhaseCache::Entry>();
                std::vector<RisPhaseReport> reports;
                e->phases = optimize_ris_phases(channels, *assignment, config.phase, seed, &reports);
                for (const auto& r : reports) e->risMinGain.push_back(r.minGain);
                hit = e;
                if (cache) cache->insert(key, hit);
            }
            phases = hit->phases;
            ris_min_gain = hit->risMinGain;
        } else {
            phases = random_phases(channels.risCount(), channels.elements, channels.slot, seed);
        }
    }

    std::vector<EffectiveChannels> per_weak;
    per_weak.reserve(n);
    std::vector<double> composite_gain;
    for (int w = 0; w < n; ++w) {
        per_weak.push_back(compose_effective_channels(channels, phases, assignment ? &*assignment : nullptr, 0, w));
        composite_gain.push_back(std::norm(per_weak.back().weakCompositeAssigned));
    }
    auto evaluate = [&](int s, int w) {
        EffectiveChannels eff = per_weak[w];
        eff.strongDirectGain = std::norm(channels.directStrong[s]);
        const PowerBounds pb =
            power_bounds(config.budgetWatts, eff, config.thresholdLinear, config.noiseWatts, config.budgetWatts);
        return evaluate_pair(config.budgetWatts, eff, pb, config.thresholdLinear, config.noiseWatts, config.budgetWatts);
    };
    Engine cluster_rng = keyed_engine(seed, StreamPurpose::RandomClustering, {uslot});
    SlotTrace tr = cluster_and_advance(state, evaluate, policy.clustering, cluster_rng);
    tr.slot = channels.slot;
    tr.channelHash = channel_hash(channels);
    tr.risMinGain = std::move(ris_min_gain);
    tr.weakCompositeGain = std::move(composite_gain);
    return tr;
}

struct HorizonResult {
    double averageSumAoi = 0.0;
    std::vector<SlotTrace> traces;
};

/// Runs slots 1..T on the topology and channels drawn from `seed`.
inline HorizonResult run_horizon(const SystemConfig& config, Scheme scheme, std::uint64_t seed,
                                 bool keepTraces = false, PhaseCache* cache = nullptr) {
    config.validate();
    const std::string fp = cache ? PhaseCache::fingerprint(config) : std::string();
    const Topology topology = sample_topology(config.topology, seed);
    AoiState state(config.topology.clusters, config.initialAge);
    HorizonResult out;
    for (int t = 1; t <= config.horizon; ++t) {
        const ChannelSet cs = sample_channels(topology, config.fading, config.elements, t, seed);
        SlotTrace tr = step_slot(state, cs, topology, scheme, config, seed, cache, cache ? &fp : nullptr);
        if (keepTraces) out.traces.push_back(std::move(tr));
    }
    out.averageSumAoi = state.average_sum_aoi();
    return out;
}

}  // namespace risaoi
