#pragma once

#include "risaoi/channel.hpp"
#include "risaoi/ris_phase.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace risaoi {

/// Channels seen by the BS for one candidate (strong, weak) pair.
struct EffectiveChannels {
    double strongDirectGain = 0.0;  // |h_{s->b}|^2
    cplx weakCompositeAll{};        // h_{w->b} + sum over all RISs (interference term at the strong decode)
    cplx weakCompositeAssigned{};   // h_{w->b} + assigned-RIS sum + non-assigned-RIS sum (post-SIC weak decode)
    cplx assignedReflection{};      // assigned-RIS sum alone
};

/// Composite channels of weak device `weak` under `phases`. Reflections from
/// every RIS add at the BS whether or not the RIS is assigned to the device;
/// an empty PhaseConfig disables all reflected paths.
inline EffectiveChannels compose_effective_channels(const ChannelSet& channels, const PhaseConfig& phases,
                                                    const RisAssignment* assignment, int strong, int weak) {
    if (strong < 0 || strong >= channels.clusters() || weak < 0 || weak >= channels.clusters())
        throw std::out_of_range("compose_effective_channels: device index out of range");
    const int ris = static_cast<int>(phases.perRis.size());
    if (ris != 0 && ris != channels.risCount())
        throw std::invalid_argument("compose_effective_channels: phase config does not match RIS count");
    cplx assigned{}, others{};
    for (int n = 0; n < ris; ++n) {
        const cplx r = reflected(phases.perRis[n], cascade(channels.weak_to_ris(weak, n), channels.risToBs[n]));
        const bool is_assigned =
            assignment && std::find(assignment->perWeak.at(weak).begin(), assignment->perWeak.at(weak).end(), n) !=
                              assignment->perWeak.at(weak).end();
        (is_assigned ? assigned : others) += r;
    }
    EffectiveChannels e;
    e.strongDirectGain = std::norm(channels.directStrong[strong]);
    e.weakCompositeAll = channels.directWeak[weak] + assigned + others;
    e.weakCompositeAssigned = channels.directWeak[weak] + assigned + others;
    e.assignedReflection = assigned;
    return e;
}

/// dB/dBm conversions used at the configuration boundary.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Relative slack when comparing a SINR against the threshold, so the
/// boundary powers pMin/pMax themselves count as meeting it.
inline constexpr double kThresholdRelativeSlack = 1e-9;

inline bool meets_threshold(double sinr, double thresholdLinear) {
    return sinr >= thresholdLinear * (1.0 - kThresholdRelativeSlack);
}

/// Strong device decoded first, weak device's signal as interference.
inline double sinr_strong(double pS, double pW, const EffectiveChannels& eff, double noisePower) {
    if (pS < 0.0 || pW < 0.0) throw std::invalid_argument("sinr_strong: powers must be >= 0");
    return pS * eff.strongDirectGain / (pW * std::norm(eff.weakCompositeAll) + noisePower);
}

/// Weak device after SIC removes the strong signal.
inline double sinr_weak(double pW, const EffectiveChannels& eff, double noisePower) {
    if (pW < 0.0) throw std::invalid_argument("sinr_weak: power must be >= 0");
    return pW * std::norm(eff.weakCompositeAssigned) / noisePower;
}

struct PowerBounds {
    double pMin = 0.0;
    double pMax = 0.0;
    bool feasible = false;
    bool pMaxFromBudget = false;  // pMax was clamped to the budget rather than the strong SINR
};

/// Interval of weak-device powers meeting both SINR thresholds:
///   pMax = min((pS |h_s|^2 - th sigma^2) / (th |c_all|^2), budget), floored at 0
///   pMin = th sigma^2 / |c_assigned|^2
inline PowerBounds power_bounds(double pS, const EffectiveChannels& eff, double thresholdLinear, double noisePower,
                                double budget) {
    if (!(pS > 0.0) || !(budget > 0.0)) throw std::invalid_argument("power_bounds: pS and budget must be positive");
    PowerBounds pb;
    const double numerator = pS * eff.strongDirectGain - thresholdLinear * noisePower;
    const double all2 = std::norm(eff.weakCompositeAll);
    double sinr_cap;
    if (numerator <= 0.0)
        sinr_cap = 0.0;
    else if (all2 == 0.0)
        sinr_cap = std::numeric_limits<double>::infinity();
    else
        sinr_cap = numerator / (thresholdLinear * all2);
    pb.pMaxFromBudget = sinr_cap > budget;
    pb.pMax = std::min(sinr_cap, budget);

    const double asg2 = std::norm(eff.weakCompositeAssigned);
    pb.pMin = asg2 > 0.0 ? thresholdLinear * noisePower / asg2 : std::numeric_limits<double>::infinity();
    pb.feasible = pb.pMin <= pb.pMax;
    return pb;
}

struct PairOutcome {
    bool strongSuccess = false;
    bool weakSuccess = false;
    double chosenWeakPower = 0.0;
    double strongSinr = 0.0;
    double weakSinr = 0.0;
};

/// Transmission outcome of a pair with the strong device at full power.
/// Feasible pairs transmit the weak device at pMin. Otherwise the weak power
/// is picked from {0, min(pMin, budget)}: most successes first, then strong
/// success, then the lower power.
inline PairOutcome evaluate_pair(double pS, const EffectiveChannels& eff, const PowerBounds& bounds,
                                 double thresholdLinear, double noisePower, double budget) {
    auto outcome_at = [&](double pW) {
        PairOutcome o;
        o.chosenWeakPower = pW;
        o.strongSinr = sinr_strong(pS, pW, eff, noisePower);
        o.weakSinr = sinr_weak(pW, eff, noisePower);
        o.strongSuccess = meets_threshold(o.strongSinr, thresholdLinear);
        o.weakSuccess = meets_threshold(o.weakSinr, thresholdLinear);
        return o;
    };
    if (bounds.feasible) return outcome_at(bounds.pMin);

    const PairOutcome silent = outcome_at(0.0);
    const PairOutcome active = outcome_at(std::min(bounds.pMin, budget));
    auto score = [](const PairOutcome& o) { return int(o.strongSuccess) + int(o.weakSuccess); };
    if (score(active) > score(silent)) return active;
    if (score(active) < score(silent)) return silent;
    if (active.strongSuccess != silent.strongSuccess) return active.strongSuccess ? active : silent;
    return silent.chosenWeakPower <= active.chosenWeakPower ? silent : active;
}

}  // namespace risaoi
