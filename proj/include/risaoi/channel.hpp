#pragma once

#include "risaoi/linalg.hpp"
#include "risaoi/rng.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace risaoi {

struct Point3 {
    double x = 0.0, y = 0.0, z = 0.0;
    friend bool operator==(const Point3&, const Point3&) = default;
};

inline double distance(const Point3& a, const Point3& b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

/// Inputs to topology sampling. Devices are dropped uniformly (by area) in
/// circular sectors of angle `centralAngle` around the BS ground point:
/// strong devices in radius [0, dS], weak devices in [dS, dW], RISs in
/// [dS, dR].
struct TopologyParams {
    int clusters = 10;  // I: strong devices = weak devices = I
    int risCount = 5;   // N
    double dS = 5.0;
    double dW = 145.0;
    double dR = 150.0;
    double centralAngle = std::numbers::pi / 2.0;
    double bsHeight = 10.0;
    double risHeight = 10.0;

    void validate() const {
        if (clusters < 1) throw std::invalid_argument("topology: clusters must be >= 1");
        if (risCount < 0) throw std::invalid_argument("topology: RIS count must be >= 0");
        if (!(dS > 0.0)) throw std::invalid_argument("topology: d_s must be positive");
        if (!(dS < dW)) throw std::invalid_argument("topology: requires d_s < d_w");
        if (!(dW < dR)) throw std::invalid_argument("topology: requires d_w < d_r");
        if (!(centralAngle > 0.0 && centralAngle <= 2.0 * std::numbers::pi))
            throw std::invalid_argument("topology: central angle must lie in (0, 2*pi]");
        if (!(bsHeight > 0.0) || !(risHeight > 0.0))
            throw std::invalid_argument("topology: BS and RIS heights must be positive");
    }
};

struct Topology {
    Point3 bs;
    std::vector<Point3> ris;
    std::vector<Point3> strong;
    std::vector<Point3> weak;
    double dS = 0.0, dW = 0.0, dR = 0.0;
    double centralAngle = 0.0;

    int clusters() const noexcept { return static_cast<int>(strong.size()); }
    int risCount() const noexcept { return static_cast<int>(ris.size()); }
};

namespace detail {
inline Point3 sample_in_sector(Engine& eng, double r_in, double r_out, double angle, double z) {
    // Uniform by area: r^2 uniform on [r_in^2, r_out^2].
    const double u = uniform01(eng);
    const double v = uniform01(eng);
    const double r = std::sqrt(r_in * r_in + u * (r_out * r_out - r_in * r_in));
    const double phi = v * angle;
    return {r * std::cos(phi), r * std::sin(phi), z};
}
}  // namespace detail

inline Topology sample_topology(const TopologyParams& params, std::uint64_t seed) {
    params.validate();
    Engine eng = keyed_engine(seed, StreamPurpose::Topology);
    Topology t;
    t.bs = {0.0, 0.0, params.bsHeight};
    t.dS = params.dS;
    t.dW = params.dW;
    t.dR = params.dR;
    t.centralAngle = params.centralAngle;
    for (int i = 0; i < params.clusters; ++i)
        t.strong.push_back(detail::sample_in_sector(eng, 0.0, params.dS, params.centralAngle, 0.0));
    for (int i = 0; i < params.clusters; ++i)
        t.weak.push_back(detail::sample_in_sector(eng, params.dS, params.dW, params.centralAngle, 0.0));
    for (int n = 0; n < params.risCount; ++n)
        t.ris.push_back(
            detail::sample_in_sector(eng, params.dS, params.dR, params.centralAngle, params.risHeight));
    return t;
}

struct PathLossExponents {
    double risToBs = 2.2;
    double weakToRis = 2.2;
    double strongToBs = 3.5;
    double weakToBs = 3.5;
    friend bool operator==(const PathLossExponents&, const PathLossExponents&) = default;
};

struct FadingParams {
    double ricianK = 2.0;
    PathLossExponents exponents;
    double referencePathLossDb = 0.0;  // dB gain at the 1 m reference distance

    void validate() const {
        if (!(ricianK >= 0.0)) throw std::invalid_argument("fading: Rician K must be >= 0");
        for (double e : {exponents.risToBs, exponents.weakToRis, exponents.strongToBs, exponents.weakToBs})
            if (!(e > 0.0)) throw std::invalid_argument("fading: path-loss exponents must be positive");
    }
};

/// Large-scale power gain 10^(PL0/10) * d^-exponent, distances below the
/// 1 m reference clamped to 1 m.
inline double path_loss_gain(double distanceMeters, double exponent, const FadingParams& params) {
    const double d = std::max(distanceMeters, 1.0);
    return std::pow(10.0, params.referencePathLossDb / 10.0) * std::pow(d, -exponent);
}

/// One slot of channel coefficients. Vectors have one entry per RIS
/// element; weak-to-RIS links are stored row-major by (weak, ris).
struct ChannelSet {
    std::vector<cplx> directStrong;  // h_{s->b}
    std::vector<cplx> directWeak;    // h_{w->b}
    std::vector<CVector> weakToRis;  // h_{w->R_n}
    std::vector<CVector> risToBs;    // h_{R_n->b}
    int slot = 0;
    int elements = 0;  // L

    int clusters() const noexcept { return static_cast<int>(directStrong.size()); }
    int risCount() const noexcept { return static_cast<int>(risToBs.size()); }
    const CVector& weak_to_ris(int w, int n) const { return weakToRis.at(static_cast<std::size_t>(w * risCount() + n)); }
};

/// Uniform linear array response along the x axis, half-wavelength
/// spacing, towards `to` as seen from `from`.
inline CVector ula_response(const Point3& from, const Point3& to, int elements) {
    const double d = distance(from, to);
    const double cos_angle = d > 0.0 ? (to.x - from.x) / d : 1.0;
    CVector a(elements);
    for (int l = 0; l < elements; ++l)
        a(l) = std::polar(1.0, -std::numbers::pi * static_cast<double>(l) * cos_angle);
    return a;
}

namespace detail {
// sqrt(gain) * (sqrt(K/(K+1)) los + sqrt(1/(K+1)) nlos), nlos ~ CN(0, I)
inline CVector rician_vector(Engine& eng, double gain, double k, const CVector& los) {
    const double w_los = std::sqrt(k / (k + 1.0));
    const double w_nlos = std::sqrt(1.0 / (k + 1.0));
    const double amp = std::sqrt(gain);
    CVector h(los.size());
    for (Eigen::Index l = 0; l < los.size(); ++l) h(l) = amp * (w_los * los(l) + w_nlos * complex_normal(eng));
    return h;
}
}  // namespace detail

/// Samples every link for one slot. Each link draws from its own keyed
/// stream (seed, slot, link, endpoints), so realizations are reproducible,
/// independent across slots, shared by every scheme run with the same seed,
/// and nested in L: the first L' elements of an L-element draw equal an
/// L'-element draw.
inline ChannelSet sample_channels(const Topology& topology, const FadingParams& params, int elements,
                                  int slot, std::uint64_t seed) {
    if (elements < 1) throw std::invalid_argument("sample_channels: L must be >= 1");
    params.validate();
    const int clusters = topology.clusters();
    const int ris = topology.risCount();
    const auto uslot = static_cast<std::uint64_t>(slot);
    ChannelSet cs;
    cs.slot = slot;
    cs.elements = elements;
    cs.directStrong.resize(clusters);
    cs.directWeak.resize(clusters);
    for (int i = 0; i < clusters; ++i) {
        Engine es = keyed_engine(seed, StreamPurpose::DirectStrong, {uslot, static_cast<std::uint64_t>(i)});
        cs.directStrong[i] = std::sqrt(path_loss_gain(distance(topology.strong[i], topology.bs),
                                                      params.exponents.strongToBs, params)) *
                             complex_normal(es);
        Engine ew = keyed_engine(seed, StreamPurpose::DirectWeak, {uslot, static_cast<std::uint64_t>(i)});
        cs.directWeak[i] = std::sqrt(path_loss_gain(distance(topology.weak[i], topology.bs),
                                                    params.exponents.weakToBs, params)) *
                           complex_normal(ew);
    }
    cs.risToBs.reserve(ris);
    for (int n = 0; n < ris; ++n) {
        Engine e = keyed_engine(seed, StreamPurpose::RisToBs, {uslot, static_cast<std::uint64_t>(n)});
        const double g = path_loss_gain(distance(topology.ris[n], topology.bs), params.exponents.risToBs, params);
        cs.risToBs.push_back(
            detail::rician_vector(e, g, params.ricianK, ula_response(topology.ris[n], topology.bs, elements)));
    }
    cs.weakToRis.reserve(static_cast<std::size_t>(clusters) * ris);
    for (int w = 0; w < clusters; ++w)
        for (int n = 0; n < ris; ++n) {
            Engine e = keyed_engine(seed, StreamPurpose::WeakToRis,
                                    {uslot, static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(n)});
            const double g =
                path_loss_gain(distance(topology.weak[w], topology.ris[n]), params.exponents.weakToRis, params);
            cs.weakToRis.push_back(detail::rician_vector(e, g, params.ricianK,
                                                         ula_response(topology.ris[n], topology.weak[w], elements)));
        }
    return cs;
}

/// FNV-1a over the raw coefficient bytes; equal hashes across scheme runs
/// certify they consumed identical realizations.
inline std::uint64_t channel_hash(const ChannelSet& cs) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, std::size_t bytes) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < bytes; ++i) {
            h ^= c[i];
            h *= 0x100000001b3ULL;
        }
    };
    mix(&cs.slot, sizeof(cs.slot));
    mix(cs.directStrong.data(), cs.directStrong.size() * sizeof(cplx));
    mix(cs.directWeak.data(), cs.directWeak.size() * sizeof(cplx));
    for (const auto& v : cs.risToBs) mix(v.data(), static_cast<std::size_t>(v.size()) * sizeof(cplx));
    for (const auto& v : cs.weakToRis) mix(v.data(), static_cast<std::size_t>(v.size()) * sizeof(cplx));
    return h;
}

}  // namespace risaoi
