#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace risaoi {

using Engine = std::mt19937_64;

/// What a stream is used for. Streams with different purposes never
/// overlap, so schemes that consume extra randomness (phase draws, random
/// clustering) leave the channel realizations untouched.
enum class StreamPurpose : std::uint64_t {
    Topology = 1,
    DirectStrong,
    DirectWeak,
    WeakToRis,
    RisToBs,
    RandomPhases,
    RandomAssignment,
    RandomClustering,
    GaussianRandomization,
    Stub,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent engine for (seed, purpose, keys...). Identical keys give
/// bit-identical sequences regardless of call order or thread.
inline Engine keyed_engine(std::uint64_t seed, StreamPurpose purpose,
                           std::initializer_list<std::uint64_t> keys = {}) {
    std::uint64_t h = splitmix64(seed ^ 0x5ca1ab1e0ddba11ULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    for (auto k : keys) h = splitmix64(h ^ (k + 0x632be59bd9b4e019ULL));
    return Engine(h);
}

/// Circularly-symmetric complex Gaussian with unit variance, CN(0, 1).
inline std::complex<double> complex_normal(Engine& eng) {
    std::normal_distribution<double> nd(0.0, 0.7071067811865476);
    const double re = nd(eng);
    const double im = nd(eng);
    return {re, im};
}

inline double uniform01(Engine& eng) { return std::uniform_real_distribution<double>(0.0, 1.0)(eng); }

}  // namespace risaoi
