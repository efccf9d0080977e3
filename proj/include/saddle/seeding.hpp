#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace saddle {

// std::mt19937_64 is bit-specified by the standard but the std
// distributions are not, so the variate transforms below are spelled out
// to keep sampled points identical across standard libraries.

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for stream `index` under `master`. A pure function of both, so the
/// order in which streams are consumed cannot change what they produce.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform on the open interval (0, 1), 53 bits.
inline double uniform_open01(Engine& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) { return lo + (hi - lo) * uniform_open01(eng); }

/// Box-Muller, one variate per call.
inline double standard_normal(Engine& eng) {
    const double u1 = uniform_open01(eng);
    const double u2 = uniform_open01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double standard_exponential(Engine& eng) { return -std::log(uniform_open01(eng)); }

}  // namespace saddle
