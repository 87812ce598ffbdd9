#pragma once

#include <cstdint>
#include <random>

namespace expcp {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser; a bijection on 64-bit words with good avalanche.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for replication r of a run. Depends only on (master, r), so any
/// assignment of replications to workers yields the same streams.
constexpr std::uint64_t replication_seed(std::uint64_t master, std::uint64_t replication) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(replication + 0x632BE59BD9B4E019ULL));
}

inline Engine replication_engine(std::uint64_t master, std::uint64_t replication) {
    return Engine(replication_seed(master, replication));
}

/// Uniform on the open interval (0, 1): 53 random bits centred in their cell.
inline double uniform_open(Engine& engine) {
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse transform of U ~ Uniform(0,1) to Exp(theta): -ln(U) / theta.
double exponential_from_uniform(double u, double theta);

}  // namespace expcp
