#pragma once

#include <cstdint>
#include <random>

namespace sarcv {

/// Engine used for every simulation stream.
using Rng = std::mt19937_64;

inline constexpr const char* kGeneratorName = "mt19937_64";
inline constexpr const char* kSeedDerivation = "splitmix64(master_seed ^ splitmix64(run_index + 1))";

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent per-run seed derived from the scenario's master seed.
inline constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t run_index) noexcept
{
    return splitmix64(master_seed ^ splitmix64(run_index + 1));
}

} // namespace sarcv
