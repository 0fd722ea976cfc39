#pragma once

#include <cstdint>
#include <random>

namespace simleo {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for (master, stream, index): each argument passes through its own mix
// round so that neighbouring indices and streams do not collide.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index = 0) noexcept
{
    return mix_seed(mix_seed(mix_seed(master) ^ stream) ^ index);
}

// Named streams for derive_seed. Values are part of the reproducibility
// contract; do not renumber.
enum class SeedStream : std::uint64_t {
    scenario = 1,
    ao_init = 2,
    antenna_draws = 3,
    monte_carlo = 4,
    random_controls = 5,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                                    std::uint64_t index = 0) noexcept
{
    return derive_seed(master, static_cast<std::uint64_t>(stream), index);
}

} // namespace simleo
