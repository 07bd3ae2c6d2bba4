#pragma once

#include <cstdint>
#include <random>

namespace fepi {

/// Engine used everywhere; seedable, 64-bit, named so callers do not spell
/// out the std type.
using Rng = std::mt19937_64;

/// splitmix64 step, used to decorrelate derived seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream seed for (master seed, stream index). Replications,
/// folds etc. each get their own stream so results do not depend on
/// scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index + 1));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t index) {
    return Rng(derive_seed(master, index));
}

}  // namespace fepi
