#pragma once

#include <cstdint>
#include <random>

namespace odest {

using RngEngine = std::mt19937_64;

/// splitmix64 mixing step; used to derive independent sub-stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic sub-seed derivation: every parallel unit of work (chain,
/// observation, sweep cell, ...) gets its own stream keyed by up to three
/// indices, so results do not depend on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = mix64(master ^ 0x8f2e5c6a13d7b491ULL);
    s = mix64(s ^ mix64(a));
    s = mix64(s ^ mix64(b + 0x51ed2701ULL));
    s = mix64(s ^ mix64(c + 0xa3f0c921ULL));
    return s;
}

inline RngEngine make_rng(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0,
                          std::uint64_t c = 0) {
    return RngEngine(derive_seed(master, a, b, c));
}

}  // namespace odest
