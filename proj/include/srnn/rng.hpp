#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace srnn {

// splitmix64 finalizer; good avalanche, cheap.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Deterministic seed derivation: the same (master, parts...) always maps to
// the same stream seed, independent of execution order.
inline uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> parts) {
    uint64_t h = mix64(master);
    for (uint64_t p : parts) h = mix64(h ^ p);
    return h;
}

inline std::mt19937_64 make_rng(uint64_t master, std::initializer_list<uint64_t> parts) {
    return std::mt19937_64(derive_seed(master, parts));
}

} // namespace srnn
