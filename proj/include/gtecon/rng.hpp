#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gtecon::rng {

// splitmix64 finalizer; used to derive independent sub-seeds so that
// replication r of scenario (location, date, k) gets the same stream
// regardless of execution order or thread count.
inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
    return mix(a ^ mix(b));
}

// FNV-1a, for hashing location/date strings into the seed chain.
inline std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) {
    return Engine(mix(seed));
}

}  // namespace gtecon::rng
