#pragma once

#include <cstdint>
#include <random>

namespace robustmc {

// Generator used by every sampling routine. Fixed per release and echoed in
// run metadata so outputs can be tied to the stream that produced them.
using Rng = std::mt19937_64;
inline constexpr const char* kRngName = "std::mt19937_64";

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and up to three stream
// tags (replicate index, sample size, purpose tag). Pure mixing, no state.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(base);
    s = splitmix64(s ^ splitmix64(a));
    s = splitmix64(s ^ splitmix64(b));
    s = splitmix64(s ^ splitmix64(c));
    return s;
}

}  // namespace robustmc
