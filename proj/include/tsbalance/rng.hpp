#ifndef TSBALANCE_RNG_HPP
#define TSBALANCE_RNG_HPP

#include <cstdint>
#include <string_view>

namespace tsbal::rng {

// SplitMix64 mixing step. Used as a stateless per-index generator so that
// sampling keys depend only on (seed, index), never on draw order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over bytes; stable across platforms, used to fold labels into seeds.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Uniform double in (0, 1], a pure function of (seed, index).
// Never returns 0 so log(u) is finite.
inline double uniform01(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t x =
        splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

// Independent stream seed from a master seed, a label and a replicate id.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t replicate, std::string_view purpose) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ fnv1a64(label));
    h = splitmix64(h ^ replicate);
    h = splitmix64(h ^ fnv1a64(purpose));
    return h;
}

}  // namespace tsbal::rng

#endif  // TSBALANCE_RNG_HPP
