#pragma once

#include <cstdint>

namespace cibound {

/// splitmix64 mixing step; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed for substream `index` of a master seed. Substreams
/// reproduce identically whatever order they are consumed in.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master;
    (void)splitmix64(s);
    s ^= 0xd1b54a32d192ed03ULL * (index + 1);
    return splitmix64(s);
}

/// Map a 64-bit word to (0,1]; never returns 0, so log() stays finite.
inline double to_unit_double(std::uint64_t word) {
    return static_cast<double>((word >> 11) + 1) * 0x1.0p-53;
}

}  // namespace cibound
