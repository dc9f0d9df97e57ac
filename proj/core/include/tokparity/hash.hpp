#pragma once

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

namespace tokparity {

// FNV-1a. Stable across platforms, used for on-disk cache keys and
// provenance hashes where std::hash would not be reproducible.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xCBF29CE484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << v;
    return os.str();
}

}  // namespace tokparity
