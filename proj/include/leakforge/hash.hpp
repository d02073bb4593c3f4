#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace leakforge {

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

/// 128-bit content digest as 32 hex chars (two independently seeded FNV-1a runs).
/// Used for content-addressed caching and collection fingerprints.
inline std::string digest128(std::string_view data) {
    return to_hex(fnv1a64(data)) + to_hex(fnv1a64(data, 0x84222325cbf29ce4ULL));
}

}  // namespace leakforge
