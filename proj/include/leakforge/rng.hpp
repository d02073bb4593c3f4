#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "leakforge/hash.hpp"

namespace leakforge {

/// splitmix64 finalizer; fully specified, used only for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive an independent stream seed from a master seed and a label.
/// One recorded master seed replays every stream in an experiment.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
    return mix64(master ^ fnv1a64(label));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index));
}

/// Deterministic random stream. mt19937_64 output is pinned by the standard;
/// bounded draws and shuffles are implemented here (not via std distributions,
/// whose output is implementation-defined) so runs are byte-identical across
/// platforms and standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Unbiased integer in [0, bound) via rejection sampling.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
        std::uint64_t v = eng_();
        while (v >= limit) v = eng_();
        return v % bound;
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = static_cast<std::size_t>(below(i + 1));
            std::swap(v[i], v[j]);
        }
    }

    /// k distinct elements drawn uniformly, in draw order.
    template <class T>
    std::vector<T> sample(const std::vector<T>& v, std::size_t k) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        if (k > idx.size()) k = idx.size();
        // partial Fisher-Yates from the front
        std::vector<T> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(below(idx.size() - i));
            std::swap(idx[i], idx[j]);
            out.push_back(v[idx[i]]);
        }
        return out;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace leakforge
