#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace mdag {

// Counter-based deterministic random stream. Outputs are fully specified by
// the 64-bit state update below, so draws are reproducible across platforms
// and independent of the C++ standard library's distribution internals.
//
// A stream is keyed by (seed, label, counter): the label is hashed with
// FNV-1a, mixed into the seed, and successive values are produced by the
// splitmix64 update.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    RandomStream(std::uint64_t seed, const std::string& label, std::uint64_t counter = 0)
        : state_(mix(mix(seed ^ fnv1a(label)) + counter)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform on (0, 1): 53 mantissa bits, never exactly 0 or 1.
    double next_unit() {
        const std::uint64_t bits = next_u64() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    // Uniform draw from {0, ..., n-1}.
    int next_below(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

    bool next_bool(double p) { return next_unit() < p; }

    // Uniform point on the probability simplex via normalized exponentials.
    std::vector<double> next_simplex(std::size_t k) {
        std::vector<double> row(k);
        double total = 0.0;
        for (auto& e : row) {
            e = -std::log(next_unit());
            total += e;
        }
        for (auto& e : row) e /= total;
        return row;
    }

    static std::uint64_t fnv1a(const std::string& s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace mdag
