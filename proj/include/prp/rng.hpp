#pragma once

#include <cstdint>
#include <string_view>

namespace prp {

// Deterministic, implementation-independent RNG plumbing. The standard
// distributions are unspecified across library implementations, so every
// draw that must reproduce byte-identically goes through these.

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based splitmix64 stream.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64_next(state_); }

    /// Draw in [0, n). Modulo reduction; bias is irrelevant for the tiny
    /// n used here and the result is identical everywhere.
    std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Stream for one question, independent of solve scheduling.
inline RngStream question_stream(std::uint64_t global_seed, std::string_view question_id) {
    return RngStream(global_seed ^ fnv1a64(question_id));
}

/// Seed for the k-th backend sample of a question (self-consistency, simulator).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t s = base ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64_next(s);
}

}  // namespace prp
