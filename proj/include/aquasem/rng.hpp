#pragma once

#include <cstdint>
#include <string_view>

namespace aquasem {

// splitmix64 stream. Golden corruption outputs and channel seeds depend on
// this exact recurrence, so the constants are part of the output contract
// and must never change.
class Splitmix64 {
public:
    explicit Splitmix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // Modulo reduction. The tiny bias is accepted so that outputs stay
    // portable across language ports of the same stream.
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t state_;
};

// Single finalizer step of the stream above, usable as a stateless mixer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Order-sensitive byte hash built on mix64.
inline std::uint64_t hash_bytes(std::string_view bytes) {
    std::uint64_t h = 0x243F6A8885A308D3ULL;
    for (unsigned char c : bytes) {
        h = mix64(h ^ c);
    }
    return h;
}

}  // namespace aquasem
