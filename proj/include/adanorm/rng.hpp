#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace adanorm {

// Deterministic stream ids built by chaining a splitmix64-style mix over the
// components (integers and string tags). Two streams with different id
// tuples are statistically independent; the same tuple always yields the
// same draw sequence, regardless of what other streams were consumed.
struct StreamId {
    std::uint64_t v = 0;
};

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline StreamId chain(StreamId id, std::uint64_t x) {
    return {mix64(id.v ^ (x + 0x9e3779b97f4a7c15ULL))};
}

inline StreamId chain(StreamId id, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag bytes
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return chain(id, h);
}

template <typename... Parts>
StreamId derive_stream(std::uint64_t base_seed, Parts... parts) {
    StreamId id{mix64(base_seed)};
    ((id = chain(id, parts)), ...);
    return id;
}

// xoshiro256++ with splitmix64 state expansion. All draws are built from
// explicit integer arithmetic so replay is bit-exact for a fixed platform
// and libm; nothing here touches global or OS entropy.
class RngStream {
  public:
    explicit RngStream(StreamId id) {
        std::uint64_t x = id.v;
        for (auto& word : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0, 1), 53 random bits
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1], safe as a log argument
    double uniform01_open0() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; consumes exactly two uniforms per call
    double normal() {
        const double u1 = uniform01_open0();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    double rademacher() { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

    // uniform on [-a, a]
    double uniform_pm(double a) { return a * (2.0 * uniform01() - 1.0); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

}  // namespace adanorm
