#pragma once

// Counter-based RNG (Threefry-2x32, 20 rounds) so every random draw is a pure
// function of (seed, logical stream id, draw index).  Streams keyed by content
// (trial, generation, site) give results that do not depend on thread count or
// iteration order, and reusing the same keys across parameter values yields
// common-random-number coupling.

#include <array>
#include <cstdint>
#include <span>

namespace spreadout {

struct ThreefryBlock {
    std::uint32_t x0, x1;
};

inline ThreefryBlock threefry2x32(std::uint32_t k0, std::uint32_t k1,
                                  std::uint32_t c0, std::uint32_t c1) {
    constexpr std::uint32_t kParity = 0x1BD11BDAu;
    constexpr int rot[8] = {13, 15, 26, 6, 17, 29, 16, 24};
    const std::uint32_t ks[3] = {k0, k1, k0 ^ k1 ^ kParity};
    std::uint32_t x0 = c0 + ks[0];
    std::uint32_t x1 = c1 + ks[1];
    auto rotl = [](std::uint32_t v, int r) {
        return (v << r) | (v >> (32 - r));
    };
    for (int group = 0; group < 5; ++group) {
        const int base = (group % 2) ? 4 : 0;
        for (int i = 0; i < 4; ++i) {
            x0 += x1;
            x1 = rotl(x1, rot[base + i]);
            x1 ^= x0;
        }
        const int s = group + 1;
        x0 += ks[s % 3];
        x1 += ks[(s + 1) % 3] + static_cast<std::uint32_t>(s);
    }
    return {x0, x1};
}

// Buffered stream over the 64-bit counter space of one threefry key.
class RngStream {
  public:
    RngStream(std::uint32_t k0, std::uint32_t k1) : k0_(k0), k1_(k1) {}

    std::uint32_t next_u32() {
        if (have_ == 0) {
            ThreefryBlock b = threefry2x32(k0_, k1_, static_cast<std::uint32_t>(ctr_),
                                           static_cast<std::uint32_t>(ctr_ >> 32));
            ++ctr_;
            buf_[0] = b.x0;
            buf_[1] = b.x1;
            have_ = 2;
        }
        return buf_[--have_];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), unbiased (rejection).
    std::uint32_t next_below(std::uint32_t n) {
        const std::uint32_t lim = UINT32_MAX - UINT32_MAX % n;
        for (;;) {
            std::uint32_t v = next_u32();
            if (v < lim) return v % n;
        }
    }

  private:
    std::uint32_t k0_, k1_;
    std::uint64_t ctr_ = 0;
    std::uint32_t buf_[2] = {0, 0};
    int have_ = 0;
};

// Key derivation by chaining blocks, jax-split style: each qualifier folds the
// previous key over a fresh counter.  Collisions between distinct qualifier
// tuples are birthday-bounded at the 64-bit key level, which is fine for MC.
inline ThreefryBlock derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    ThreefryBlock k{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32)};
    k = threefry2x32(k.x0, k.x1, static_cast<std::uint32_t>(a),
                     static_cast<std::uint32_t>(a >> 32));
    k = threefry2x32(k.x0, k.x1, static_cast<std::uint32_t>(b),
                     static_cast<std::uint32_t>(b >> 32));
    return k;
}

inline RngStream stream_for(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    ThreefryBlock k = derive_key(seed, a, b);
    return RngStream(k.x0, k.x1);
}

inline std::uint64_t site_hash(std::span<const std::int32_t> coords) {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (std::int32_t c : coords) {
        h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)) + 0x9E3779B97F4A7C15ULL +
             (h << 6) + (h >> 2);
        h *= 0xFF51AFD7ED558CCDULL;
        h ^= h >> 33;
    }
    return h;
}

}  // namespace spreadout
