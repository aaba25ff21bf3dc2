#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace crowdstop {

// Version tag recorded next to every experiment result. Bump when the
// generator, the stream-derivation rule, or any sampling helper changes
// observable output.
inline constexpr std::string_view kRngVersion = "philox4x32-10.v1";

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// Counter-based stream: Philox4x32-10 with the standard round constants.
// A stream is identified by (seed, stream id); the 128-bit counter is laid
// out as [block_lo, block_hi, stream_lo, stream_hi], so distinct stream ids
// can never produce overlapping counter values under the same seed.
//
// child(i) derives an independent substream by hashing (stream id, i).
// Substreams make simulation output independent of processing order:
// give each sweep point, and each HIT inside it, its own child.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream_id) {}

    std::uint64_t seed() const noexcept {
        return static_cast<std::uint64_t>(key_[0]) |
               (static_cast<std::uint64_t>(key_[1]) << 32);
    }
    std::uint64_t stream_id() const noexcept { return stream_; }

    RngStream child(std::uint64_t index) const noexcept {
        RngStream sub = *this;
        sub.stream_ = detail::splitmix64(stream_ ^ detail::splitmix64(index ^ 0xa5a5a5a5a5a5a5a5ULL));
        sub.block_ = 0;
        sub.pos_ = 4;
        return sub;
    }

    std::uint64_t next_u64() {
        const std::uint32_t lo = next_u32();
        const std::uint32_t hi = next_u32();
        return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_open01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Unbiased integer in [0, n); rejection sampling.
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t residue = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= residue) return r % n;
        }
    }

private:
    std::uint32_t next_u32() {
        if (pos_ >= 4) refill();
        return buf_[pos_++];
    }

    void refill() {
        std::uint32_t c0 = static_cast<std::uint32_t>(block_);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
        std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
        std::uint32_t k0 = key_[0];
        std::uint32_t k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k0 += 0x9E3779B9u;
                k1 += 0xBB67AE85u;
            }
            const std::uint64_t p0 = 0xD2511F53ULL * c0;
            const std::uint64_t p1 = 0xCD9E8D57ULL * c2;
            const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
            const std::uint32_t n1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
            const std::uint32_t n3 = static_cast<std::uint32_t>(p0);
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
        }
        buf_ = {c0, c1, c2, c3};
        ++block_;
        pos_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

}  // namespace crowdstop
