#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. SC 2011).
//
// Every (seed, stream) pair addresses an independent sequence of uniforms;
// draw i of a stream is a pure function of (seed, stream, i). Simulation
// code derives one stream per (context, stratum, sample index), which makes
// results independent of thread scheduling and worker count.

#include <array>
#include <cstdint>

namespace cldp {

namespace detail {

inline constexpr uint32_t kPhiloxW32A = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW32B = 0xBB67AE85u;
inline constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;

inline void philox_round(std::array<uint32_t, 4>& c, const std::array<uint32_t, 2>& k) {
    const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * c[0];
    const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * c[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline std::array<uint32_t, 4> philox10(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
        philox_round(ctr, key);
        key[0] += kPhiloxW32A;
        key[1] += kPhiloxW32B;
    }
    return ctr;
}

}  // namespace detail

// Stream id layout: high byte = context tag, then 24 bits of stratum,
// low 32 bits of the sample index. Collision-free for the scales used here.
enum class StreamContext : uint8_t {
    Plain = 0,
    Stratified = 1,
    SimplexOracle = 2,
    Uncensored = 3,
    Aux = 4,
};

inline uint64_t stream_id(StreamContext ctx, uint32_t stratum, uint64_t sample_index) {
    return (static_cast<uint64_t>(ctx) << 56) | (static_cast<uint64_t>(stratum & 0xFFFFFFu) << 32) |
           (sample_index & 0xFFFFFFFFu);
}

class RngStream {
  public:
    RngStream(uint64_t seed, uint64_t stream) noexcept
        : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
          stream_lo_(static_cast<uint32_t>(stream)),
          stream_hi_(static_cast<uint32_t>(stream >> 32)) {}

    RngStream(uint64_t seed, StreamContext ctx, uint32_t stratum, uint64_t sample_index) noexcept
        : RngStream(seed, stream_id(ctx, stratum, sample_index)) {}

    // One 64-bit block (two per Philox invocation).
    uint64_t next_u64() {
        if (word_ == 2) {
            const std::array<uint32_t, 4> out = detail::philox10(
                {static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32), stream_lo_, stream_hi_}, key_);
            buf_[0] = (static_cast<uint64_t>(out[1]) << 32) | out[0];
            buf_[1] = (static_cast<uint64_t>(out[3]) << 32) | out[2];
            ++block_;
            word_ = 0;
        }
        return buf_[word_++];
    }

    // Uniform on the open interval (0,1); never returns an endpoint.
    double next_u01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

  private:
    std::array<uint32_t, 2> key_;
    uint32_t stream_lo_, stream_hi_;
    uint64_t block_ = 0;
    std::array<uint64_t, 2> buf_{};
    int word_ = 2;
};

}  // namespace cldp
