#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sbt {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Maps a 128-bit counter under a 64-bit key to 128
/// pseudo-random bits.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

    static constexpr std::uint32_t kMul0 = 0xD2511F53;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
};

/// Sequential view over the Philox counter space of one (seed, replicate,
/// stream) triple. The replicate index and stream key occupy the upper
/// counter words and a block counter the lowest one, so distinct triples
/// never share a block.
class ReplicateStream {
public:
    using result_type = std::uint64_t;

    ReplicateStream(std::uint64_t seed, std::uint64_t replicate, std::uint32_t stream_key = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0, static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32), stream_key} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (used_ == 2) refill();
        const auto lo = buffer_[2 * used_];
        const auto hi = buffer_[2 * used_ + 1];
        ++used_;
        return (std::uint64_t{hi} << 32) | lo;
    }

    /// Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with
    /// rejection of the biased low region.
    std::uint64_t below(std::uint64_t bound) {
        auto m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    void refill() {
        buffer_ = Philox4x32::block(ctr_, key_);
        ++ctr_[0];
        used_ = 0;
    }

    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter buffer_{};
    int used_ = 2;
};

inline ReplicateStream derive_stream(std::uint64_t master_seed, std::uint64_t replicate_index,
                                     std::uint32_t stream_key = 0) {
    return ReplicateStream(master_seed, replicate_index, stream_key);
}

/// Fresh 64-bit seed from std::random_device.
std::uint64_t entropy_seed();

}  // namespace sbt
