#pragma once

#include <cstdint>

// Counter-based random number generation (Philox4x32-10, Salmon et al. 2011).
//
// Every random quantity in this library is a pure function of
// (seed, cell, channel, index):
//   seed    - the 64-bit experiment seed (the Philox key)
//   cell    - a 64-bit spatial/stream identifier (lattice site, edge, or stream id)
//   channel - which random quantity attached to the cell (copy index, Bernoulli
//             marker, ...), tagged with a domain in the high byte so unrelated
//             uses of the same cell id never collide
//   index   - draw counter within (cell, channel)
//
// Weight fields are therefore replayable without storage: the same (seed, edge)
// always yields the same weight, from any thread, in any order.

namespace growthlab {

struct PhiloxBlock {
    uint32_t x[4];
};

inline PhiloxBlock philox4x32(PhiloxBlock ctr, uint32_t k0, uint32_t k1) {
    constexpr uint32_t M0 = 0xD2511F53u;
    constexpr uint32_t M1 = 0xCD9E8D57u;
    constexpr uint32_t W0 = 0x9E3779B9u;
    constexpr uint32_t W1 = 0xBB67AE85u;
    uint32_t x0 = ctr.x[0], x1 = ctr.x[1], x2 = ctr.x[2], x3 = ctr.x[3];
    for (int round = 0; round < 10; ++round) {
        const uint64_t p0 = uint64_t(M0) * x0;
        const uint64_t p1 = uint64_t(M1) * x2;
        const uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
        const uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
        x0 = hi1 ^ x1 ^ k0;
        x1 = lo1;
        x2 = hi0 ^ x3 ^ k1;
        x3 = lo0;
        k0 += W0;
        k1 += W1;
    }
    return PhiloxBlock{{x0, x1, x2, x3}};
}

// Channel domains. The low 24 bits of a channel are free per domain.
namespace rng_domain {
inline constexpr uint32_t kWeight = 0u << 24;   // lattice weight copies; low bits = copy index, m+1 = Bernoulli marker
inline constexpr uint32_t kStream = 1u << 24;   // sequential sampling streams
inline constexpr uint32_t kDerive = 2u << 24;   // derived seeds (replica farms)
inline constexpr uint32_t kSite = 3u << 24;     // site percolation open/closed
}  // namespace rng_domain

inline uint64_t rng_bits(uint64_t seed, uint64_t cell, uint32_t channel, uint32_t index = 0) {
    const PhiloxBlock ctr{{uint32_t(cell), uint32_t(cell >> 32), channel, index}};
    const PhiloxBlock r = philox4x32(ctr, uint32_t(seed), uint32_t(seed >> 32));
    return (uint64_t(r.x[0]) << 32) | r.x[1];
}

// Uniform double in [0, 1), 53 usable bits.
inline double rng_u01(uint64_t seed, uint64_t cell, uint32_t channel, uint32_t index = 0) {
    return double(rng_bits(seed, cell, channel, index) >> 11) * 0x1.0p-53;
}

// Derive an independent 64-bit seed, e.g. one per replica of an experiment.
inline uint64_t derive_seed(uint64_t seed, uint64_t cell, uint32_t which = 0) {
    return rng_bits(seed, cell, rng_domain::kDerive | (which & 0xFFFFFFu));
}

// A sequential stream handle: draws are indexed by an incrementing counter.
class RngStream {
  public:
    RngStream(uint64_t seed, uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

    double next_u01() { return rng_u01(seed_, stream_id_, rng_domain::kStream, counter_++); }

    uint64_t seed() const { return seed_; }
    uint64_t stream_id() const { return stream_id_; }
    uint32_t counter() const { return counter_; }

  private:
    uint64_t seed_;
    uint64_t stream_id_;
    uint32_t counter_ = 0;
};

}  // namespace growthlab
