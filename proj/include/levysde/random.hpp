#pragma once

#include <array>
#include <cstdint>

namespace levysde {

namespace detail {

// Philox4x32-10 block cipher (Salmon et al., Random123). Counter-based:
// every 128-bit counter block maps to 128 output bits under a 64-bit key,
// so draws are a pure function of (key, block) with no sequential state.
struct PhiloxBlock {
    std::array<std::uint32_t, 4> v;
};

inline PhiloxBlock philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                 std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return {ctr};
}

}  // namespace detail

// Splittable counter-based stream. Identical (seed, stream_id, counter)
// always reproduces the same variate; distinct stream_ids give independent
// sequences, so per-trajectory/per-mode streams can be consumed in any
// order (or in parallel) without changing the result.
struct RandomStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t counter = 0;

    std::uint64_t next_u64() {
        const std::uint64_t c = counter++;
        const detail::PhiloxBlock out = detail::philox4x32_10(
            {static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
             static_cast<std::uint32_t>(stream_id),
             static_cast<std::uint32_t>(stream_id >> 32)},
            {static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)});
        return (static_cast<std::uint64_t>(out.v[1]) << 32) | out.v[0];
    }

    // Uniform on the open interval (0,1); never returns an endpoint, so
    // log() of the result is always finite.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }
};

// Packs the identity of an independent sub-stream. Layout gives 16 bits to
// the purpose tag (which experiment phase), 32 to the trajectory, 16 to the
// mode, keeping all (purpose, trajectory, mode) triples disjoint.
inline constexpr std::uint64_t make_stream_id(std::uint32_t purpose,
                                              std::uint64_t trajectory,
                                              std::uint32_t mode) {
    return (static_cast<std::uint64_t>(purpose) << 48) |
           ((trajectory & 0xFFFFFFFFull) << 16) | (mode & 0xFFFFull);
}

inline RandomStream make_stream(std::uint64_t seed, std::uint32_t purpose,
                                std::uint64_t trajectory, std::uint32_t mode) {
    return RandomStream{seed, make_stream_id(purpose, trajectory, mode), 0};
}

}  // namespace levysde
