#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "levysde/random.hpp"

using levysde::RandomStream;
using levysde::make_stream_id;

// Published Philox4x32-10 known-answer vectors (Random123 kat_vectors):
// counter words x0..x3, key words k0 k1 -> output y0..y3.
TEST(Philox, KnownAnswerVectors) {
    using levysde::detail::philox4x32_10;
    {
        auto out = philox4x32_10({0u, 0u, 0u, 0u}, {0u, 0u});
        EXPECT_EQ(out.v[0], 0x6627e8d5u);
        EXPECT_EQ(out.v[1], 0xe169c58du);
        EXPECT_EQ(out.v[2], 0xbc57ac4cu);
        EXPECT_EQ(out.v[3], 0x9b00dbd8u);
    }
    {
        auto out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu,
                                  0xffffffffu},
                                 {0xffffffffu, 0xffffffffu});
        EXPECT_EQ(out.v[0], 0x408f276du);
        EXPECT_EQ(out.v[1], 0x41c83b0eu);
        EXPECT_EQ(out.v[2], 0xa20bc7c6u);
        EXPECT_EQ(out.v[3], 0x6d5451fdu);
    }
    {
        auto out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                                  0x03707344u},
                                 {0xa4093822u, 0x299f31d0u});
        EXPECT_EQ(out.v[0], 0xd16cfe09u);
        EXPECT_EQ(out.v[1], 0x94fdccebu);
        EXPECT_EQ(out.v[2], 0x5001e420u);
        EXPECT_EQ(out.v[3], 0x24126ea1u);
    }
}

TEST(RandomStream, DeterministicGivenState) {
    RandomStream a{42, 7, 0};
    RandomStream b{42, 7, 0};
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());

    // Restarting from a saved counter resumes the same sequence.
    RandomStream c{42, 7, 0};
    for (int i = 0; i < 500; ++i) c.next_u64();
    RandomStream d{42, 7, 500};
    for (int i = 0; i < 100; ++i) EXPECT_EQ(c.next_u64(), d.next_u64());
}

TEST(RandomStream, DistinctStreamsDiffer) {
    RandomStream a{42, 1, 0};
    RandomStream b{42, 2, 0};
    RandomStream c{43, 1, 0};
    int equal_ab = 0, equal_ac = 0;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        if (va == b.next_u64()) ++equal_ab;
        if (va == c.next_u64()) ++equal_ac;
    }
    EXPECT_EQ(equal_ab, 0);
    EXPECT_EQ(equal_ac, 0);
}

TEST(RandomStream, UniformOpenInterval) {
    RandomStream s{1234, 0, 0};
    double mn = 1.0, mx = 0.0, sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double u = s.next_uniform();
        mn = std::min(mn, u);
        mx = std::max(mx, u);
        sum += u;
    }
    EXPECT_GT(mn, 0.0);
    EXPECT_LT(mx, 1.0);
    // Mean of Uniform(0,1): sd of the sample mean is 1/sqrt(12 n).
    EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

TEST(RandomStream, StreamIdPackingIsInjective) {
    EXPECT_NE(make_stream_id(0, 0, 1), make_stream_id(0, 1, 0));
    EXPECT_NE(make_stream_id(1, 0, 0), make_stream_id(0, 1, 0));
    EXPECT_EQ(make_stream_id(2, 3, 4),
              (std::uint64_t{2} << 48) | (std::uint64_t{3} << 16) | 4u);
}
