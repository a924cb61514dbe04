#include "adanorm/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace adanorm;

TEST(Rng, SameStreamIdReproducesSequence) {
    const StreamId id = derive_stream(42u, 7u, 3u, std::string_view("drive"));
    RngStream a(id), b(id);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DifferentComponentsGiveDifferentStreams) {
    const StreamId base = derive_stream(42u, 7u, 3u, std::string_view("drive"));
    const StreamId other_seed = derive_stream(43u, 7u, 3u, std::string_view("drive"));
    const StreamId other_tag = derive_stream(42u, 7u, 3u, std::string_view("bias"));
    const StreamId chained = chain(base, 1u);
    EXPECT_NE(RngStream(base).next_u64(), RngStream(other_seed).next_u64());
    EXPECT_NE(RngStream(base).next_u64(), RngStream(other_tag).next_u64());
    EXPECT_NE(RngStream(base).next_u64(), RngStream(chained).next_u64());
}

TEST(Rng, ChainOrderMatters) {
    const StreamId id{1234u};
    EXPECT_NE(chain(chain(id, 1u), 2u).v, chain(chain(id, 2u), 1u).v);
    EXPECT_NE(chain(id, std::string_view("ab")).v, chain(id, std::string_view("ba")).v);
}

TEST(Rng, Uniform01Ranges) {
    RngStream rng(StreamId{99u});
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const double v = rng.uniform01_open0();
        ASSERT_GT(v, 0.0);
        ASSERT_LE(v, 1.0);
    }
}

TEST(Rng, NormalConsumesExactlyTwoUniforms) {
    const StreamId id{512u};
    RngStream a(id), b(id);
    (void)a.normal();
    (void)b.uniform01();
    (void)b.uniform01();
    for (int i = 0; i < 10; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, NormalMomentsMatch) {
    RngStream rng(StreamId{2024u});
    const int n = 1000000;
    long double s = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
        s3 += z * z * z;
        s4 += z * z * z * z;
    }
    EXPECT_NEAR(static_cast<double>(s / n), 0.0, 5e-3);
    EXPECT_NEAR(static_cast<double>(s2 / n), 1.0, 1e-2);
    EXPECT_NEAR(static_cast<double>(s3 / n), 0.0, 3e-2);
    EXPECT_NEAR(static_cast<double>(s4 / n), 3.0, 5e-2);
}

TEST(Rng, RademacherIsBalancedSign) {
    RngStream rng(StreamId{77u});
    const int n = 1000000;
    long double s = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.rademacher();
        ASSERT_TRUE(x == 1.0 || x == -1.0);
        s += x;
    }
    EXPECT_NEAR(static_cast<double>(s / n), 0.0, 5e-3);
}

TEST(Rng, UniformPmMatchesBoundsAndVariance) {
    RngStream rng(StreamId{88u});
    const double a = std::sqrt(3.0);
    const int n = 1000000;
    long double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform_pm(a);
        ASSERT_GE(x, -a);
        ASSERT_LE(x, a);
        s += x;
        s2 += x * x;
    }
    // Var = a^2/3 = 1 for a = sqrt(3).
    EXPECT_NEAR(static_cast<double>(s / n), 0.0, 5e-3);
    EXPECT_NEAR(static_cast<double>(s2 / n), 1.0, 1e-2);
}
