#include <algorithm>
#include <atomic>
#include <numeric>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include <gtest/gtest.h>

#include "jitcluster/parallel.hpp"
#include "jitcluster/random.hpp"

namespace jc = jitcluster;

TEST(DeriveSeed, Stable) {
    EXPECT_EQ(jc::derive_seed(42, "walk", 0), jc::derive_seed(42, "walk", 0));
    EXPECT_NE(jc::derive_seed(42, "walk", 0), jc::derive_seed(42, "walk", 1));
    EXPECT_NE(jc::derive_seed(42, "walk", 0), jc::derive_seed(42, "reservoir", 0));
    EXPECT_NE(jc::derive_seed(42, "walk", 0), jc::derive_seed(43, "walk", 0));
}

TEST(DeriveSeed, PinnedValues) {
    // Frozen so that a change to the mixer shows up as a test failure.
    EXPECT_EQ(jc::splitmix64(0x9e3779b97f4a7c15ULL), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(jc::derive_seed(42, "walk", 0), 0x4a834383eec9e3b3ULL);
    EXPECT_EQ(jc::derive_seed(42, "walk", 1), 0x20d077e042c87e05ULL);
}

TEST(DeriveSeed, InjectiveOnSmallIndices) {
    for (const char* label : {"walk", "reservoir"}) {
        std::unordered_set<std::uint64_t> seen;
        for (std::uint64_t i = 0; i < (1u << 16); ++i) {
            EXPECT_TRUE(seen.insert(jc::derive_seed(7, label, i)).second) << label << " " << i;
        }
    }
}

TEST(Rng, Uniform01Range) {
    jc::Rng rng(1);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Rng, BernoulliEdges) {
    jc::Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_TRUE(rng.bernoulli(1.0));
        EXPECT_FALSE(rng.bernoulli(0.0));
    }
}

TEST(Rng, BelowIsUniform) {
    jc::Rng rng(3);
    std::vector<int> counts(6, 0);
    for (int i = 0; i < 60000; ++i) {
        const auto k = rng.below(6);
        ASSERT_LT(k, 6u);
        ++counts[k];
    }
    for (const int c : counts) {
        EXPECT_NEAR(c, 10000, 500);
    }
}

TEST(Rng, ShuffleIsPermutation) {
    jc::Rng rng(4);
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    rng.shuffle(std::span<int>(v));
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) {
        EXPECT_EQ(sorted[i], i);
    }
}

TEST(Rng, SameSeedSameStream) {
    jc::Rng a(99);
    jc::Rng b(99);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(a.next_u64(), b.next_u64());
    }
}

TEST(Parallel, FillsEverySlot) {
    for (const unsigned workers : {1u, 2u, 8u, 64u}) {
        std::vector<int> slots(1000, 0);
        jc::parallel_for(slots.size(), workers, [&](std::size_t i) { slots[i] = static_cast<int>(i) * 2; });
        for (std::size_t i = 0; i < slots.size(); ++i) {
            EXPECT_EQ(slots[i], static_cast<int>(i) * 2);
        }
    }
}

TEST(Parallel, PropagatesExceptions) {
    EXPECT_THROW(jc::parallel_for(100, 4,
                                  [](std::size_t i) {
                                      if (i == 57) {
                                          throw std::runtime_error("boom");
                                      }
                                  }),
                 std::runtime_error);
}
