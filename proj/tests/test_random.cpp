#include "pbl/random.hpp"

#include <gtest/gtest.h>

TEST(Random, SameSeedSameStream) {
    auto a = pbl::make_rng(7, 3);
    auto b = pbl::make_rng(7, 3);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}

TEST(Random, StreamsDiffer) {
    auto a = pbl::make_rng(7, 1);
    auto b = pbl::make_rng(7, 2);
    EXPECT_NE(a(), b());
    EXPECT_NE(pbl::derive_seed(7, 1), pbl::derive_seed(8, 1));
}
