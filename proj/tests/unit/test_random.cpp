#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dape/random.hpp"

namespace {

using dape::Rng;

TEST(Random, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Random, Mt19937ReferenceValue) {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
  Rng rng(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Random, UniformRangeAndMean) {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(Random, NormalMoments) {
  Rng rng(2);
  double s = 0.0, s2 = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.03);
}

TEST(Random, UniformIndexCoversRange) {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[rng.uniform_index(7)];
  for (int h : hits) EXPECT_GT(h, 850);
}

TEST(Random, StateRoundTrip) {
  Rng a(9);
  a.normal();  // leaves a spare normal cached
  a.next_u64();
  Rng b;
  b.set_state(a.state());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.normal(), b.normal());
}

TEST(Random, DeriveSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 50; ++i) {
    seen.insert(dape::derive_seed(1, "shuffle", i));
    seen.insert(dape::derive_seed(1, "pairs", i));
    seen.insert(dape::derive_seed(2, "shuffle", i));
  }
  EXPECT_EQ(seen.size(), 150u);
  EXPECT_EQ(dape::derive_seed(7, "x", 3), dape::derive_seed(7, "x", 3));
}

TEST(Random, SampleWithoutReplacementIsDistinct) {
  Rng rng(4);
  auto s = dape::sample_without_replacement(20, 8, rng);
  ASSERT_EQ(s.size(), 8u);
  std::sort(s.begin(), s.end());
  EXPECT_EQ(std::unique(s.begin(), s.end()), s.end());
  EXPECT_LT(s.back(), 20u);
}

TEST(Random, ShuffleIsPermutation) {
  Rng rng(5);
  std::vector<int> v(30);
  for (int i = 0; i < 30; ++i) v[static_cast<std::size_t>(i)] = i;
  rng.shuffle(v);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 30; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

}  // namespace
