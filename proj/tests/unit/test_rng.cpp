#include <gtest/gtest.h>

#include "brolin/rng.hpp"
#include "test_support.hpp"

namespace brolin {
namespace {

TEST(Philox, KnownAnswerVectors) {
  for (const auto& kat : test::oracles()["rng"]["philox_kat"]) {
    std::array<std::uint32_t, 4> ctr;
    std::array<std::uint32_t, 2> key;
    for (int i = 0; i < 4; ++i) ctr[i] = kat["ctr"][i].get<std::uint32_t>();
    for (int i = 0; i < 2; ++i) key[i] = kat["key"][i].get<std::uint32_t>();
    const auto out = philox4x32_10(ctr, key);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(out[i], kat["out"][i].get<std::uint32_t>());
  }
}

TEST(RngStream, GoldenVectors) {
  auto s0 = rng_stream(42, 0);
  auto s1 = rng_stream(42, 1);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(s0.uniform(), test::oracles()["rng"]["stream_42_0_first3"][i].get<double>());
    EXPECT_EQ(s1.uniform(), test::oracles()["rng"]["stream_42_1_first3"][i].get<double>());
  }
}

TEST(RngStream, StreamsDifferAndRepeat) {
  auto a = rng_stream(42, 0), b = rng_stream(42, 1), c = rng_stream(42, 0);
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a(), y = b(), z = c();
    same += (x == y);
    EXPECT_EQ(x, z);
  }
  EXPECT_EQ(same, 0);
}

TEST(RngStream, UniformMomentsAndRange) {
  auto s = rng_stream(3, 9);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum2 += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 3e-3);
  EXPECT_NEAR(sum2 / n, 1.0 / 3.0, 3e-3);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 30000; ++i) ++counts[s.below(3)];
  for (int k : counts) EXPECT_NEAR(k, 10000, 400);
}

}  // namespace
}  // namespace brolin
