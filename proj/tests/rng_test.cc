// Copyright 2026 The scoreaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scoreaudit/rng.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

namespace scoreaudit {
namespace {

TEST(StreamKeyTest, DistinguishesParts) {
  EXPECT_EQ(StreamKey({1, 2, 3}), StreamKey({1, 2, 3}));
  EXPECT_NE(StreamKey({1, 2, 3}), StreamKey({1, 3, 2}));
  EXPECT_NE(StreamKey({1, 2}), StreamKey({1, 2, 0}));
}

TEST(CounterRngTest, ReproducibleSequence) {
  CounterRng a(StreamKey({9})), b(StreamKey({9}));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(CounterRngTest, UniformMoments) {
  CounterRng rng(StreamKey({1}));
  const int n = 200000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    double u = rng.NextUniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sum_sq / n - (sum / n) * (sum / n), 1.0 / 12, 2e-3);
}

TEST(CounterRngTest, NormalMoments) {
  CounterRng rng(StreamKey({2}));
  const int n = 200000;
  double sum = 0, sum_sq = 0, sum_4 = 0;
  for (int i = 0; i < n; ++i) {
    double z = rng.NextNormal();
    sum += z;
    sum_sq += z * z;
    sum_4 += z * z * z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(sum_sq / n, 1.0, 4 * std::sqrt(2.0 / n));
  EXPECT_NEAR(sum_4 / n, 3.0, 0.1);
}

TEST(CounterRngTest, NextBelowIsUniform) {
  CounterRng rng(StreamKey({3}));
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.NextBelow(7)];
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);  // 0.999 quantile, 6 degrees of freedom
}

TEST(ShuffleTest, PermutesAndCoversPositions) {
  std::vector<int> first_slot(5, 0);
  for (std::uint64_t r = 0; r < 5000; ++r) {
    std::vector<int> v(5);
    std::iota(v.begin(), v.end(), 0);
    CounterRng rng(StreamKey({4, r}));
    Shuffle(std::span<int>(v), rng);
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    ASSERT_EQ(sorted, (std::vector<int>{0, 1, 2, 3, 4}));
    ++first_slot[v[0]];
  }
  for (int c : first_slot) EXPECT_NEAR(c, 1000, 150);
}

}  // namespace
}  // namespace scoreaudit
