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

// Independent reference computations for tests. Nothing here calls into the
// library's numerical code.

#ifndef SCOREAUDIT_TESTS_SUPPORT_ORACLES_H_
#define SCOREAUDIT_TESTS_SUPPORT_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace scoreaudit::testing {

// One-way ANOVA by definition, in long double: 1 - within SS / total SS,
// 0 when the total SS is 0.
inline double BruteForceClusteringIndex(const std::vector<double>& x,
                                        const std::vector<int>& groups) {
  std::map<int, std::vector<long double>> members;
  long double grand = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    members[groups[i]].push_back(x[i]);
    grand += x[i];
  }
  grand /= static_cast<long double>(x.size());
  long double total = 0, within = 0;
  for (const auto& [g, values] : members) {
    long double mean = 0;
    for (long double v : values) mean += v;
    mean /= static_cast<long double>(values.size());
    for (long double v : values) within += (v - mean) * (v - mean);
  }
  for (double v : x) total += (v - grand) * (v - grand);
  if (total == 0) return 0.0;
  return static_cast<double>(1 - within / total);
}

// Sort, then take the smallest rank n with 100 n >= 99 len.
inline double NaivePercentile99(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto len = static_cast<std::int64_t>(values.size());
  std::int64_t n = 1;
  while (100 * n < 99 * len) ++n;
  return values[n - 1];
}

// Tries every observed value as a threshold.
inline double CountingFmrThreshold(const std::vector<double>& scores, double target) {
  double best = INFINITY;
  for (double t : scores) {
    std::int64_t above = 0;
    for (double s : scores) above += s >= t ? 1 : 0;
    if (static_cast<double>(above) / static_cast<double>(scores.size()) <= target) {
      best = std::min(best, t);
    }
  }
  return best;
}

// Two-sided Mann-Whitney U test, normal approximation with tie and
// continuity corrections. Returns the p-value.
inline double MannWhitneyP(const std::vector<double>& a, const std::vector<double>& b) {
  struct Item {
    double v;
    int side;
  };
  std::vector<Item> all;
  for (double v : a) all.push_back({v, 0});
  for (double v : b) all.push_back({v, 1});
  std::sort(all.begin(), all.end(), [](const Item& x, const Item& y) { return x.v < y.v; });
  const double n = static_cast<double>(all.size());
  double rank_sum_a = 0, tie_term = 0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    double avg = 0.5 * static_cast<double>(i + 1 + j);
    double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].side == 0) rank_sum_a += avg;
    }
    i = j;
  }
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  const double u = rank_sum_a - n1 * (n1 + 1) / 2;
  const double mean = n1 * n2 / 2;
  const double var = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1)));
  if (var <= 0) return 1.0;
  double z = (std::abs(u - mean) - 0.5) / std::sqrt(var);
  z = std::max(z, 0.0);
  return std::erfc(z / std::sqrt(2.0));
}

// Between-group share of the column-centered matrix's total sum of squares,
// computed directly from group means per column. Equals the variance-
// weighted clustering index summed over any orthonormal basis of PCs.
inline double ProjectionCTot(const Eigen::MatrixXd& m, const std::vector<int>& groups) {
  const Eigen::Index n = m.rows();
  std::map<int, std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < n; ++i) members[groups[i]].push_back(i);
  long double between = 0, total = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    long double mean = 0;
    for (Eigen::Index i = 0; i < n; ++i) mean += m(i, j);
    mean /= n;
    for (Eigen::Index i = 0; i < n; ++i) total += (m(i, j) - mean) * (m(i, j) - mean);
    for (const auto& [g, rows] : members) {
      long double gm = 0;
      for (Eigen::Index i : rows) gm += m(i, j);
      gm /= static_cast<long double>(rows.size());
      between += static_cast<long double>(rows.size()) * (gm - mean) * (gm - mean);
    }
  }
  if (total == 0) return 0.0;
  return static_cast<double>(between / total);
}

inline Eigen::MatrixXd RandomSymmetric(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      m(i, j) = m(j, i) = normal(rng);
    }
  }
  return m;
}

}  // namespace scoreaudit::testing

#endif  // SCOREAUDIT_TESTS_SUPPORT_ORACLES_H_
