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

#include "scoreaudit/reduce.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "scoreaudit/cluster.h"
#include "scoreaudit/decomp.h"
#include "scoreaudit/error.h"
#include "scoreaudit/matrix.h"
#include "scoreaudit/synth.h"

namespace scoreaudit {
namespace {

using ::scoreaudit::testing::RandomSymmetric;

ScoreMatrix Wrap(const Eigen::MatrixXd& values) {
  ScoreMatrix m;
  for (Eigen::Index i = 0; i < values.rows(); ++i) m.subjects.push_back("S" + std::to_string(i));
  m.values = values;
  m.counts = CountMatrix::Ones(values.rows(), values.cols());
  return m;
}

std::vector<int> AllPcs(int k) {
  std::vector<int> pcs(k);
  std::iota(pcs.begin(), pcs.end(), 1);
  return pcs;
}

TEST(ReconstructExcludingTest, EmptySetReproducesInput) {
  std::mt19937_64 rng(41);
  for (int n : {2, 5, 30}) {
    Eigen::MatrixXd m = RandomSymmetric(rng, n);
    ScoreMatrix r = ReconstructExcluding(PcaDecompose(Wrap(m)), {});
    EXPECT_LT((r.values - m).norm() / m.norm(), 1e-8);
    EXPECT_EQ(r.values, r.values.transpose());
  }
}

TEST(ReconstructExcludingTest, ExcludingEverythingLeavesMeans) {
  std::mt19937_64 rng(42);
  Eigen::MatrixXd m = RandomSymmetric(rng, 9);
  Decomposition d = PcaDecompose(Wrap(m));
  ScoreMatrix r = ReconstructExcluding(d, AllPcs(9));
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      EXPECT_NEAR(r.values(i, j), 0.5 * (d.column_means(i) + d.column_means(j)), 1e-14);
    }
  }
}

TEST(ReconstructExcludingTest, HandBuiltThreeByThree) {
  Eigen::MatrixXd m(3, 3);
  m << 4, 1, 2, 1, 5, 0, 2, 0, 6;
  // Reference values from an independent full eigendecomposition of the
  // column-centered matrix.
  Eigen::MatrixXd expected(3, 3);
  expected << 3.9326334342216747, 1.4682169405215975, 1.5460189824205428,
      1.4682169405215975, 2.304560536185827, 2.7495170678280267,
      1.5460189824205428, 2.7495170678280267, 3.2353000480521654;
  Decomposition d = PcaDecompose(Wrap(m));
  EXPECT_NEAR(d.variances[0], 15.607176741572902, 1e-12);
  EXPECT_NEAR(d.variances[1], 3.0594899250937635, 1e-12);
  EXPECT_EQ(d.variances[2], 0.0);
  EXPECT_NEAR(d.total_variance, 18.666666666666668, 1e-12);
  const int pc1[] = {1};
  ScoreMatrix r = ReconstructExcluding(d, pc1);
  EXPECT_LT((r.values - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ReconstructExcludingTest, RejectsOutOfRangeIndices) {
  Decomposition d = PcaDecompose(Wrap(Eigen::MatrixXd::Identity(3, 3)));
  for (int bad : {0, 4, -1}) {
    const int pcs[] = {bad};
    EXPECT_THROW(ReconstructExcluding(d, pcs), Error);
  }
}

TEST(ReconstructExcludingTest, DistanceFromMeansShrinksOverNestedSets) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6 + trial;
    Decomposition d = PcaDecompose(Wrap(RandomSymmetric(rng, n)));
    const Eigen::MatrixXd means = ReconstructExcluding(d, AllPcs(n)).values;
    std::vector<int> order = AllPcs(n);
    std::shuffle(order.begin(), order.end(), rng);
    double previous = INFINITY;
    for (int size = 0; size <= n; ++size) {
      std::span<const int> excluded(order.data(), size);
      double max_asymmetry = 0;
      ScoreMatrix r = ReconstructExcluding(d, excluded, &max_asymmetry);
      EXPECT_EQ(r.values, r.values.transpose());
      const double distance = (r.values - means).norm();
      EXPECT_LE(distance, previous + 1e-12) << "trial " << trial << " size " << size;
      previous = distance;
    }
  }
}

TEST(DPrimeTest, Examples) {
  DPrimeResult r = DPrime(std::vector<double>{1, 2, 3}, std::vector<double>{-1, 0, 1});
  EXPECT_EQ(r.mu_m, 2.0);
  EXPECT_EQ(r.mu_nm, 0.0);
  EXPECT_EQ(r.var_m, 1.0);
  EXPECT_EQ(r.var_nm, 1.0);
  EXPECT_EQ(r.d_prime, 2.0);
  std::vector<double> same = {0.3, 1.7, 2.2, -0.4};
  EXPECT_EQ(DPrime(same, same).d_prime, 0.0);
  DPrimeResult negative = DPrime(std::vector<double>{-1, 0, 1}, std::vector<double>{1, 2, 3});
  EXPECT_EQ(negative.d_prime, -2.0);
}

TEST(DPrimeTest, Errors) {
  auto code = [](std::vector<double> a, std::vector<double> b) {
    try {
      DPrime(a, b);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoFailure;
  };
  EXPECT_EQ(code({}, {1, 2}), ErrorCode::kEmptySequence);
  EXPECT_EQ(code({1, 2}, {}), ErrorCode::kEmptySequence);
  EXPECT_EQ(code({1, 1}, {2, 2}), ErrorCode::kDegenerateDistribution);
}

TEST(DPrimeTest, AffineInvariant) {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> m(30), nm(200);
    for (double& v : m) v = 3 + normal(rng);
    for (double& v : nm) v = normal(rng);
    const double alpha = 0.1 + trial, beta = trial - 20.0;
    std::vector<double> m2 = m, nm2 = nm;
    for (double& v : m2) v = alpha * v + beta;
    for (double& v : nm2) v = alpha * v + beta;
    EXPECT_NEAR(DPrime(m2, nm2).d_prime, DPrime(m, nm).d_prime, 1e-12);
  }
}

TEST(SummarizeTest, Examples) {
  SeriesSummary s = Summarize(std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(s.count, 4);
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.sd, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(Summarize(std::vector<double>{7}).sd, 0.0);
}

SynthConfig SmallConfig(double affinity) {
  SynthConfig config;
  config.groups = {{"F", "B", 30}, {"F", "W", 30}, {"M", "B", 30}, {"M", "W", 30}};
  config.images_per_subject = 8;
  config.demographic_affinity = affinity;
  config.rng_seed = 17;
  return config;
}

struct Pipeline {
  Decomposition decomposition;
  ClusteringResult clustering;
  ReductionReport report;
};

Pipeline RunPipeline(const SynthConfig& config) {
  SynthData data = Generate(config);
  Pipeline p;
  p.decomposition = PcaDecompose(BuildScoreMatrix(data.scores, data.subjects));
  p.clustering = SignificantComponents(p.decomposition, data.subjects, {200, 3, 1});
  p.report = BuildReductionReport(p.decomposition, p.clustering, data.subjects);
  return p;
}

TEST(BuildReductionReportTest, PlantedGapShrinks) {
  Pipeline p = RunPipeline(SmallConfig(0.3));
  const ReductionReport& r = p.report;
  ASSERT_GT(r.excluded_pcs.size(), 0u);
  EXPECT_LT(std::abs(r.ss_reduced.mean - r.dd_reduced.mean),
            std::abs(r.ss_original.mean - r.dd_original.mean));
  EXPECT_LT(r.reduced.d_prime, r.original.d_prime);
  EXPECT_GT(r.reduced.d_prime, 0.0);
  EXPECT_EQ(r.excluded_pcs, SignificantPcs(p.clustering));
}

TEST(BuildReductionReportTest, NoExclusionReproducesOriginalExactly) {
  Pipeline p = RunPipeline(SmallConfig(0.3));
  SynthData data = Generate(SmallConfig(0.3));
  ReductionOptions options;
  options.excluded_pcs = std::vector<int>{};
  ReductionReport r = BuildReductionReport(p.decomposition, p.clustering, data.subjects, options);
  EXPECT_TRUE(r.excluded_pcs.empty());
  EXPECT_EQ(r.reduced.d_prime, r.original.d_prime);
  EXPECT_EQ(r.ss_reduced.mean, r.ss_original.mean);
  EXPECT_EQ(r.dd_reduced.mean, r.dd_original.mean);
}

TEST(BuildReductionReportTest, NullDataLeavesDPrimeNearlyUnchanged) {
  Pipeline p = RunPipeline(SmallConfig(0.0));
  const ReductionReport& r = p.report;
  EXPECT_LE(r.excluded_pcs.size(), 10u);
  EXPECT_NEAR(r.reduced.d_prime, r.original.d_prime, 0.05 * r.original.d_prime);
}

TEST(BuildReductionReportTest, OriginalMatchesInputMatrix) {
  SynthData data = Generate(SmallConfig(0.2));
  ScoreMatrix m = BuildScoreMatrix(data.scores, data.subjects);
  Decomposition d = PcaDecompose(m);
  ClusteringResult c = SignificantComponents(d, data.subjects, {50, 3, 1});
  ReductionReport r = BuildReductionReport(d, c, data.subjects);
  EXPECT_NEAR(r.original.d_prime, DPrime(Distributions(m)).d_prime, 1e-9);
}

TEST(WriteDistributionHistogramsTest, CountsEveryValueOnce) {
  Pipeline p = RunPipeline(SmallConfig(0.2));
  std::ostringstream out;
  WriteDistributionHistograms(out, p.report, 60);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "distribution,stage,bin_low,bin_high,count");
  std::map<std::string, std::int64_t> totals;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::string key = line.substr(0, line.find(',', line.find(',') + 1));
    totals[key] += std::stoll(line.substr(line.rfind(',') + 1));
  }
  EXPECT_EQ(rows, 6 * 60);
  EXPECT_EQ(totals["M,original"], 120);
  EXPECT_EQ(totals["SS,original"],
            static_cast<std::int64_t>(p.report.original_series.same.size()));
  EXPECT_EQ(totals["DD,reduced"],
            static_cast<std::int64_t>(p.report.reduced_series.different.size()));
  // Four groups of 30: SS pairs are 4 * C(30, 2), DD pairs 2 * 30 * 30.
  EXPECT_EQ(p.report.original_series.same.size(), 4u * 435);
  EXPECT_EQ(p.report.original_series.different.size(), 2u * 900);
}

}  // namespace
}  // namespace scoreaudit
