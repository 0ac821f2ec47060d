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

#include "scoreaudit/synth.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "scoreaudit/cluster.h"
#include "scoreaudit/decomp.h"
#include "scoreaudit/error.h"
#include "scoreaudit/matrix.h"

namespace scoreaudit {
namespace {

using ::scoreaudit::testing::ProjectionCTot;

SynthConfig Small() {
  SynthConfig config;
  config.groups = {{"F", "B", 12}, {"F", "W", 10}, {"M", "B", 9}, {"M", "W", 11}};
  config.images_per_subject = 4;
  return config;
}

double EstimatedCTot(const SynthConfig& config, int shuffles = 20) {
  SynthData data = Generate(config);
  Decomposition d = PcaDecompose(BuildScoreMatrix(data.scores, data.subjects));
  return SignificantComponents(d, data.subjects, {shuffles, 0, 1}).c_tot;
}

TEST(GenerateTest, DeterministicForSeed) {
  SynthData a = Generate(Small());
  SynthData b = Generate(Small());
  ASSERT_EQ(a.scores.size(), b.scores.size());
  for (std::size_t i = 0; i < a.scores.size(); ++i) {
    EXPECT_EQ(a.scores.records()[i].probe, b.scores.records()[i].probe);
    EXPECT_EQ(a.scores.records()[i].gallery, b.scores.records()[i].gallery);
    EXPECT_EQ(a.scores.records()[i].score, b.scores.records()[i].score);
  }
  SynthConfig other = Small();
  other.rng_seed = 2;
  EXPECT_NE(Generate(other).scores.records()[5].score, a.scores.records()[5].score);
}

TEST(GenerateTest, GroupSizesAndRecordCounts) {
  SynthConfig config = Small();
  SynthData data = Generate(config);
  std::map<std::string, int> sizes;
  for (const Subject& s : data.subjects.entries()) ++sizes[s.group];
  EXPECT_EQ(sizes["F×B"], 12);
  EXPECT_EQ(sizes["F×W"], 10);
  EXPECT_EQ(sizes["M×B"], 9);
  EXPECT_EQ(sizes["M×W"], 11);
  EXPECT_EQ(data.subjects[0].id, "S0001");
  EXPECT_EQ(data.scores.size(), 42u * 43 / 2 * 4);
}

TEST(GenerateTest, NoiseFreeNoStructureIsConstantOffDiagonal) {
  SynthConfig config = Small();
  config.demographic_affinity = 0;
  config.identity_scale = 0;
  config.noise_sd = 0;
  SynthData data = Generate(config);
  for (const ScoreRecord& r : data.scores.records()) {
    EXPECT_EQ(r.score, r.mated() ? config.base + config.mated_offset : config.base);
  }
  // Only the mated diagonal varies, and it is isotropic, so the index lands
  // exactly on the random-grouping value.
  const double n = 42, g = 4;
  EXPECT_NEAR(EstimatedCTot(config), (g - 1) / (n - 1), 1e-10);
}

TEST(GenerateTest, TwoBlockEigenstructureOnSixSubjects) {
  SynthConfig config;
  config.groups = {{"F", "B", 3}, {"M", "W", 3}};
  config.images_per_subject = 1;
  config.demographic_affinity = 1.0;
  config.identity_scale = 0.0;
  config.noise_sd = 0.0;
  SynthData data = Generate(config);
  ScoreMatrix m = BuildScoreMatrix(data.scores, data.subjects);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i == j) continue;
      EXPECT_EQ(m.values(i, j), (i < 3) == (j < 3) ? 2.0 : 1.0);
    }
  }
  Decomposition d = PcaDecompose(m);
  // Between-block eigenvalue m + aN/2 = 4, four within-block contrasts with
  // eigenvalue m = 1, and the removed mean direction.
  EXPECT_NEAR(d.variances[0], 16.0 / 5.0, 1e-12);
  for (int k = 1; k < 5; ++k) EXPECT_NEAR(d.variances[k], 1.0 / 5.0, 1e-12);
  EXPECT_EQ(d.variances[5], 0.0);
  ClusteringResult r = SignificantComponents(d, data.subjects, {100, 0, 1});
  EXPECT_NEAR(r.components[0].c_k, 1.0, 1e-12);
  for (int k = 1; k < 6; ++k) EXPECT_NEAR(r.components[k].c_k, 0.0, 1e-12);
  EXPECT_NEAR(r.c_tot, 16.0 / 20.0, 1e-12);
}

TEST(OracleTest, PlantedBlockWithoutIdentityStructure) {
  SynthConfig config;
  config.groups = {{"F", "B", 40}, {"M", "B", 40}};
  config.demographic_affinity = 0.2;
  config.identity_scale = 0.0;
  config.noise_sd = 0.0;
  OracleResult o = Oracle(config, {200, 0, 1});
  const ClusteringResult& r = o.clustering;
  const double lead = 1.0 + 0.2 * 40;
  EXPECT_NEAR(r.components[0].c_k, 1.0, 1e-12);
  EXPECT_TRUE(r.components[0].significant);
  EXPECT_NEAR(r.components[0].variance, lead * lead / 79.0, 1e-12);
  EXPECT_NEAR(o.oracle_c_tot, lead * lead / (lead * lead + 78.0), 1e-10);
  EXPECT_EQ(o.oracle_significant_pcs.front(), 1);
  // Restricted to the planted component, all clustered variance is
  // demographic.
  EXPECT_NEAR(r.c_tot_significant / r.significant_variance_share, 1.0, 0.05);
}

TEST(OracleTest, NoAffinitySitsInRandomGroupingBand) {
  SynthConfig config = Small();
  config.demographic_affinity = 0.0;
  OracleResult o = Oracle(config, {50, 0, 1});
  EXPECT_NEAR(o.oracle_c_tot, ProjectionCTot(o.expected_matrix.values,
                                             SynthSubjects(config).GroupIndices()),
              1e-10);
  // Band from label shuffles of the same matrix.
  std::vector<int> labels = SynthSubjects(config).GroupIndices();
  std::mt19937_64 rng(5);
  std::vector<double> sims;
  for (int r = 0; r < 400; ++r) {
    std::shuffle(labels.begin(), labels.end(), rng);
    sims.push_back(ProjectionCTot(o.expected_matrix.values, labels));
  }
  const double mean = std::accumulate(sims.begin(), sims.end(), 0.0) / sims.size();
  double ss = 0;
  for (double v : sims) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (sims.size() - 1));
  EXPECT_NEAR(mean, 3.0 / 41.0, 3 * sd / std::sqrt(400.0) + 1e-3);
  EXPECT_LT(std::abs(o.oracle_c_tot - mean), 4 * sd);
}

TEST(OracleTest, GeneratedAveragesConvergeAtNoiseRate) {
  SynthConfig config = Small();
  const ScoreMatrix expected = ExpectedMatrix(config);
  double previous = INFINITY;
  for (int p : {4, 16, 64, 256}) {
    config.images_per_subject = p;
    SynthData data = Generate(config);
    ScoreMatrix m = BuildScoreMatrix(data.scores, data.subjects);
    const double err = (m.values - expected.values).cwiseAbs().maxCoeff();
    const double rate = config.noise_sd / std::sqrt(static_cast<double>(p));
    EXPECT_LT(err, 6 * rate) << p;
    EXPECT_GT(err, 1.5 * rate) << p;
    EXPECT_LT(err, previous);
    previous = err;
  }
}

TEST(OracleTest, EstimatedCTotIsMonotoneInAffinity) {
  SynthConfig config = Small();
  double previous = -1;
  for (double a : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8}) {
    config.demographic_affinity = a;
    const double c = EstimatedCTot(config);
    EXPECT_GE(c, previous) << a;
    previous = c;
  }
}

TEST(ValidateConfigTest, RejectsBadConfigs) {
  auto rejects = [](auto mutate) {
    SynthConfig c = Small();
    mutate(c);
    try {
      ValidateConfig(c);
    } catch (const Error& e) {
      return e.code() == ErrorCode::kInvalidConfig;
    }
    return false;
  };
  EXPECT_TRUE(rejects([](SynthConfig& c) { c.mated_offset = 0; }));
  EXPECT_TRUE(rejects([](SynthConfig& c) { c.demographic_affinity = -0.1; }));
  EXPECT_TRUE(rejects([](SynthConfig& c) { c.identity_scale = -1; }));
  EXPECT_TRUE(rejects([](SynthConfig& c) { c.noise_sd = -1; }));
  EXPECT_TRUE(rejects([](SynthConfig& c) { c.latent_dim = 0; }));
  EXPECT_TRUE(rejects([](SynthConfig& c) { c.images_per_subject = 0; }));
  EXPECT_TRUE(rejects([](SynthConfig& c) { c.groups = {{"F", "B", 1}}; }));
  EXPECT_TRUE(rejects([](SynthConfig& c) { c.groups.push_back({"F", "B", 2}); }));
  EXPECT_TRUE(rejects([](SynthConfig& c) { c.base = NAN; }));
  EXPECT_NO_THROW(ValidateConfig(SynthConfig{}));
}

TEST(SynthDefaultsTest, MatchDocumentedValues) {
  SynthConfig c;
  ASSERT_EQ(c.groups.size(), 4u);
  for (const GroupSpec& g : c.groups) EXPECT_EQ(g.count, 80);
  EXPECT_EQ(c.images_per_subject, 32);
  EXPECT_EQ(c.base, 1.0);
  EXPECT_EQ(c.mated_offset, 1.0);
  EXPECT_EQ(c.demographic_affinity, 0.2);
  EXPECT_EQ(c.identity_scale, 1.0);
  EXPECT_EQ(c.latent_dim, 16);
  EXPECT_EQ(c.noise_sd, 0.25);
  EXPECT_EQ(c.rng_seed, 1u);
}

}  // namespace
}  // namespace scoreaudit
