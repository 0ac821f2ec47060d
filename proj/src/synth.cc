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

#include <cmath>
#include <cstdio>

#include "scoreaudit/decomp.h"
#include "scoreaudit/error.h"
#include "scoreaudit/rng.h"

namespace scoreaudit {
namespace {

// Stream domains so latent and noise draws never share a key.
constexpr std::uint64_t kLatentDomain = 0x4C4154454E54ULL;
constexpr std::uint64_t kNoiseDomain = 0x4E4F495345ULL;

std::vector<int> GroupOf(const SynthConfig& config) {
  std::vector<int> out;
  for (std::size_t g = 0; g < config.groups.size(); ++g) {
    out.insert(out.end(), config.groups[g].count, static_cast<int>(g));
  }
  return out;
}

}  // namespace

void ValidateConfig(const SynthConfig& config) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidConfig, what);
  };
  std::int64_t total = 0;
  for (const GroupSpec& g : config.groups) {
    if (g.count < 0) fail("group size must be non-negative");
    if (g.gender.empty() || g.race.empty()) fail("group labels must be non-empty");
    total += g.count;
  }
  for (std::size_t a = 0; a < config.groups.size(); ++a) {
    for (std::size_t b = a + 1; b < config.groups.size(); ++b) {
      if (config.groups[a].gender == config.groups[b].gender &&
          config.groups[a].race == config.groups[b].race) {
        fail("duplicate group " + GroupLabel(config.groups[a].gender, config.groups[a].race));
      }
    }
  }
  if (total < 2) fail("need at least two subjects");
  if (total > 99999) fail("at most 99999 subjects");
  if (config.images_per_subject < 1) fail("images_per_subject must be >= 1");
  if (config.latent_dim < 1) fail("latent_dim must be >= 1");
  for (double v : {config.base, config.mated_offset, config.demographic_affinity,
                   config.identity_scale, config.noise_sd}) {
    if (!std::isfinite(v)) fail("parameters must be finite");
  }
  if (!(config.mated_offset > 0.0)) fail("mated_offset must be > 0");
  if (config.demographic_affinity < 0.0) fail("demographic_affinity must be >= 0");
  if (config.identity_scale < 0.0) fail("identity_scale must be >= 0");
  if (config.noise_sd < 0.0) fail("noise_sd must be >= 0");
}

SubjectTable SynthSubjects(const SynthConfig& config) {
  ValidateConfig(config);
  SubjectTable table;
  int next = 1;
  for (const GroupSpec& g : config.groups) {
    for (int k = 0; k < g.count; ++k) {
      char id[16];
      std::snprintf(id, sizeof(id), "S%04d", next++);
      table.Add(id, g.gender, g.race);
    }
  }
  return table;
}

Eigen::MatrixXd LatentIdentities(const SynthConfig& config) {
  ValidateConfig(config);
  const std::vector<int> group = GroupOf(config);
  const auto n = static_cast<Eigen::Index>(group.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.latent_dim));
  Eigen::MatrixXd u(n, config.latent_dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    CounterRng rng(StreamKey({config.rng_seed, kLatentDomain,
                              static_cast<std::uint64_t>(i)}));
    for (int k = 0; k < config.latent_dim; ++k) u(i, k) = rng.NextNormal() * scale;
  }
  return u;
}

ScoreMatrix ExpectedMatrix(const SynthConfig& config) {
  ValidateConfig(config);
  const std::vector<int> group = GroupOf(config);
  const Eigen::MatrixXd u = LatentIdentities(config);
  const auto n = static_cast<Eigen::Index>(group.size());
  const Eigen::MatrixXd gram = u * u.transpose();

  ScoreMatrix m;
  const SubjectTable table = SynthSubjects(config);
  for (const Subject& s : table.entries()) m.subjects.push_back(s.id);
  m.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double v = config.base + config.identity_scale * gram(i, j);
      if (i == j) v += config.mated_offset;
      if (group[i] == group[j]) v += config.demographic_affinity;
      m.values(i, j) = v;
      m.values(j, i) = v;
    }
  }
  m.counts = CountMatrix::Constant(n, n, config.images_per_subject);
  return m;
}

SynthData Generate(const SynthConfig& config, std::string algorithm_tag) {
  SynthData data{ScoreSet(std::move(algorithm_tag)), SynthSubjects(config)};
  const ScoreMatrix expected = ExpectedMatrix(config);
  const auto n = static_cast<std::uint32_t>(data.subjects.size());
  const int p = config.images_per_subject;

  for (std::uint32_t i = 0; i < n; ++i) data.scores.Intern(data.subjects[i].id);
  data.scores.Reserve(static_cast<std::size_t>(n) * (n + 1) / 2 * p);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i; j < n; ++j) {
      CounterRng rng(StreamKey({config.rng_seed, kNoiseDomain, i, j}));
      const double mean = expected.values(i, j);
      for (int r = 0; r < p; ++r) {
        const double score = mean + config.noise_sd * rng.NextNormal();
        if (r % 2 == 0) {
          data.scores.Add(i, j, score);
        } else {
          data.scores.Add(j, i, score);
        }
      }
    }
  }
  return data;
}

OracleResult Oracle(const SynthConfig& config, const ClusterOptions& options) {
  OracleResult result;
  result.expected_matrix = ExpectedMatrix(config);
  const SubjectTable subjects = SynthSubjects(config);
  const Decomposition d = PcaDecompose(result.expected_matrix);
  result.clustering = SignificantComponents(d, subjects, options);
  result.oracle_c_tot = result.clustering.c_tot;
  result.oracle_significant_pcs = SignificantPcs(result.clustering);
  return result;
}

}  // namespace scoreaudit
