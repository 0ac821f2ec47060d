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

#ifndef SCOREAUDIT_SYNTH_H_
#define SCOREAUDIT_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scoreaudit/cluster.h"
#include "scoreaudit/ingest.h"
#include "scoreaudit/matrix.h"

namespace scoreaudit {

struct GroupSpec {
  std::string gender;
  std::string race;
  int count = 0;
};

// Score model for subjects i, j:
//   base + mated_offset [i = j] + demographic_affinity [group(i) = group(j)]
//        + identity_scale (u_i . u_j) + noise
// u_i has latent_dim independent N(0, 1 / latent_dim) entries and the noise
// is N(0, noise_sd^2) per comparison.
struct SynthConfig {
  std::vector<GroupSpec> groups = {
      {"F", "B", 80}, {"F", "W", 80}, {"M", "B", 80}, {"M", "W", 80}};
  int images_per_subject = 32;
  double base = 1.0;
  double mated_offset = 1.0;
  double demographic_affinity = 0.2;
  double identity_scale = 1.0;
  int latent_dim = 16;
  double noise_sd = 0.25;
  std::uint64_t rng_seed = 1;
};

// Throws Error(kInvalidConfig).
void ValidateConfig(const SynthConfig& config);

// Subjects S0001.. in group order.
SubjectTable SynthSubjects(const SynthConfig& config);

// N x latent_dim; row i is u_i. Drawn from streams keyed on (seed, i).
Eigen::MatrixXd LatentIdentities(const SynthConfig& config);

struct SynthData {
  ScoreSet scores;
  SubjectTable subjects;
};

// Emits images_per_subject comparisons per unordered pair, diagonal
// included. Comparison r of pair {i, j} reads the r-th noise draw of the
// stream keyed on (seed, i, j); odd r swap probe and gallery.
SynthData Generate(const SynthConfig& config, std::string algorithm_tag = "synth");

// Noise-free expected pair means.
ScoreMatrix ExpectedMatrix(const SynthConfig& config);

struct OracleResult {
  ScoreMatrix expected_matrix;
  double oracle_c_tot = 0.0;
  std::vector<int> oracle_significant_pcs;
  ClusteringResult clustering;
};

// Runs the decomposition and clustering on ExpectedMatrix(config).
OracleResult Oracle(const SynthConfig& config, const ClusterOptions& options = {});

}  // namespace scoreaudit

#endif  // SCOREAUDIT_SYNTH_H_
