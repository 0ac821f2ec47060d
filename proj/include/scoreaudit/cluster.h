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

#ifndef SCOREAUDIT_CLUSTER_H_
#define SCOREAUDIT_CLUSTER_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "scoreaudit/decomp.h"
#include "scoreaudit/ingest.h"

namespace scoreaudit {

struct ClusteringIndexParts {
  double within_ss = 0.0;
  double total_ss = 0.0;
  // within_ss / total_ss; 1 when total_ss is zero.
  double within_ratio = 1.0;
  // 1 - within_ratio clamped to [0, 1]; 0 when total_ss is zero.
  double index = 0.0;
};

// Between-group share of the total sum of squares of `x`. `groups` holds a
// label in [0, G) per element. An index of 1 means no spread inside groups.
ClusteringIndexParts ComputeClusteringIndexParts(std::span<const double> x,
                                                 std::span<const int> groups);
double ClusteringIndex(std::span<const double> x, std::span<const int> groups);

// Clustering indices of `x` under `shuffles` random partitions with the
// given group sizes. Replicate r permutes labels with a stream keyed on
// (rng_seed, r), so the output does not depend on evaluation order.
std::vector<double> NullDistribution(std::span<const double> x,
                                     std::span<const int> group_sizes,
                                     int shuffles, std::uint64_t rng_seed);

struct ComponentClustering {
  int pc_index = 0;  // 1-based
  double variance = 0.0;
  double variance_fraction = 0.0;
  double c_k = 0.0;
  double within_ratio = 1.0;
  double null_q99 = 0.0;
  bool significant = false;
};

struct ClusteringResult {
  std::vector<ComponentClustering> components;
  // Variance-weighted index over every component.
  double c_tot = 0.0;
  // The same sum restricted to significant components.
  double c_tot_significant = 0.0;
  // Share of total variance carried by significant components.
  double significant_variance_share = 0.0;
  int n_significant = 0;
  int shuffles = 0;
  double alpha = 0.01;
  std::uint64_t rng_seed = 0;
};

struct ClusterOptions {
  int shuffles = 500;
  std::uint64_t rng_seed = 0;
  // Replicates are split across this many threads; results are identical
  // for any value.
  int workers = 1;
};

// Per-component index against a per-component shuffle null. Every replicate
// applies one permutation to all components. A component is significant
// when c_k strictly exceeds the 99th-percentile order statistic of its null.
// Components with zero variance get c_k = 0 and are never significant.
// Throws Error(kSubjectMismatch) when the table order differs from the
// decomposition.
ClusteringResult SignificantComponents(const Decomposition& d,
                                       const SubjectTable& subjects,
                                       const ClusterOptions& options = {});

// sum_k variances[k] * c[k] / total_variance.
// Throws Error(kDegenerateMatrix) when total_variance is zero.
double TotalClustering(std::span<const double> variances, double total_variance,
                       std::span<const double> c);

// 1-based indices of significant components.
std::vector<int> SignificantPcs(const ClusteringResult& result);

// pc_index,variance_fraction,c_k,null_q99,significant
void WriteClusteringCsv(std::ostream& out, const ClusteringResult& result);

}  // namespace scoreaudit

#endif  // SCOREAUDIT_CLUSTER_H_
