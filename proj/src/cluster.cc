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

#include "scoreaudit/cluster.h"

#include <algorithm>
#include <thread>

#include "scoreaudit/error.h"
#include "scoreaudit/rng.h"
#include "scoreaudit/tails.h"
#include "text_io.h"

namespace scoreaudit {
namespace {

struct Scratch {
  std::vector<double> sums;
  std::vector<std::int64_t> counts;
};

ClusteringIndexParts IndexParts(std::span<const double> x, std::span<const int> groups,
                                int num_groups, Scratch& scratch) {
  ClusteringIndexParts parts;
  const std::size_t n = x.size();
  if (n == 0) return parts;

  double grand = 0.0;
  for (double v : x) grand += v;
  grand /= static_cast<double>(n);

  scratch.sums.assign(num_groups, 0.0);
  scratch.counts.assign(num_groups, 0);
  for (std::size_t i = 0; i < n; ++i) {
    scratch.sums[groups[i]] += x[i];
    ++scratch.counts[groups[i]];
  }
  for (int g = 0; g < num_groups; ++g) {
    if (scratch.counts[g] > 0) scratch.sums[g] /= static_cast<double>(scratch.counts[g]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double t = x[i] - grand;
    double w = x[i] - scratch.sums[groups[i]];
    parts.total_ss += t * t;
    parts.within_ss += w * w;
  }
  if (parts.total_ss > 0.0) {
    parts.within_ratio = parts.within_ss / parts.total_ss;
    parts.index = std::clamp(1.0 - parts.within_ratio, 0.0, 1.0);
  }
  return parts;
}

int CountGroups(std::span<const int> groups) {
  int max_label = -1;
  for (int g : groups) {
    if (g < 0) throw Error(ErrorCode::kInvalidConfig, "negative group label");
    max_label = std::max(max_label, g);
  }
  return max_label + 1;
}

std::vector<int> CanonicalLabels(std::span<const int> group_sizes) {
  std::vector<int> labels;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    if (group_sizes[g] < 0) throw Error(ErrorCode::kInvalidConfig, "negative group size");
    labels.insert(labels.end(), group_sizes[g], static_cast<int>(g));
  }
  return labels;
}

std::vector<int> ShuffledLabels(const std::vector<int>& canonical, std::uint64_t seed,
                                int replicate) {
  std::vector<int> labels = canonical;
  CounterRng rng(StreamKey({seed, static_cast<std::uint64_t>(replicate)}));
  Shuffle(std::span<int>(labels), rng);
  return labels;
}

// Runs body(replicate, scratch) for every replicate on `workers` threads.
template <typename Body>
void ForEachReplicate(int shuffles, int workers, Body body) {
  workers = std::clamp(workers, 1, shuffles);
  if (workers == 1) {
    Scratch scratch;
    for (int r = 0; r < shuffles; ++r) body(r, scratch);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    int begin = static_cast<int>(static_cast<std::int64_t>(shuffles) * w / workers);
    int end = static_cast<int>(static_cast<std::int64_t>(shuffles) * (w + 1) / workers);
    threads.emplace_back([begin, end, &body] {
      Scratch scratch;
      for (int r = begin; r < end; ++r) body(r, scratch);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

ClusteringIndexParts ComputeClusteringIndexParts(std::span<const double> x,
                                                 std::span<const int> groups) {
  if (x.size() != groups.size()) {
    throw Error(ErrorCode::kInvalidConfig, "one group label per value required");
  }
  Scratch scratch;
  return IndexParts(x, groups, CountGroups(groups), scratch);
}

double ClusteringIndex(std::span<const double> x, std::span<const int> groups) {
  return ComputeClusteringIndexParts(x, groups).index;
}

std::vector<double> NullDistribution(std::span<const double> x,
                                     std::span<const int> group_sizes,
                                     int shuffles, std::uint64_t rng_seed) {
  if (shuffles < 1) throw Error(ErrorCode::kInvalidConfig, "shuffles must be >= 1");
  std::vector<int> canonical = CanonicalLabels(group_sizes);
  if (canonical.size() != x.size()) {
    throw Error(ErrorCode::kInvalidConfig, "group sizes must sum to the number of values");
  }
  const int num_groups = static_cast<int>(group_sizes.size());
  std::vector<double> out(shuffles);
  Scratch scratch;
  for (int r = 0; r < shuffles; ++r) {
    std::vector<int> labels = ShuffledLabels(canonical, rng_seed, r);
    out[r] = IndexParts(x, labels, num_groups, scratch).index;
  }
  return out;
}

ClusteringResult SignificantComponents(const Decomposition& d,
                                       const SubjectTable& subjects,
                                       const ClusterOptions& options) {
  if (options.shuffles < 1) throw Error(ErrorCode::kInvalidConfig, "shuffles must be >= 1");
  if (subjects.size() != d.subjects.size()) {
    throw Error(ErrorCode::kSubjectMismatch, "subject counts differ");
  }
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (subjects[i].id != d.subjects[i]) {
      throw Error(ErrorCode::kSubjectMismatch,
                  "position " + std::to_string(i) + ": " + subjects[i].id +
                      " vs " + d.subjects[i]);
    }
  }

  const std::vector<int> groups = subjects.GroupIndices();
  const int num_groups = CountGroups(groups);
  std::vector<int> sizes(num_groups, 0);
  for (int g : groups) ++sizes[g];
  const std::vector<int> canonical = CanonicalLabels(sizes);

  const int k_total = d.num_components();
  const auto n = static_cast<std::size_t>(d.scores.rows());
  const int shuffles = options.shuffles;
  auto column = [&](int k) {
    return std::span<const double>(d.scores.col(k).data(), n);
  };
  std::vector<int> live;
  for (int k = 0; k < k_total; ++k) {
    if (d.variances[k] > 0.0) live.push_back(k);
  }

  // null[k * shuffles + r]
  std::vector<double> null(static_cast<std::size_t>(k_total) * shuffles, 0.0);
  ForEachReplicate(shuffles, options.workers, [&](int r, Scratch& scratch) {
    std::vector<int> labels = ShuffledLabels(canonical, options.rng_seed, r);
    for (int k : live) {
      null[static_cast<std::size_t>(k) * shuffles + r] =
          IndexParts(column(k), labels, num_groups, scratch).index;
    }
  });

  ClusteringResult result;
  result.shuffles = shuffles;
  result.rng_seed = options.rng_seed;
  result.components.resize(k_total);
  const bool degenerate = !(d.total_variance > 0.0);
  Scratch scratch;
  std::vector<double> c(k_total, 0.0);
  for (int k = 0; k < k_total; ++k) {
    ComponentClustering& pc = result.components[k];
    pc.pc_index = k + 1;
    pc.variance = d.variances[k];
    pc.variance_fraction = degenerate ? 0.0 : d.variances[k] / d.total_variance;
    if (d.variances[k] > 0.0) {
      ClusteringIndexParts parts = IndexParts(column(k), groups, num_groups, scratch);
      pc.c_k = parts.index;
      pc.within_ratio = parts.within_ratio;
      pc.null_q99 = Percentile99(std::span<const double>(
          null.data() + static_cast<std::size_t>(k) * shuffles, shuffles));
      pc.significant = pc.c_k > pc.null_q99;
    }
    c[k] = pc.c_k;
    if (pc.significant) {
      ++result.n_significant;
      result.c_tot_significant += pc.variance_fraction * pc.c_k;
      result.significant_variance_share += pc.variance_fraction;
    }
  }
  result.c_tot = degenerate ? 0.0 : TotalClustering(d.variances, d.total_variance, c);
  return result;
}

double TotalClustering(std::span<const double> variances, double total_variance,
                       std::span<const double> c) {
  if (!(total_variance > 0.0)) {
    throw Error(ErrorCode::kDegenerateMatrix, "total variance is zero");
  }
  if (variances.size() != c.size()) {
    throw Error(ErrorCode::kInvalidConfig, "one index per component required");
  }
  double weighted = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) weighted += variances[k] * c[k];
  return std::clamp(weighted / total_variance, 0.0, 1.0);
}

std::vector<int> SignificantPcs(const ClusteringResult& result) {
  std::vector<int> pcs;
  for (const ComponentClustering& pc : result.components) {
    if (pc.significant) pcs.push_back(pc.pc_index);
  }
  return pcs;
}

void WriteClusteringCsv(std::ostream& out, const ClusteringResult& result) {
  out << "pc_index,variance_fraction,c_k,null_q99,significant\n";
  for (const ComponentClustering& pc : result.components) {
    out << pc.pc_index << ',' << text::FormatDouble(pc.variance_fraction) << ','
        << text::FormatDouble(pc.c_k) << ',' << text::FormatDouble(pc.null_q99)
        << ',' << (pc.significant ? 1 : 0) << '\n';
  }
}

}  // namespace scoreaudit
