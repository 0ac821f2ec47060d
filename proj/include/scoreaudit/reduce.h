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

#ifndef SCOREAUDIT_REDUCE_H_
#define SCOREAUDIT_REDUCE_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "scoreaudit/cluster.h"
#include "scoreaudit/decomp.h"
#include "scoreaudit/matrix.h"

namespace scoreaudit {

// Rebuilds column_means + sum of the kept rank-one terms, then symmetrizes
// as (X + X^T) / 2. `excluded_pcs` are 1-based; out-of-range indices throw
// Error(kInvalidConfig). `max_asymmetry`, when given, receives
// max |X - X^T| / 2 before symmetrization.
ScoreMatrix ReconstructExcluding(const Decomposition& d,
                                 std::span<const int> excluded_pcs,
                                 double* max_asymmetry = nullptr);

struct DPrimeResult {
  double mu_m = 0.0;
  double var_m = 0.0;
  double mu_nm = 0.0;
  double var_nm = 0.0;
  double d_prime = 0.0;
};

// (mu_m - mu_nm) / sqrt((var_m + var_nm) / 2) with sample variances.
// Throws Error(kEmptySequence) for an empty side and
// Error(kDegenerateDistribution) when the pooled variance is zero. Two
// identical distributions give 0.
DPrimeResult DPrime(std::span<const double> mated, std::span<const double> non_mated);
DPrimeResult DPrime(const DistributionView& view);

struct SeriesSummary {
  std::int64_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample sd; 0 for fewer than two values
};

SeriesSummary Summarize(std::span<const double> values);

// Averaged-score series for one matrix: M is the diagonal; SS and DD are
// non-mated cells whose subjects both have a race in the comparison set.
struct MatrixSeries {
  std::vector<double> mated;
  std::vector<double> same;       // SS
  std::vector<double> different;  // DD
};

MatrixSeries SplitSeries(const ScoreMatrix& matrix, const SubjectTable& subjects,
                         std::span<const std::string> race_comparison_set);

struct ReductionReport {
  std::vector<int> excluded_pcs;
  DPrimeResult original;
  DPrimeResult reduced;
  SeriesSummary ss_original, dd_original, ss_reduced, dd_reduced;
  double max_asymmetry = 0.0;
  MatrixSeries original_series;
  MatrixSeries reduced_series;
};

struct ReductionOptions {
  // Empty selects the two most frequent race labels.
  std::vector<std::string> race_comparison_set;
  // Overrides the significance-driven exclusion set (1-based).
  std::optional<std::vector<int>> excluded_pcs;
};

// Excludes the significant components (or the explicit set), and compares
// d' and the SS/DD summaries of the full reconstruction against the reduced
// one. With nothing excluded both sides are computed identically.
ReductionReport BuildReductionReport(const Decomposition& d,
                                     const ClusteringResult& clustering,
                                     const SubjectTable& subjects,
                                     const ReductionOptions& options = {});

// distribution,stage,bin_low,bin_high,count for M, SS and DD, original and
// reduced, on one shared binning so the six histograms overlay.
void WriteDistributionHistograms(std::ostream& out, const ReductionReport& report,
                                 int bins = 60);

}  // namespace scoreaudit

#endif  // SCOREAUDIT_REDUCE_H_
