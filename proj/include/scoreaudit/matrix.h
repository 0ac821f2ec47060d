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

#ifndef SCOREAUDIT_MATRIX_H_
#define SCOREAUDIT_MATRIX_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scoreaudit/ingest.h"

namespace scoreaudit {

using CountMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Average subject-pair scores. values(i, j) is the mean of every record
// between subjects i and j in either direction; the diagonal holds mated
// averages. `values` is exactly symmetric.
struct ScoreMatrix {
  std::vector<std::string> subjects;
  Eigen::MatrixXd values;
  CountMatrix counts;

  Eigen::Index size() const { return values.rows(); }
};

struct BuildOptions {
  // Fill cells with no records instead of failing: off-diagonal cells get
  // the mean of observed off-diagonal cells, diagonal cells the mean of
  // observed diagonal cells. Imputed cells keep a count of 0.
  bool allow_missing = false;
  // Skip records that reference subjects absent from the table.
  bool drop_unknown = false;
};

struct BuildStats {
  std::int64_t imputed_cells = 0;  // unordered pairs, diagonal included
  std::int64_t dropped_records = 0;
};

// Subject order follows the table. Throws Error(kUnknownSubject) or
// Error(kMissingPair) unless the corresponding option is set. Per-cell
// means are summed in sorted order, so the result is bit-identical for any
// record order or probe/gallery orientation.
ScoreMatrix BuildScoreMatrix(const ScoreSet& scores, const SubjectTable& subjects,
                             const BuildOptions& options = {},
                             BuildStats* stats = nullptr);

// (x - mean) / sd over the off-diagonal cells, population sd, applied to
// every cell. Throws Error(kDegenerateDistribution) when the sd is zero.
ScoreMatrix NormalizeNonMated(const ScoreMatrix& matrix);

struct DistributionView {
  std::vector<double> mated;      // diagonal, N values
  std::vector<double> non_mated;  // strict upper triangle, row-major
};

DistributionView Distributions(const ScoreMatrix& matrix);

// First row and column carry subject ids.
void WriteMatrixCsv(std::ostream& out, const ScoreMatrix& matrix);
// Imported matrices have unknown counts; every count is set to 1.
// Throws Error(kMalformedRow) for ragged, unparseable or asymmetric input.
ScoreMatrix ReadMatrixCsv(std::istream& in);

}  // namespace scoreaudit

#endif  // SCOREAUDIT_MATRIX_H_
