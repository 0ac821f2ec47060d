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

#ifndef SCOREAUDIT_DECOMP_H_
#define SCOREAUDIT_DECOMP_H_

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "scoreaudit/matrix.h"

namespace scoreaudit {

// Principal components of a score matrix treated as N observations (rows)
// by N variables (columns), column-centered and unscaled.
//
// Column k of `components` is the unit direction of PC k+1; column k of
// `scores` holds every subject's value on it, so the centered matrix equals
// scores * components^T. Variances are sample variances (divide by N - 1)
// of the score columns, sorted non-increasing. Variances below
// N * epsilon * max variance are numerically zero and are stored as exactly
// zero; downstream code treats those components as degenerate.
//
// Each component is oriented so that its largest-magnitude entry is
// non-negative (the first such entry on near-ties).
struct Decomposition {
  std::vector<std::string> subjects;
  Eigen::VectorXd column_means;
  Eigen::MatrixXd components;
  Eigen::MatrixXd scores;
  std::vector<double> variances;
  double total_variance = 0.0;

  int num_components() const { return static_cast<int>(variances.size()); }
};

// Throws Error(kInvalidConfig) for N < 2 and Error(kNumericalFailure) if the
// eigensolver does not converge.
Decomposition PcaDecompose(const ScoreMatrix& matrix);

// variances[k] / total_variance. Throws Error(kDegenerateMatrix) when the
// total variance is zero.
std::vector<double> VarianceFractions(const Decomposition& d);

// subject_id,pc_index,value (pc_index is 1-based).
void WritePcScoresCsv(std::ostream& out, const Decomposition& d);
// pc_index,variance,fraction
void WritePcVarianceCsv(std::ostream& out, const Decomposition& d);

}  // namespace scoreaudit

#endif  // SCOREAUDIT_DECOMP_H_
