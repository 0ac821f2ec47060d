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

#include "scoreaudit/decomp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "scoreaudit/error.h"
#include "text_io.h"

namespace scoreaudit {

Decomposition PcaDecompose(const ScoreMatrix& matrix) {
  const Eigen::Index n = matrix.size();
  if (n < 2) throw Error(ErrorCode::kInvalidConfig, "need at least two subjects");

  Decomposition d;
  d.subjects = matrix.subjects;
  d.column_means = matrix.values.colwise().mean().transpose();
  const Eigen::MatrixXd centered =
      matrix.values.rowwise() - d.column_means.transpose();
  const double dof = static_cast<double>(n - 1);

  Eigen::MatrixXd covariance = (centered.transpose() * centered) / dof;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumericalFailure, "eigensolver did not converge");
  }

  const Eigen::MatrixXd directions = solver.eigenvectors();
  const Eigen::MatrixXd projected = centered * directions;
  std::vector<double> variance(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    variance[k] = projected.col(k).squaredNorm() / dof;
  }
  // Eigen returns ascending eigenvalues; order by the realized variances.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return variance[a] > variance[b];
  });

  d.components.resize(n, n);
  d.scores.resize(n, n);
  d.variances.resize(n);
  const double max_variance = variance[order.front()];
  const double zero_floor =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_variance;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd direction = directions.col(order[k]);
    Eigen::VectorXd values = projected.col(order[k]);

    const double peak = direction.cwiseAbs().maxCoeff();
    Eigen::Index lead = 0;
    while (std::abs(direction(lead)) < peak * (1.0 - 1e-10)) ++lead;
    if (direction(lead) < 0.0) {
      direction = -direction;
      values = -values;
    }
    d.components.col(k) = direction;
    d.scores.col(k) = values;
    d.variances[k] = variance[order[k]] <= zero_floor ? 0.0 : variance[order[k]];
  }
  d.total_variance = centered.squaredNorm() / dof;
  return d;
}

std::vector<double> VarianceFractions(const Decomposition& d) {
  if (!(d.total_variance > 0.0)) {
    throw Error(ErrorCode::kDegenerateMatrix, "total variance is zero");
  }
  std::vector<double> fractions;
  fractions.reserve(d.variances.size());
  for (double v : d.variances) fractions.push_back(v / d.total_variance);
  return fractions;
}

void WritePcScoresCsv(std::ostream& out, const Decomposition& d) {
  out << "subject_id,pc_index,value\n";
  for (Eigen::Index k = 0; k < d.scores.cols(); ++k) {
    for (Eigen::Index i = 0; i < d.scores.rows(); ++i) {
      out << d.subjects[i] << ',' << (k + 1) << ','
          << text::FormatDouble(d.scores(i, k)) << '\n';
    }
  }
}

void WritePcVarianceCsv(std::ostream& out, const Decomposition& d) {
  out << "pc_index,variance,fraction\n";
  const bool degenerate = !(d.total_variance > 0.0);
  for (std::size_t k = 0; k < d.variances.size(); ++k) {
    double fraction = degenerate ? 0.0 : d.variances[k] / d.total_variance;
    out << (k + 1) << ',' << text::FormatDouble(d.variances[k]) << ','
        << text::FormatDouble(fraction) << '\n';
  }
}

}  // namespace scoreaudit
