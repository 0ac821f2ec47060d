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

#include "scoreaudit/matrix.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "scoreaudit/error.h"
#include "text_io.h"

namespace scoreaudit {
namespace {

struct CellScore {
  std::uint64_t cell;  // row * n + col with row <= col
  double score;
};

}  // namespace

ScoreMatrix BuildScoreMatrix(const ScoreSet& scores, const SubjectTable& subjects,
                             const BuildOptions& options, BuildStats* stats) {
  const auto n = static_cast<std::uint64_t>(subjects.size());
  constexpr auto kUnknown = std::numeric_limits<std::uint64_t>::max();
  BuildStats local;

  std::vector<std::uint64_t> to_table(scores.ids().size(), kUnknown);
  for (std::uint32_t i = 0; i < scores.ids().size(); ++i) {
    if (auto idx = subjects.IndexOf(scores.id(i))) to_table[i] = *idx;
  }

  std::vector<CellScore> cells;
  cells.reserve(scores.size());
  for (const ScoreRecord& r : scores.records()) {
    std::uint64_t a = to_table[r.probe];
    std::uint64_t b = to_table[r.gallery];
    if (a == kUnknown || b == kUnknown) {
      if (!options.drop_unknown) {
        const std::string& id = scores.id(a == kUnknown ? r.probe : r.gallery);
        throw Error(ErrorCode::kUnknownSubject, id);
      }
      ++local.dropped_records;
      continue;
    }
    if (a > b) std::swap(a, b);
    cells.push_back({a * n + b, r.score});
  }
  std::sort(cells.begin(), cells.end(), [](const CellScore& x, const CellScore& y) {
    return x.cell != y.cell ? x.cell < y.cell : x.score < y.score;
  });

  ScoreMatrix m;
  m.subjects.reserve(n);
  for (const Subject& s : subjects.entries()) m.subjects.push_back(s.id);
  const auto dim = static_cast<Eigen::Index>(n);
  m.values = Eigen::MatrixXd::Zero(dim, dim);
  m.counts = CountMatrix::Zero(dim, dim);

  for (std::size_t k = 0; k < cells.size();) {
    std::size_t end = k;
    double sum = 0.0;
    while (end < cells.size() && cells[end].cell == cells[k].cell) {
      sum += cells[end].score;
      ++end;
    }
    auto row = static_cast<Eigen::Index>(cells[k].cell / n);
    auto col = static_cast<Eigen::Index>(cells[k].cell % n);
    auto count = static_cast<std::int64_t>(end - k);
    double mean = sum / static_cast<double>(count);
    m.values(row, col) = mean;
    m.values(col, row) = mean;
    m.counts(row, col) = count;
    m.counts(col, row) = count;
    k = end;
  }

  double off_sum = 0.0, diag_sum = 0.0;
  std::int64_t off_n = 0, diag_n = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> missing;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = i; j < dim; ++j) {
      if (m.counts(i, j) == 0) {
        missing.emplace_back(i, j);
      } else if (i == j) {
        diag_sum += m.values(i, j);
        ++diag_n;
      } else {
        off_sum += m.values(i, j);
        ++off_n;
      }
    }
  }
  if (!missing.empty()) {
    if (!options.allow_missing) {
      auto [i, j] = missing.front();
      throw Error(ErrorCode::kMissingPair,
                  m.subjects[i] + "," + m.subjects[j] + " (" +
                      std::to_string(missing.size()) + " cells without records)");
    }
    if ((off_n == 0 && std::any_of(missing.begin(), missing.end(),
                                   [](auto p) { return p.first != p.second; })) ||
        (diag_n == 0 && std::any_of(missing.begin(), missing.end(),
                                    [](auto p) { return p.first == p.second; }))) {
      throw Error(ErrorCode::kMissingPair, "nothing observed to impute from");
    }
    const double off_mean = off_n > 0 ? off_sum / static_cast<double>(off_n) : 0.0;
    const double diag_mean = diag_n > 0 ? diag_sum / static_cast<double>(diag_n) : 0.0;
    for (auto [i, j] : missing) {
      double fill = i == j ? diag_mean : off_mean;
      m.values(i, j) = fill;
      m.values(j, i) = fill;
    }
    local.imputed_cells = static_cast<std::int64_t>(missing.size());
  }
  if (stats != nullptr) *stats = local;
  return m;
}

ScoreMatrix NormalizeNonMated(const ScoreMatrix& matrix) {
  const Eigen::Index n = matrix.size();
  double sum = 0.0;
  std::int64_t count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      sum += matrix.values(i, j);
      ++count;
    }
  }
  if (count == 0) {
    throw Error(ErrorCode::kDegenerateDistribution, "no non-mated cells");
  }
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double d = matrix.values(i, j) - mean;
      ss += d * d;
    }
  }
  const double sd = std::sqrt(ss / static_cast<double>(count));
  if (!(sd > 0.0)) {
    throw Error(ErrorCode::kDegenerateDistribution,
                "non-mated standard deviation is zero");
  }
  ScoreMatrix out = matrix;
  out.values = (matrix.values.array() - mean) / sd;
  return out;
}

DistributionView Distributions(const ScoreMatrix& matrix) {
  const Eigen::Index n = matrix.size();
  DistributionView view;
  view.mated.reserve(n);
  view.non_mated.reserve(n * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    view.mated.push_back(matrix.values(i, i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      view.non_mated.push_back(matrix.values(i, j));
    }
  }
  return view;
}

void WriteMatrixCsv(std::ostream& out, const ScoreMatrix& matrix) {
  out << "subject_id";
  for (const std::string& id : matrix.subjects) out << ',' << id;
  out << '\n';
  for (Eigen::Index i = 0; i < matrix.size(); ++i) {
    out << matrix.subjects[i];
    for (Eigen::Index j = 0; j < matrix.size(); ++j) {
      out << ',' << text::FormatDouble(matrix.values(i, j));
    }
    out << '\n';
  }
}

ScoreMatrix ReadMatrixCsv(std::istream& in) {
  std::string line;
  if (!text::ReadLine(in, line)) throw Error(ErrorCode::kEmptyInput, "no header row");
  auto header = text::SplitFields(line);
  if (header.size() < 2) {
    throw Error(ErrorCode::kMalformedRow, "header has no subject columns", 1);
  }
  ScoreMatrix m;
  for (std::size_t c = 1; c < header.size(); ++c) m.subjects.emplace_back(header[c]);
  const auto n = static_cast<Eigen::Index>(m.subjects.size());
  m.values = Eigen::MatrixXd::Zero(n, n);

  std::int64_t line_no = 1;
  Eigen::Index row = 0;
  while (text::ReadLine(in, line)) {
    ++line_no;
    if (text::IsBlank(line)) continue;
    auto fields = text::SplitFields(line);
    if (row >= n || static_cast<Eigen::Index>(fields.size()) != n + 1 ||
        fields[0] != m.subjects[row]) {
      throw Error(ErrorCode::kMalformedRow, "row does not match header", line_no);
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      auto v = text::ParseDouble(fields[j + 1]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorCode::kMalformedRow, "bad cell value", line_no);
      }
      m.values(row, j) = *v;
    }
    ++row;
  }
  if (row != n) throw Error(ErrorCode::kMalformedRow, "missing rows", line_no);
  if (m.values != m.values.transpose()) {
    throw Error(ErrorCode::kMalformedRow, "matrix is not symmetric");
  }
  m.counts = CountMatrix::Ones(n, n);
  return m;
}

}  // namespace scoreaudit
