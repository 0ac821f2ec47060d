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

#include "scoreaudit/reduce.h"

#include <algorithm>
#include <cmath>

#include "scoreaudit/error.h"
#include "scoreaudit/tails.h"
#include "text_io.h"

namespace scoreaudit {
namespace {

double Mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double SampleVariance(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

ScoreMatrix ReconstructExcluding(const Decomposition& d,
                                 std::span<const int> excluded_pcs,
                                 double* max_asymmetry) {
  const int k_total = d.num_components();
  std::vector<bool> keep(k_total, true);
  for (int pc : excluded_pcs) {
    if (pc < 1 || pc > k_total) {
      throw Error(ErrorCode::kInvalidConfig,
                  "PC index " + std::to_string(pc) + " outside 1.." +
                      std::to_string(k_total));
    }
    keep[pc - 1] = false;
  }
  const Eigen::Index n = d.scores.rows();
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < k_total; ++k) {
    if (keep[k]) x.noalias() += d.scores.col(k) * d.components.col(k).transpose();
  }
  x.rowwise() += d.column_means.transpose();
  if (max_asymmetry != nullptr) {
    *max_asymmetry = 0.5 * (x - x.transpose()).cwiseAbs().maxCoeff();
  }

  ScoreMatrix out;
  out.subjects = d.subjects;
  out.values = 0.5 * (x + x.transpose());
  // Exact mirror; the two halves above can differ in the last bit.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) out.values(j, i) = out.values(i, j);
  }
  out.counts = CountMatrix::Ones(n, n);
  return out;
}

DPrimeResult DPrime(std::span<const double> mated, std::span<const double> non_mated) {
  if (mated.empty() || non_mated.empty()) {
    throw Error(ErrorCode::kEmptySequence, "d' needs both distributions");
  }
  DPrimeResult r;
  r.mu_m = Mean(mated);
  r.mu_nm = Mean(non_mated);
  r.var_m = SampleVariance(mated, r.mu_m);
  r.var_nm = SampleVariance(non_mated, r.mu_nm);
  const double pooled = 0.5 * (r.var_m + r.var_nm);
  if (!(pooled > 0.0)) {
    throw Error(ErrorCode::kDegenerateDistribution, "pooled variance is zero");
  }
  r.d_prime = (r.mu_m - r.mu_nm) / std::sqrt(pooled);
  return r;
}

DPrimeResult DPrime(const DistributionView& view) {
  return DPrime(view.mated, view.non_mated);
}

SeriesSummary Summarize(std::span<const double> values) {
  SeriesSummary s;
  s.count = static_cast<std::int64_t>(values.size());
  if (values.empty()) return s;
  s.mean = Mean(values);
  s.sd = std::sqrt(SampleVariance(values, s.mean));
  return s;
}

MatrixSeries SplitSeries(const ScoreMatrix& matrix, const SubjectTable& subjects,
                         std::span<const std::string> race_comparison_set) {
  const Eigen::Index n = matrix.size();
  if (static_cast<Eigen::Index>(subjects.size()) != n) {
    throw Error(ErrorCode::kSubjectMismatch, "subject counts differ");
  }
  std::vector<bool> in_set(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (subjects[i].id != matrix.subjects[i]) {
      throw Error(ErrorCode::kSubjectMismatch, subjects[i].id + " vs " + matrix.subjects[i]);
    }
    in_set[i] = std::find(race_comparison_set.begin(), race_comparison_set.end(),
                          subjects[i].race) != race_comparison_set.end();
  }
  MatrixSeries series;
  for (Eigen::Index i = 0; i < n; ++i) {
    series.mated.push_back(matrix.values(i, i));
    if (!in_set[i]) continue;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!in_set[j]) continue;
      PairCategory c = CategorizePair(subjects[i], subjects[j]);
      if (c == PairCategory::kSS) series.same.push_back(matrix.values(i, j));
      if (c == PairCategory::kDD) series.different.push_back(matrix.values(i, j));
    }
  }
  return series;
}

ReductionReport BuildReductionReport(const Decomposition& d,
                                     const ClusteringResult& clustering,
                                     const SubjectTable& subjects,
                                     const ReductionOptions& options) {
  ReductionReport report;
  report.excluded_pcs = options.excluded_pcs ? *options.excluded_pcs
                                             : SignificantPcs(clustering);
  std::sort(report.excluded_pcs.begin(), report.excluded_pcs.end());
  report.excluded_pcs.erase(
      std::unique(report.excluded_pcs.begin(), report.excluded_pcs.end()),
      report.excluded_pcs.end());
  const std::vector<std::string> races = options.race_comparison_set.empty()
                                             ? DefaultRaceComparisonSet(subjects)
                                             : options.race_comparison_set;

  ScoreMatrix original = ReconstructExcluding(d, {});
  ScoreMatrix reduced =
      ReconstructExcluding(d, report.excluded_pcs, &report.max_asymmetry);

  report.original = DPrime(Distributions(original));
  report.reduced = DPrime(Distributions(reduced));
  report.original_series = SplitSeries(original, subjects, races);
  report.reduced_series = SplitSeries(reduced, subjects, races);
  report.ss_original = Summarize(report.original_series.same);
  report.dd_original = Summarize(report.original_series.different);
  report.ss_reduced = Summarize(report.reduced_series.same);
  report.dd_reduced = Summarize(report.reduced_series.different);
  return report;
}

void WriteDistributionHistograms(std::ostream& out, const ReductionReport& report,
                                 int bins) {
  struct Named {
    const char* distribution;
    const char* stage;
    const std::vector<double>* values;
  };
  const Named series[] = {
      {"M", "original", &report.original_series.mated},
      {"SS", "original", &report.original_series.same},
      {"DD", "original", &report.original_series.different},
      {"M", "reduced", &report.reduced_series.mated},
      {"SS", "reduced", &report.reduced_series.same},
      {"DD", "reduced", &report.reduced_series.different},
  };
  double lo = INFINITY, hi = -INFINITY;
  for (const Named& s : series) {
    for (double v : *s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  out << "distribution,stage,bin_low,bin_high,count\n";
  if (!(lo <= hi) || bins < 1) return;
  if (hi == lo) hi = lo + 1.0;
  const double width = (hi - lo) / bins;
  for (const Named& s : series) {
    std::vector<std::int64_t> counts(bins, 0);
    for (double v : *s.values) {
      int b = static_cast<int>((v - lo) / width);
      ++counts[std::clamp(b, 0, bins - 1)];
    }
    for (int b = 0; b < bins; ++b) {
      out << s.distribution << ',' << s.stage << ','
          << text::FormatDouble(lo + b * width) << ','
          << text::FormatDouble(b + 1 == bins ? hi : lo + (b + 1) * width) << ','
          << counts[b] << '\n';
    }
  }
}

}  // namespace scoreaudit
