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

#include "scoreaudit/tails.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "scoreaudit/error.h"
#include "text_io.h"

namespace scoreaudit {

std::string_view CategoryName(PairCategory category) {
  switch (category) {
    case PairCategory::kSS: return "SS";
    case PairCategory::kSD: return "SD";
    case PairCategory::kDS: return "DS";
    case PairCategory::kDD: return "DD";
  }
  return "?";
}

PairCategory CategorizePair(const Subject& a, const Subject& b) {
  const bool same_gender = a.gender == b.gender;
  const bool same_race = a.race == b.race;
  if (same_gender) return same_race ? PairCategory::kSS : PairCategory::kSD;
  return same_race ? PairCategory::kDS : PairCategory::kDD;
}

double CeilingOrderStatistic(std::span<const double> scores,
                             std::int64_t numerator, std::int64_t denominator) {
  if (scores.empty()) throw Error(ErrorCode::kEmptySequence, "no scores");
  const auto n = static_cast<std::int64_t>(scores.size());
  // ceil(numerator * n / denominator) in integers; rank is 1-based.
  std::int64_t rank = (numerator * n + denominator - 1) / denominator;
  rank = std::clamp<std::int64_t>(rank, 1, n);
  std::vector<double> work(scores.begin(), scores.end());
  auto nth = work.begin() + (rank - 1);
  std::nth_element(work.begin(), nth, work.end());
  return *nth;
}

double Percentile99(std::span<const double> scores) {
  return CeilingOrderStatistic(scores, 99, 100);
}

FmrThreshold ComputeFmrThreshold(std::span<const double> non_mated,
                                 double target_fmr) {
  if (non_mated.empty()) throw Error(ErrorCode::kEmptySequence, "no non-mated scores");
  if (!(target_fmr > 0.0 && target_fmr < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "target FMR must lie in (0, 1)");
  }
  std::vector<double> sorted(non_mated.begin(), non_mated.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<std::int64_t>(sorted.size());

  FmrThreshold result;
  result.target_fmr = target_fmr;
  result.pool_size = n;
  // count(>= sorted[i]) is n - (first index of that value). Walk distinct
  // values downward from the top; the rate only grows as t decreases.
  std::int64_t best = -1;
  std::int64_t i = n - 1;
  while (i >= 0) {
    std::int64_t first = i;
    while (first > 0 && sorted[first - 1] == sorted[i]) --first;
    double rate = static_cast<double>(n - first) / static_cast<double>(n);
    if (rate > target_fmr) break;
    best = first;
    i = first - 1;
  }
  if (best < 0) {
    result.achievable = false;
    result.value = std::nextafter(sorted.back(), std::numeric_limits<double>::infinity());
  } else {
    result.value = sorted[best];
  }
  return result;
}

std::vector<std::string> DefaultRaceComparisonSet(const SubjectTable& subjects) {
  std::vector<std::string> order;
  std::unordered_map<std::string, int> counts;
  for (const Subject& s : subjects.entries()) {
    if (counts[s.race]++ == 0) order.push_back(s.race);
  }
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    return counts[a] > counts[b];
  });
  if (order.size() > 2) order.resize(2);
  return order;
}

TailSummary SummarizeTails(const ScoreSet& scores, const SubjectTable& subjects,
                           const TailOptions& options) {
  TailSummary summary;
  summary.race_comparison_set = options.race_comparison_set.empty()
                                    ? DefaultRaceComparisonSet(subjects)
                                    : options.race_comparison_set;

  const std::size_t n = subjects.size();
  constexpr auto kUnknown = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> to_table(scores.ids().size(), kUnknown);
  for (std::uint32_t i = 0; i < scores.ids().size(); ++i) {
    if (auto idx = subjects.IndexOf(scores.id(i))) to_table[i] = *idx;
  }
  std::vector<bool> in_set(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& set = summary.race_comparison_set;
    in_set[i] = std::find(set.begin(), set.end(), subjects[i].race) != set.end();
  }

  std::vector<double> pool;
  pool.reserve(scores.size());
  std::vector<std::array<std::vector<double>, 4>> per_subject(n);
  for (const ScoreRecord& r : scores.records()) {
    std::size_t a = to_table[r.probe];
    std::size_t b = to_table[r.gallery];
    if (a == kUnknown || b == kUnknown) {
      if (!options.drop_unknown) {
        throw Error(ErrorCode::kUnknownSubject,
                    scores.id(a == kUnknown ? r.probe : r.gallery));
      }
      continue;
    }
    if (r.mated()) continue;
    pool.push_back(r.score);
    if (!in_set[a] || !in_set[b]) continue;
    auto c = static_cast<std::size_t>(CategorizePair(subjects[a], subjects[b]));
    per_subject[a][c].push_back(r.score);
    per_subject[b][c].push_back(r.score);
  }

  summary.threshold = ComputeFmrThreshold(pool, options.target_fmr);
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_set[i]) continue;
    for (PairCategory category : kAllCategories) {
      const auto& values = per_subject[i][static_cast<std::size_t>(category)];
      if (values.empty()) {
        summary.skipped.push_back({subjects[i].id, category});
        continue;
      }
      TailEntry entry;
      entry.subject_id = subjects[i].id;
      entry.category = category;
      entry.n_scores = static_cast<std::int64_t>(values.size());
      entry.s99 = Percentile99(values);
      entry.s99_normalized = entry.s99 / summary.threshold.value;
      summary.entries.push_back(std::move(entry));
    }
  }
  return summary;
}

std::vector<double> NormalizedS99(const TailSummary& summary, PairCategory category) {
  std::vector<double> out;
  for (const TailEntry& e : summary.entries) {
    if (e.category == category) out.push_back(e.s99_normalized);
  }
  return out;
}

double Median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptySequence, "median of nothing");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

void WriteTailsCsv(std::ostream& out, const TailSummary& summary) {
  out << "subject_id,category,n_scores,s99,s99_normalized\n";
  for (const TailEntry& e : summary.entries) {
    out << e.subject_id << ',' << CategoryName(e.category) << ',' << e.n_scores
        << ',' << text::FormatDouble(e.s99) << ','
        << text::FormatDouble(e.s99_normalized) << '\n';
  }
}

}  // namespace scoreaudit
