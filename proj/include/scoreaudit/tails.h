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

#ifndef SCOREAUDIT_TAILS_H_
#define SCOREAUDIT_TAILS_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scoreaudit/ingest.h"

namespace scoreaudit {

// First letter: gender same/different. Second letter: race same/different.
enum class PairCategory { kSS, kSD, kDS, kDD };

inline constexpr PairCategory kAllCategories[] = {
    PairCategory::kSS, PairCategory::kSD, PairCategory::kDS, PairCategory::kDD};

std::string_view CategoryName(PairCategory category);
PairCategory CategorizePair(const Subject& a, const Subject& b);

// The ceil(0.99 * n)-th smallest value (1-based), no interpolation.
// Throws Error(kEmptySequence) for empty input.
double Percentile99(std::span<const double> scores);

// Same order statistic at an arbitrary rank: the ceil(q * n)-th smallest,
// where q = numerator / denominator.
double CeilingOrderStatistic(std::span<const double> scores,
                             std::int64_t numerator, std::int64_t denominator);

struct FmrThreshold {
  double value = 0.0;
  // False when no observed score reaches the target rate; `value` is then
  // the next representable double above the maximum score.
  bool achievable = true;
  double target_fmr = 0.0;
  std::int64_t pool_size = 0;
};

// Smallest observed t with count(score >= t) / n <= target_fmr.
// Throws Error(kEmptySequence) or Error(kInvalidConfig) for bad target.
FmrThreshold ComputeFmrThreshold(std::span<const double> non_mated,
                                 double target_fmr);

struct TailEntry {
  std::string subject_id;
  PairCategory category = PairCategory::kSS;
  std::int64_t n_scores = 0;
  double s99 = 0.0;
  double s99_normalized = 0.0;  // s99 / threshold
};

struct SkippedTail {
  std::string subject_id;
  PairCategory category = PairCategory::kSS;
};

struct TailSummary {
  std::vector<TailEntry> entries;   // table order, then category order
  std::vector<SkippedTail> skipped;  // (subject, category) with no scores
  FmrThreshold threshold;
  std::vector<std::string> race_comparison_set;
};

struct TailOptions {
  double target_fmr = 1e-4;
  // Empty selects the two most frequent race labels.
  std::vector<std::string> race_comparison_set;
  bool drop_unknown = false;
};

// The two most frequent race labels; ties go to the label seen first.
std::vector<std::string> DefaultRaceComparisonSet(const SubjectTable& subjects);

// Per-subject, per-category S99 over raw non-mated scores. Both subjects of
// a comparison must have a race in the comparison set. The FMR threshold is
// computed over every non-mated score.
TailSummary SummarizeTails(const ScoreSet& scores, const SubjectTable& subjects,
                           const TailOptions& options = {});

// Normalized S99 values of one category, in entry order.
std::vector<double> NormalizedS99(const TailSummary& summary, PairCategory category);

double Median(std::vector<double> values);

void WriteTailsCsv(std::ostream& out, const TailSummary& summary);

}  // namespace scoreaudit

#endif  // SCOREAUDIT_TAILS_H_
