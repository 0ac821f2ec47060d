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

#ifndef SCOREAUDIT_INGEST_H_
#define SCOREAUDIT_INGEST_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace scoreaudit {

// One comparison. Subject identifiers are interned by the owning ScoreSet;
// equal indices mean equal identifiers, so `mated()` is identifier equality.
struct ScoreRecord {
  std::uint32_t probe = 0;
  std::uint32_t gallery = 0;
  double score = 0.0;

  bool mated() const { return probe == gallery; }
};

// Raw similarity scores for one algorithm.
class ScoreSet {
 public:
  explicit ScoreSet(std::string algorithm_tag = {});

  // Throws Error(kMalformedRow) for an empty id and Error(kNonFiniteScore)
  // for NaN or infinite scores.
  void Add(std::string_view probe_id, std::string_view gallery_id, double score);
  void Add(std::uint32_t probe, std::uint32_t gallery, double score);

  std::uint32_t Intern(std::string_view subject_id);
  std::optional<std::uint32_t> Find(std::string_view subject_id) const;

  const std::string& algorithm_tag() const { return algorithm_tag_; }
  const std::string& id(std::uint32_t index) const { return ids_[index]; }
  std::span<const std::string> ids() const { return ids_; }
  std::span<const ScoreRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  void Reserve(std::size_t n) { records_.reserve(n); }

 private:
  std::string algorithm_tag_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<ScoreRecord> records_;
};

struct Subject {
  std::string id;
  std::string gender;
  std::string race;
  std::string group;  // GroupLabel(gender, race)
};

// "F" x "B" -> "F×B".
std::string GroupLabel(std::string_view gender, std::string_view race);

class SubjectTable {
 public:
  // Throws Error(kDuplicateSubject) on a repeated id.
  void Add(std::string_view id, std::string_view gender, std::string_view race);

  std::span<const Subject> entries() const { return entries_; }
  const Subject& operator[](std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }
  std::optional<std::size_t> IndexOf(std::string_view id) const;

  // Distinct group labels in order of first appearance.
  std::vector<std::string> GroupLabels() const;
  // Per-entry index into GroupLabels().
  std::vector<int> GroupIndices() const;

 private:
  std::vector<Subject> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Header must name probe_subject_id, gallery_subject_id and score; other
// columns are ignored.
ScoreSet ParseScores(std::istream& in, std::string algorithm_tag);
// Header must name subject_id, gender and race.
SubjectTable ParseSubjects(std::istream& in);

void WriteScores(std::ostream& out, const ScoreSet& scores);
void WriteSubjects(std::ostream& out, const SubjectTable& subjects);

struct ValidationReport {
  std::vector<std::string> unknown_subjects;
  std::vector<std::string> no_mated_records;
  // Unordered pairs of table subjects with no non-mated record, in table order.
  std::vector<std::pair<std::string, std::string>> missing_pairs;
  std::int64_t num_mated = 0;
  std::int64_t num_non_mated = 0;
  bool auditable = false;
};

ValidationReport Validate(const ScoreSet& scores, const SubjectTable& subjects);

}  // namespace scoreaudit

#endif  // SCOREAUDIT_INGEST_H_
