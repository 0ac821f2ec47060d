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

#include "scoreaudit/ingest.h"

#include <cmath>
#include <limits>

#include "scoreaudit/error.h"
#include "text_io.h"

namespace scoreaudit {

ScoreSet::ScoreSet(std::string algorithm_tag)
    : algorithm_tag_(std::move(algorithm_tag)) {}

std::uint32_t ScoreSet::Intern(std::string_view subject_id) {
  if (subject_id.empty()) {
    throw Error(ErrorCode::kMalformedRow, "empty subject identifier");
  }
  std::string key(subject_id);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  auto next = static_cast<std::uint32_t>(ids_.size());
  ids_.push_back(key);
  index_.emplace(std::move(key), next);
  return next;
}

std::optional<std::uint32_t> ScoreSet::Find(std::string_view subject_id) const {
  auto it = index_.find(std::string(subject_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void ScoreSet::Add(std::string_view probe_id, std::string_view gallery_id,
                   double score) {
  if (!std::isfinite(score)) {
    throw Error(ErrorCode::kNonFiniteScore, "score must be finite");
  }
  std::uint32_t probe = Intern(probe_id);
  std::uint32_t gallery = Intern(gallery_id);
  records_.push_back({probe, gallery, score});
}

void ScoreSet::Add(std::uint32_t probe, std::uint32_t gallery, double score) {
  if (!std::isfinite(score)) {
    throw Error(ErrorCode::kNonFiniteScore, "score must be finite");
  }
  if (probe >= ids_.size() || gallery >= ids_.size()) {
    throw Error(ErrorCode::kUnknownSubject, "record references an id that was not interned");
  }
  records_.push_back({probe, gallery, score});
}

std::string GroupLabel(std::string_view gender, std::string_view race) {
  std::string label(gender);
  label += "×";
  label += race;
  return label;
}

void SubjectTable::Add(std::string_view id, std::string_view gender,
                       std::string_view race) {
  if (id.empty()) throw Error(ErrorCode::kMalformedRow, "empty subject_id");
  std::string key(id);
  if (index_.count(key) != 0) throw Error(ErrorCode::kDuplicateSubject, key);
  index_.emplace(key, entries_.size());
  entries_.push_back({std::move(key), std::string(gender), std::string(race),
                      GroupLabel(gender, race)});
}

std::optional<std::size_t> SubjectTable::IndexOf(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> SubjectTable::GroupLabels() const {
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> seen;
  for (const Subject& s : entries_) {
    if (seen.emplace(s.group, static_cast<int>(labels.size())).second) {
      labels.push_back(s.group);
    }
  }
  return labels;
}

std::vector<int> SubjectTable::GroupIndices() const {
  std::vector<int> indices;
  indices.reserve(entries_.size());
  std::unordered_map<std::string, int> seen;
  for (const Subject& s : entries_) {
    auto [it, inserted] = seen.emplace(s.group, static_cast<int>(seen.size()));
    indices.push_back(it->second);
  }
  return indices;
}

ScoreSet ParseScores(std::istream& in, std::string algorithm_tag) {
  std::string line;
  std::int64_t line_no = 0;
  // Skip leading blank lines before the header.
  do {
    if (!text::ReadLine(in, line)) {
      throw Error(ErrorCode::kEmptyInput, "no header row");
    }
    ++line_no;
  } while (text::IsBlank(line));

  auto header = text::SplitFields(line);
  auto probe_col = text::FindColumn(header, "probe_subject_id");
  auto gallery_col = text::FindColumn(header, "gallery_subject_id");
  auto score_col = text::FindColumn(header, "score");
  if (!probe_col || !gallery_col || !score_col) {
    throw Error(ErrorCode::kMalformedRow,
                "header must name probe_subject_id, gallery_subject_id, score",
                line_no);
  }
  const std::size_t width = header.size();

  ScoreSet scores(std::move(algorithm_tag));
  while (text::ReadLine(in, line)) {
    ++line_no;
    if (text::IsBlank(line)) continue;
    auto fields = text::SplitFields(line);
    if (fields.size() != width) {
      throw Error(ErrorCode::kMalformedRow,
                  "expected " + std::to_string(width) + " columns, found " +
                      std::to_string(fields.size()),
                  line_no);
    }
    auto value = text::ParseDouble(fields[*score_col]);
    if (!value) {
      throw Error(ErrorCode::kMalformedRow,
                  "unparseable score '" + std::string(fields[*score_col]) + "'",
                  line_no);
    }
    if (!std::isfinite(*value)) {
      throw Error(ErrorCode::kNonFiniteScore, std::string(fields[*score_col]),
                  line_no);
    }
    if (fields[*probe_col].empty() || fields[*gallery_col].empty()) {
      throw Error(ErrorCode::kMalformedRow, "empty subject identifier", line_no);
    }
    scores.Add(fields[*probe_col], fields[*gallery_col], *value);
  }
  if (scores.size() == 0) throw Error(ErrorCode::kEmptyInput, "no data rows");
  return scores;
}

SubjectTable ParseSubjects(std::istream& in) {
  std::string line;
  std::int64_t line_no = 0;
  do {
    if (!text::ReadLine(in, line)) {
      throw Error(ErrorCode::kEmptyInput, "no header row");
    }
    ++line_no;
  } while (text::IsBlank(line));

  auto header = text::SplitFields(line);
  auto id_col = text::FindColumn(header, "subject_id");
  auto gender_col = text::FindColumn(header, "gender");
  auto race_col = text::FindColumn(header, "race");
  if (!id_col || !gender_col || !race_col) {
    throw Error(ErrorCode::kMalformedRow,
                "header must name subject_id, gender, race", line_no);
  }
  const std::size_t width = header.size();

  SubjectTable table;
  while (text::ReadLine(in, line)) {
    ++line_no;
    if (text::IsBlank(line)) continue;
    auto fields = text::SplitFields(line);
    if (fields.size() != width || fields[*id_col].empty()) {
      throw Error(ErrorCode::kMalformedRow, "bad subject row", line_no);
    }
    table.Add(fields[*id_col], fields[*gender_col], fields[*race_col]);
  }
  if (table.size() == 0) throw Error(ErrorCode::kEmptyInput, "no subjects");
  return table;
}

void WriteScores(std::ostream& out, const ScoreSet& scores) {
  out << "probe_subject_id,gallery_subject_id,score\n";
  for (const ScoreRecord& r : scores.records()) {
    out << scores.id(r.probe) << ',' << scores.id(r.gallery) << ','
        << text::FormatDouble(r.score) << '\n';
  }
}

void WriteSubjects(std::ostream& out, const SubjectTable& subjects) {
  out << "subject_id,gender,race\n";
  for (const Subject& s : subjects.entries()) {
    out << s.id << ',' << s.gender << ',' << s.race << '\n';
  }
}

ValidationReport Validate(const ScoreSet& scores, const SubjectTable& subjects) {
  ValidationReport report;
  const std::size_t n = subjects.size();

  // Score-set id -> table index (or npos).
  constexpr std::size_t kUnknown = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> to_table(scores.ids().size(), kUnknown);
  for (std::uint32_t i = 0; i < scores.ids().size(); ++i) {
    if (auto idx = subjects.IndexOf(scores.id(i))) {
      to_table[i] = *idx;
    } else {
      report.unknown_subjects.push_back(scores.id(i));
    }
  }

  std::vector<bool> has_mated(n, false);
  std::vector<bool> has_pair(n * n, false);
  for (const ScoreRecord& r : scores.records()) {
    if (r.mated()) {
      ++report.num_mated;
    } else {
      ++report.num_non_mated;
    }
    std::size_t a = to_table[r.probe];
    std::size_t b = to_table[r.gallery];
    if (a == kUnknown || b == kUnknown) continue;
    if (r.mated()) {
      has_mated[a] = true;
    } else {
      has_pair[a * n + b] = true;
      has_pair[b * n + a] = true;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!has_mated[i]) report.no_mated_records.push_back(subjects[i].id);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!has_pair[i * n + j]) {
        report.missing_pairs.emplace_back(subjects[i].id, subjects[j].id);
      }
    }
  }

  report.auditable = report.unknown_subjects.empty() &&
                     report.no_mated_records.empty() &&
                     report.missing_pairs.empty() && report.num_mated > 0 &&
                     report.num_non_mated > 0 && n >= 2;
  return report;
}

}  // namespace scoreaudit
