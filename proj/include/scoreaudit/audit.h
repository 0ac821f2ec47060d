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

// End-to-end audit: ingest, matrix, tails, decomposition, clustering and
// reduction for each algorithm, plus report and table emission.

#ifndef SCOREAUDIT_AUDIT_H_
#define SCOREAUDIT_AUDIT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scoreaudit/cluster.h"
#include "scoreaudit/decomp.h"
#include "scoreaudit/ingest.h"
#include "scoreaudit/matrix.h"
#include "scoreaudit/reduce.h"
#include "scoreaudit/tails.h"

namespace scoreaudit {

inline constexpr char kSchemaVersion[] = "1";
inline constexpr char kToolVersion[] = "1.0.0";

struct AlgorithmInput {
  std::string tag;  // [A-Za-z0-9._-]+, used in output file names
  std::filesystem::path scores_path;
};

struct AuditConfig {
  std::vector<AlgorithmInput> algorithms;
  std::filesystem::path subjects_path;
  double target_fmr = 1e-4;
  int shuffles = 500;
  // Tied to the 99th-percentile significance criterion; only 0.01 is valid.
  double alpha = 0.01;
  std::uint64_t rng_seed = 0;
  // Empty selects the two most frequent race labels.
  std::vector<std::string> race_comparison_set;
  std::filesystem::path output_dir;  // empty: do not write files
  bool allow_missing = false;
  bool drop_unknown = false;
  bool emit_matrix = false;
  std::optional<std::vector<int>> exclude_pcs;
  // Thread budget. Never recorded in the report: output is identical for
  // every value.
  int workers = 1;
};

struct AlgorithmAudit {
  std::string tag;
  std::string scores_path;
  std::string scores_sha256;
  std::int64_t num_records = 0;
  ValidationReport validation;
  BuildStats build;
  ScoreMatrix matrix;
  TailSummary tails;
  Decomposition decomposition;
  ClusteringResult clustering;
  ReductionReport reduction;
};

struct AuditReport {
  AuditConfig config;
  std::string subjects_sha256;
  std::int64_t num_subjects = 0;
  std::vector<AlgorithmAudit> algorithms;  // command-line order
  std::string generated_at;                // the only time-dependent field
};

// Throws Error(kInvalidConfig) for bad settings.
void ValidateAuditConfig(const AuditConfig& config);

// Runs every stage on in-memory inputs. Errors carry the algorithm tag and
// stage in their message.
AlgorithmAudit AuditAlgorithm(const ScoreSet& scores, const SubjectTable& subjects,
                              const AuditConfig& config);

// Reads the inputs, audits each algorithm and, when output_dir is set,
// writes the report and tables there.
AuditReport RunAudit(const AuditConfig& config);

nlohmann::ordered_json ReportJson(const AuditReport& report);

struct ManifestEntry {
  std::string file;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

// Writes report.json, pc_clustering_<alg>.csv, pc_variance_<alg>.csv,
// pc_scores_<alg>.csv, tails_<alg>.csv, tails_<alg>.json,
// distributions_<alg>.csv, optionally matrix_<alg>.csv, and manifest.json
// listing all of them. Throws Error(kIoFailure) naming the failing path.
std::vector<ManifestEntry> EmitReport(const AuditReport& report,
                                      const std::filesystem::path& output_dir);

// Tails-only mode: no decomposition.
struct TailsRun {
  std::string tag;
  TailSummary tails;
};
std::vector<TailsRun> RunTails(const AuditConfig& config);
std::vector<ManifestEntry> EmitTails(const std::vector<TailsRun>& runs,
                                     const std::filesystem::path& output_dir);

}  // namespace scoreaudit

#endif  // SCOREAUDIT_AUDIT_H_
