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

#include "scoreaudit/audit.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <sstream>

#include <Eigen/Core>

#include "scoreaudit/digest.h"
#include "scoreaudit/error.h"

namespace scoreaudit {
namespace {

using Json = nlohmann::ordered_json;

constexpr char kDPrimeForm[] =
    "(mu_M - mu_NM) / sqrt((var_M + var_NM) / 2), sample variances";
constexpr char kNullDesign[] =
    "per-component null; replicate r applies one label permutation, keyed on "
    "(rng_seed, r), to every component";
constexpr char kIndexDefinition[] =
    "c_k = 1 - within-group SS / total SS; within_ratio is the raw ratio";

template <typename Fn>
auto Stage(const std::string& tag, const char* stage, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "[" + tag + "] " + stage + ": " + e.what(), e.line());
  }
}

std::string UtcNow() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool ValidTag(const std::string& tag) {
  return !tag.empty() && std::all_of(tag.begin(), tag.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
           c == '-';
  });
}

std::ifstream OpenInput(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  return in;
}

Json DPrimeJson(const DPrimeResult& r) {
  return Json{{"mu_m", r.mu_m},   {"var_m", r.var_m},   {"mu_nm", r.mu_nm},
              {"var_nm", r.var_nm}, {"d_prime", r.d_prime}};
}

Json SummaryJson(const SeriesSummary& s) {
  return Json{{"count", s.count}, {"mean", s.mean}, {"sd", s.sd}};
}

Json ThresholdJson(const FmrThreshold& t) {
  return Json{{"fmr_threshold", t.value},
              {"target_fmr", t.target_fmr},
              {"achievable", t.achievable},
              {"pool_size", t.pool_size},
              {"note", t.achievable ? "" : "target FMR not reachable with this pool; "
                                           "threshold set just above the maximum score"}};
}

Json TailsJson(const TailSummary& tails) {
  Json j = ThresholdJson(tails.threshold);
  j["race_comparison_set"] = tails.race_comparison_set;
  j["entries"] = tails.entries.size();
  Json medians = Json::object();
  for (PairCategory c : kAllCategories) {
    auto values = NormalizedS99(tails, c);
    medians[std::string(CategoryName(c))] = values.empty() ? Json() : Json(Median(values));
  }
  j["median_normalized_s99"] = medians;
  Json skipped = Json::array();
  for (const SkippedTail& s : tails.skipped) {
    skipped.push_back({{"subject_id", s.subject_id},
                       {"category", std::string(CategoryName(s.category))}});
  }
  j["skipped"] = skipped;
  return j;
}

Json ValidationJson(const ValidationReport& v) {
  Json pairs = Json::array();
  for (const auto& [a, b] : v.missing_pairs) pairs.push_back({a, b});
  return Json{{"auditable", v.auditable},
              {"mated_records", v.num_mated},
              {"non_mated_records", v.num_non_mated},
              {"unknown_subjects", v.unknown_subjects},
              {"no_mated_records", v.no_mated_records},
              {"missing_pairs", pairs}};
}

Json AlgorithmJson(const AlgorithmAudit& a, const AuditConfig& config) {
  const ClusteringResult& cl = a.clustering;
  Json per_pc = Json::array();
  for (const ComponentClustering& pc : cl.components) {
    per_pc.push_back({{"pc_index", pc.pc_index},
                      {"variance", pc.variance},
                      {"variance_fraction", pc.variance_fraction},
                      {"c_k", pc.c_k},
                      {"within_ratio", pc.within_ratio},
                      {"null_q99", pc.null_q99},
                      {"significant", pc.significant}});
  }
  double first_two = 0.0;
  for (int k = 0; k < std::min(2, static_cast<int>(cl.components.size())); ++k) {
    first_two += cl.components[k].variance_fraction;
  }
  const ReductionReport& rd = a.reduction;
  Json files = {{"pc_clustering", "pc_clustering_" + a.tag + ".csv"},
                {"pc_variance", "pc_variance_" + a.tag + ".csv"},
                {"pc_scores", "pc_scores_" + a.tag + ".csv"},
                {"tails", "tails_" + a.tag + ".csv"},
                {"tails_header", "tails_" + a.tag + ".json"},
                {"distributions", "distributions_" + a.tag + ".csv"}};
  if (config.emit_matrix) files["matrix"] = "matrix_" + a.tag + ".csv";

  return Json{
      {"algorithm", a.tag},
      {"input", {{"scores_path", a.scores_path},
                 {"sha256", a.scores_sha256},
                 {"records", a.num_records}}},
      {"validation", ValidationJson(a.validation)},
      {"matrix", {{"subjects", a.matrix.size()},
                  {"imputed_cells", a.build.imputed_cells},
                  {"dropped_records", a.build.dropped_records}}},
      {"tails", TailsJson(a.tails)},
      {"decomposition", {{"components", a.decomposition.num_components()},
                         {"total_variance", a.decomposition.total_variance},
                         {"first_two_variance_fraction", first_two}}},
      {"clustering", {{"c_tot", cl.c_tot},
                      {"c_tot_significant", cl.c_tot_significant},
                      {"n_significant", cl.n_significant},
                      {"significant_pcs", SignificantPcs(cl)},
                      {"significant_variance_share", cl.significant_variance_share},
                      {"non_significant_variance_share",
                       cl.components.empty() ? 0.0 : 1.0 - cl.significant_variance_share},
                      {"alpha", cl.alpha},
                      {"shuffles", cl.shuffles},
                      {"rng_seed", cl.rng_seed},
                      {"null_design", kNullDesign},
                      {"index_definition", kIndexDefinition},
                      {"per_pc", per_pc}}},
      {"reduction", {{"excluded_pcs", rd.excluded_pcs},
                     {"exclusion_source", config.exclude_pcs ? "explicit" : "significance"},
                     {"d_prime_form", kDPrimeForm},
                     {"d_prime_original", DPrimeJson(rd.original)},
                     {"d_prime_reduced", DPrimeJson(rd.reduced)},
                     {"max_asymmetry", rd.max_asymmetry},
                     {"ss_original", SummaryJson(rd.ss_original)},
                     {"dd_original", SummaryJson(rd.dd_original)},
                     {"ss_reduced", SummaryJson(rd.ss_reduced)},
                     {"dd_reduced", SummaryJson(rd.dd_reduced)}}},
      {"files", files},
  };
}

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
      throw Error(ErrorCode::kIoFailure, dir_.string());
    }
  }

  template <typename Writer>
  void Write(const std::string& name, Writer writer) {
    const std::filesystem::path path = dir_ / name;
    std::ostringstream buffer;
    writer(buffer);
    const std::string bytes = buffer.str();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoFailure, path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw Error(ErrorCode::kIoFailure, path.string());
    manifest_.push_back({name, Sha256Hex(bytes), bytes.size()});
  }

  std::vector<ManifestEntry> Finish() {
    Json files = Json::array();
    for (const ManifestEntry& e : manifest_) {
      files.push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    }
    Write("manifest.json", [&](std::ostream& o) {
      o << Json{{"schema_version", kSchemaVersion}, {"files", files}}.dump(2) << '\n';
    });
    return manifest_;
  }

 private:
  std::filesystem::path dir_;
  std::vector<ManifestEntry> manifest_;
};

}  // namespace

void ValidateAuditConfig(const AuditConfig& config) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (!(config.target_fmr > 0.0 && config.target_fmr < 1.0)) {
    fail("target_fmr must lie in (0, 1)");
  }
  if (config.shuffles < 1) fail("shuffles must be >= 1");
  if (config.alpha != 0.01) {
    fail("alpha is tied to the 99th-percentile criterion and must be 0.01");
  }
  std::vector<std::string> tags;
  for (const AlgorithmInput& a : config.algorithms) {
    if (!ValidTag(a.tag)) fail("invalid algorithm tag '" + a.tag + "'");
    if (std::find(tags.begin(), tags.end(), a.tag) != tags.end()) {
      fail("duplicate algorithm tag '" + a.tag + "'");
    }
    tags.push_back(a.tag);
  }
}

AlgorithmAudit AuditAlgorithm(const ScoreSet& scores, const SubjectTable& subjects,
                              const AuditConfig& config) {
  AlgorithmAudit a;
  a.tag = scores.algorithm_tag();
  a.num_records = static_cast<std::int64_t>(scores.size());
  const std::string& tag = a.tag;

  a.validation = Validate(scores, subjects);
  Stage(tag, "validate", [&] {
    const ValidationReport& v = a.validation;
    if (!v.unknown_subjects.empty() && !config.drop_unknown) {
      throw Error(ErrorCode::kUnknownSubject,
                  std::to_string(v.unknown_subjects.size()) +
                      " subject(s) not in the subject table, first " +
                      v.unknown_subjects.front());
    }
    if (v.num_mated == 0 || v.num_non_mated == 0) {
      throw Error(ErrorCode::kEmptyInput, "need mated and non-mated records");
    }
    return 0;
  });

  BuildOptions build;
  build.allow_missing = config.allow_missing;
  build.drop_unknown = config.drop_unknown;
  a.matrix = Stage(tag, "matrix", [&] {
    return BuildScoreMatrix(scores, subjects, build, &a.build);
  });

  TailOptions tail_options;
  tail_options.target_fmr = config.target_fmr;
  tail_options.race_comparison_set = config.race_comparison_set;
  tail_options.drop_unknown = config.drop_unknown;
  a.tails = Stage(tag, "tails", [&] { return SummarizeTails(scores, subjects, tail_options); });

  a.decomposition = Stage(tag, "decomposition", [&] { return PcaDecompose(a.matrix); });

  ClusterOptions cluster;
  cluster.shuffles = config.shuffles;
  cluster.rng_seed = config.rng_seed;
  cluster.workers = config.workers;
  a.clustering = Stage(tag, "clustering", [&] {
    return SignificantComponents(a.decomposition, subjects, cluster);
  });

  ReductionOptions reduction;
  reduction.race_comparison_set = a.tails.race_comparison_set;
  reduction.excluded_pcs = config.exclude_pcs;
  a.reduction = Stage(tag, "reduction", [&] {
    return BuildReductionReport(a.decomposition, a.clustering, subjects, reduction);
  });
  return a;
}

AuditReport RunAudit(const AuditConfig& config) {
  ValidateAuditConfig(config);
  if (config.algorithms.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no score files given");
  }
  AuditReport report;
  report.config = config;

  SubjectTable subjects = [&] {
    std::ifstream in = OpenInput(config.subjects_path);
    return ParseSubjects(in);
  }();
  report.subjects_sha256 = Sha256File(config.subjects_path);
  report.num_subjects = static_cast<std::int64_t>(subjects.size());

  auto audit_one = [&](const AlgorithmInput& input, int workers) {
    AuditConfig local = config;
    local.workers = workers;
    ScoreSet scores = Stage(input.tag, "ingest", [&] {
      std::ifstream in = OpenInput(input.scores_path);
      return ParseScores(in, input.tag);
    });
    AlgorithmAudit a = AuditAlgorithm(scores, subjects, local);
    a.scores_path = input.scores_path.string();
    a.scores_sha256 = Sha256File(input.scores_path);
    return a;
  };

  const int n_alg = static_cast<int>(config.algorithms.size());
  if (config.workers > 1 && n_alg > 1) {
    const int per_alg = std::max(1, config.workers / n_alg);
    std::vector<std::future<AlgorithmAudit>> futures;
    for (const AlgorithmInput& input : config.algorithms) {
      futures.push_back(std::async(std::launch::async, audit_one, std::cref(input), per_alg));
    }
    for (auto& f : futures) report.algorithms.push_back(f.get());
  } else {
    for (const AlgorithmInput& input : config.algorithms) {
      report.algorithms.push_back(audit_one(input, config.workers));
    }
  }

  report.generated_at = UtcNow();
  if (!config.output_dir.empty()) EmitReport(report, config.output_dir);
  return report;
}

nlohmann::ordered_json ReportJson(const AuditReport& report) {
  const AuditConfig& c = report.config;
  Json config = {
      {"target_fmr", c.target_fmr},
      {"shuffles", c.shuffles},
      {"alpha", c.alpha},
      {"rng_seed", c.rng_seed},
      {"race_comparison_set", c.race_comparison_set},
      {"allow_missing", c.allow_missing},
      {"drop_unknown", c.drop_unknown},
      {"exclude_pcs", c.exclude_pcs ? Json(*c.exclude_pcs) : Json()},
  };
  Json algorithms = Json::array();
  for (const AlgorithmAudit& a : report.algorithms) algorithms.push_back(AlgorithmJson(a, c));
  return Json{
      {"schema_version", kSchemaVersion},
      {"generated_at", report.generated_at},
      {"tool", {{"name", "scoreaudit"},
                {"version", kToolVersion},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)}}},
      {"config", config},
      {"subjects", {{"path", c.subjects_path.string()},
                    {"sha256", report.subjects_sha256},
                    {"count", report.num_subjects}}},
      {"algorithms", algorithms},
  };
}

std::vector<ManifestEntry> EmitReport(const AuditReport& report,
                                      const std::filesystem::path& output_dir) {
  OutputDir dir(output_dir);
  dir.Write("report.json", [&](std::ostream& o) { o << ReportJson(report).dump(2) << '\n'; });
  for (const AlgorithmAudit& a : report.algorithms) {
    dir.Write("pc_clustering_" + a.tag + ".csv",
              [&](std::ostream& o) { WriteClusteringCsv(o, a.clustering); });
    dir.Write("pc_variance_" + a.tag + ".csv",
              [&](std::ostream& o) { WritePcVarianceCsv(o, a.decomposition); });
    dir.Write("pc_scores_" + a.tag + ".csv",
              [&](std::ostream& o) { WritePcScoresCsv(o, a.decomposition); });
    dir.Write("tails_" + a.tag + ".csv", [&](std::ostream& o) { WriteTailsCsv(o, a.tails); });
    dir.Write("tails_" + a.tag + ".json", [&](std::ostream& o) {
      Json header = ThresholdJson(a.tails.threshold);
      header["algorithm"] = a.tag;
      header["race_comparison_set"] = a.tails.race_comparison_set;
      o << header.dump(2) << '\n';
    });
    dir.Write("distributions_" + a.tag + ".csv",
              [&](std::ostream& o) { WriteDistributionHistograms(o, a.reduction); });
    if (report.config.emit_matrix) {
      dir.Write("matrix_" + a.tag + ".csv",
                [&](std::ostream& o) { WriteMatrixCsv(o, a.matrix); });
    }
  }
  return dir.Finish();
}

std::vector<TailsRun> RunTails(const AuditConfig& config) {
  ValidateAuditConfig(config);
  if (config.algorithms.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no score files given");
  }
  SubjectTable subjects = [&] {
    std::ifstream in = OpenInput(config.subjects_path);
    return ParseSubjects(in);
  }();
  TailOptions options;
  options.target_fmr = config.target_fmr;
  options.race_comparison_set = config.race_comparison_set;
  options.drop_unknown = config.drop_unknown;

  std::vector<TailsRun> runs;
  for (const AlgorithmInput& input : config.algorithms) {
    ScoreSet scores = Stage(input.tag, "ingest", [&] {
      std::ifstream in = OpenInput(input.scores_path);
      return ParseScores(in, input.tag);
    });
    runs.push_back({input.tag, Stage(input.tag, "tails", [&] {
                      return SummarizeTails(scores, subjects, options);
                    })});
  }
  if (!config.output_dir.empty()) EmitTails(runs, config.output_dir);
  return runs;
}

std::vector<ManifestEntry> EmitTails(const std::vector<TailsRun>& runs,
                                     const std::filesystem::path& output_dir) {
  OutputDir dir(output_dir);
  for (const TailsRun& run : runs) {
    dir.Write("tails_" + run.tag + ".csv", [&](std::ostream& o) { WriteTailsCsv(o, run.tails); });
    dir.Write("tails_" + run.tag + ".json", [&](std::ostream& o) {
      Json header = TailsJson(run.tails);
      header["algorithm"] = run.tag;
      o << header.dump(2) << '\n';
    });
  }
  return dir.Finish();
}

}  // namespace scoreaudit
