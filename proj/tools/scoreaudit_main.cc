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

// scoreaudit: demographic clustering audit for biometric similarity scores.
//
//   scoreaudit audit --scores face1=face1.csv --subjects subjects.csv --output-dir out
//   scoreaudit synth --output-dir data --demographic-affinity 0.2
//   scoreaudit tails --scores face1=face1.csv --subjects subjects.csv --output-dir out
//
// Exit codes: 0 success, 1 validation failure, 2 numerical failure,
// 3 I/O failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scoreaudit/audit.h"
#include "scoreaudit/error.h"
#include "scoreaudit/ingest.h"
#include "scoreaudit/synth.h"

namespace {

using scoreaudit::Error;
using scoreaudit::ErrorClass;
using scoreaudit::ErrorCode;

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text) {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (c != ' ') {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

// "TAG=PATH" or "PATH" (tag = file stem).
scoreaudit::AlgorithmInput ParseScoresArg(const std::string& arg) {
  auto eq = arg.find('=');
  if (eq == std::string::npos) {
    std::filesystem::path path(arg);
    return {path.stem().string(), path};
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

std::vector<int> ParsePcList(const std::string& text) {
  std::vector<int> pcs;
  for (const std::string& item : SplitList(text)) {
    try {
      std::size_t used = 0;
      int pc = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      pcs.push_back(pc);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidConfig, "bad PC index '" + item + "'");
    }
  }
  return pcs;
}

// "F:B=80,F:W=80" -> group specs.
std::vector<scoreaudit::GroupSpec> ParseGroups(const std::string& text) {
  std::vector<scoreaudit::GroupSpec> groups;
  for (const std::string& item : SplitList(text)) {
    auto colon = item.find(':');
    auto eq = item.find('=');
    if (colon == std::string::npos || eq == std::string::npos || eq < colon) {
      throw Error(ErrorCode::kInvalidConfig, "group '" + item + "' is not GENDER:RACE=COUNT");
    }
    scoreaudit::GroupSpec g;
    g.gender = item.substr(0, colon);
    g.race = item.substr(colon + 1, eq - colon - 1);
    try {
      g.count = std::stoi(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidConfig, "bad count in group '" + item + "'");
    }
    groups.push_back(g);
  }
  return groups;
}

void WriteFile(const std::filesystem::path& path,
               const std::function<void(std::ostream&)>& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, path.string());
  writer(out);
  out.close();
  if (!out) throw Error(ErrorCode::kIoFailure, path.string());
}

struct CommonArgs {
  std::vector<std::string> scores;
  std::string subjects;
  double target_fmr = 1e-4;
  std::string race_set;
  std::string output_dir;
  bool drop_unknown = false;
};

void AddCommon(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--scores", args.scores,
                  "Score file per algorithm, TAG=PATH or PATH (repeatable)")
      ->required();
  cmd->add_option("--subjects", args.subjects, "Subject table (subject_id,gender,race)")
      ->required();
  cmd->add_option("--target-fmr", args.target_fmr, "False match rate of the tail threshold");
  cmd->add_option("--race-comparison-set", args.race_set,
                  "Comma-separated race labels for SS/SD/DS/DD comparisons "
                  "(default: two most frequent)");
  cmd->add_option("--output-dir", args.output_dir, "Directory for reports and tables");
  cmd->add_flag("--drop-unknown", args.drop_unknown,
                "Drop records whose subjects are missing from the subject table");
}

scoreaudit::AuditConfig ToConfig(const CommonArgs& args) {
  scoreaudit::AuditConfig config;
  for (const std::string& s : args.scores) config.algorithms.push_back(ParseScoresArg(s));
  config.subjects_path = args.subjects;
  config.target_fmr = args.target_fmr;
  config.race_comparison_set = SplitList(args.race_set);
  config.output_dir = args.output_dir;
  config.drop_unknown = args.drop_unknown;
  return config;
}

int ExitCodeFor(const Error& e) {
  switch (scoreaudit::ClassOf(e.code())) {
    case ErrorClass::kValidation: return kExitValidation;
    case ErrorClass::kNumerical: return kExitNumerical;
    case ErrorClass::kIo: return kExitIo;
  }
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Demographic clustering audit for biometric similarity scores"};
  app.require_subcommand(1);

  // audit
  CommonArgs audit_args;
  int shuffles = 500;
  double alpha = 0.01;
  std::uint64_t audit_seed = 0;
  bool allow_missing = false;
  bool emit_matrix = false;
  std::string exclude_pcs;
  int threads = 1;
  CLI::App* audit = app.add_subcommand("audit", "Run the full audit");
  AddCommon(audit, audit_args);
  audit->add_option("--shuffles", shuffles, "Label shuffles per null distribution");
  audit->add_option("--alpha", alpha, "Significance level (fixed at 0.01)");
  audit->add_option("--rng-seed", audit_seed, "Seed for the shuffle null");
  audit->add_flag("--allow-missing", allow_missing,
                  "Impute subject pairs without records instead of failing");
  audit->add_flag("--emit-matrix", emit_matrix, "Also write matrix_<alg>.csv");
  audit->add_option("--exclude-pcs", exclude_pcs,
                    "Comma-separated 1-based PCs to remove instead of the significant set");
  audit->add_option("--threads", threads, "Worker threads (does not change results)")
      ->check(CLI::PositiveNumber);

  // tails
  CommonArgs tails_args;
  CLI::App* tails = app.add_subcommand("tails", "Per-subject non-mated tail analysis only");
  AddCommon(tails, tails_args);

  // synth
  scoreaudit::SynthConfig synth_config;
  std::string synth_dir;
  std::string groups;
  std::string synth_tag = "synth";
  int oracle_shuffles = 500;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic score set");
  synth->add_option("--output-dir", synth_dir, "Destination directory")->required();
  synth->add_option("--groups", groups,
                    "GENDER:RACE=COUNT list (default F:B=80,F:W=80,M:B=80,M:W=80)");
  synth->add_option("--images-per-subject", synth_config.images_per_subject,
                    "Comparisons per subject pair");
  synth->add_option("--base", synth_config.base, "Base score");
  synth->add_option("--mated-offset", synth_config.mated_offset, "Mated score offset");
  synth->add_option("--demographic-affinity", synth_config.demographic_affinity,
                    "Score boost for same-group pairs");
  synth->add_option("--identity-scale", synth_config.identity_scale,
                    "Weight of latent identity similarity");
  synth->add_option("--latent-dim", synth_config.latent_dim, "Latent identity dimension");
  synth->add_option("--noise-sd", synth_config.noise_sd, "Per-comparison noise sd");
  synth->add_option("--rng-seed", synth_config.rng_seed, "Generator seed");
  synth->add_option("--algorithm-tag", synth_tag, "Tag recorded in the sidecar");
  synth->add_option("--oracle-shuffles", oracle_shuffles, "Shuffles for the oracle audit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (audit->parsed()) {
      scoreaudit::AuditConfig config = ToConfig(audit_args);
      config.shuffles = shuffles;
      config.alpha = alpha;
      config.rng_seed = audit_seed;
      config.allow_missing = allow_missing;
      config.emit_matrix = emit_matrix;
      config.workers = threads;
      if (!exclude_pcs.empty()) config.exclude_pcs = ParsePcList(exclude_pcs);
      scoreaudit::AuditReport report = scoreaudit::RunAudit(config);
      for (const auto& a : report.algorithms) {
        std::cout << a.tag << ": c_tot=" << a.clustering.c_tot
                  << " n_significant=" << a.clustering.n_significant
                  << " d'=" << a.reduction.original.d_prime << " -> "
                  << a.reduction.reduced.d_prime << '\n';
      }
    } else if (tails->parsed()) {
      scoreaudit::AuditConfig config = ToConfig(tails_args);
      for (const auto& run : scoreaudit::RunTails(config)) {
        std::cout << run.tag << ": threshold=" << run.tails.threshold.value
                  << (run.tails.threshold.achievable ? "" : " (target FMR unreachable)")
                  << " entries=" << run.tails.entries.size() << '\n';
      }
    } else if (synth->parsed()) {
      if (!groups.empty()) synth_config.groups = ParseGroups(groups);
      scoreaudit::ValidateConfig(synth_config);
      std::filesystem::path dir(synth_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorCode::kIoFailure, dir.string());
      }
      scoreaudit::SynthData data = scoreaudit::Generate(synth_config, synth_tag);
      scoreaudit::ClusterOptions oracle_options;
      oracle_options.shuffles = oracle_shuffles;
      oracle_options.rng_seed = synth_config.rng_seed;
      scoreaudit::OracleResult oracle = scoreaudit::Oracle(synth_config, oracle_options);

      WriteFile(dir / "scores.csv", [&](std::ostream& o) { WriteScores(o, data.scores); });
      WriteFile(dir / "subjects.csv", [&](std::ostream& o) { WriteSubjects(o, data.subjects); });
      nlohmann::ordered_json group_json = nlohmann::ordered_json::array();
      for (const auto& g : synth_config.groups) {
        group_json.push_back({{"gender", g.gender}, {"race", g.race}, {"count", g.count}});
      }
      nlohmann::ordered_json sidecar = {
          {"schema_version", scoreaudit::kSchemaVersion},
          {"algorithm_tag", synth_tag},
          {"config", {{"groups", group_json},
                      {"images_per_subject", synth_config.images_per_subject},
                      {"base", synth_config.base},
                      {"mated_offset", synth_config.mated_offset},
                      {"demographic_affinity", synth_config.demographic_affinity},
                      {"identity_scale", synth_config.identity_scale},
                      {"latent_dim", synth_config.latent_dim},
                      {"noise_sd", synth_config.noise_sd},
                      {"rng_seed", synth_config.rng_seed}}},
          {"oracle", {{"c_tot", oracle.oracle_c_tot},
                      {"significant_pcs", oracle.oracle_significant_pcs},
                      {"shuffles", oracle_options.shuffles},
                      {"rng_seed", oracle_options.rng_seed}}},
          {"records", data.scores.size()},
      };
      WriteFile(dir / "synth.json", [&](std::ostream& o) { o << sidecar.dump(2) << '\n'; });
      std::cout << "wrote " << data.scores.size() << " records for "
                << data.subjects.size() << " subjects; oracle c_tot="
                << oracle.oracle_c_tot << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCodeFor(e);
  }
  return 0;
}
