#pragma once

#include "musum/classify.hpp"
#include "musum/config.hpp"
#include "musum/manifest.hpp"
#include "musum/stats.hpp"
#include "musum/summary.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace musum {

struct ConditionSpec {
  std::string algorithm;
  double duration_seconds = 0.0; // ignored for "full"

  std::string name() const; // e.g. "lexrank@30s", "full"
};

struct ConditionOutput {
  ConditionSpec spec;
  std::filesystem::path manifest_path;
  int failed_songs = 0;
};

struct SummarizeResult {
  std::vector<ConditionOutput> conditions;
  std::vector<std::string> failures; // "path: reason", one per failed song
};

/// Summarizes every requested condition in one pass: each song is decoded
/// and tokenized once, each ranker ranks once, and every duration reuses the
/// rankings. Per-song failures skip the song everywhere and are reported,
/// not thrown. Outputs land in out_dir/<condition>/ with a manifest and a
/// selection-record file each.
SummarizeResult summarize_conditions(const DatasetManifest& corpus,
                                     const ExperimentConfig& config,
                                     const std::vector<ConditionSpec>& specs,
                                     const std::filesystem::path& out_dir);

struct EvaluatedCondition {
  std::string condition;
  std::string algorithm;
  double duration_seconds = 0.0;
  int songs = 0;
  ConfusionMatrix confusion;
  AccuracySummary acc;
  std::optional<SignificanceResult> vs_reference; // absent when under 5 paired cells
  bool is_reference = false;
};

struct RunReport {
  std::string config_text;
  std::string reference;
  std::vector<EvaluatedCondition> conditions;
};

/// Cross-validates every manifest with shared fold seeds and compares each
/// condition against the reference condition cell-wise.
RunReport evaluate_manifests(const std::vector<std::filesystem::path>& manifest_paths,
                             const ExperimentConfig& config);

void write_report(const RunReport& report, const std::filesystem::path& path);

// CLI entry points. Return process exit codes: 0 ok, 1 partial per-song
// failures, 2 usage/config errors (thrown as Error and mapped by the caller).
int cmd_gen_corpus(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                   bool force);
int cmd_summarize(const std::filesystem::path& manifest_path, const std::string& algorithm,
                  const ExperimentConfig& config, const std::filesystem::path& out_dir);
int cmd_evaluate(const std::vector<std::filesystem::path>& manifest_paths,
                 const ExperimentConfig& config, const std::filesystem::path& out_path);
int cmd_sweep(const std::filesystem::path& manifest_path, const ExperimentConfig& config,
              const std::filesystem::path& out_dir);

} // namespace musum
