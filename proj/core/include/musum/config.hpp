#pragma once

#include "musum/classify.hpp"
#include "musum/corpus.hpp"
#include "musum/rank.hpp"
#include "musum/tokenize.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace musum {

/// key=value lines; '#' comments; lists are comma separated. Keys may be
/// scoped per algorithm with a dot ("lexrank.vocab_size") to override the
/// plain key for that algorithm only.
class KeyValueConfig {
 public:
  static KeyValueConfig from_string(const std::string& text);
  static KeyValueConfig from_file(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  /// Value of "scope.key" when present, else of "key".
  std::string get_scoped(const std::string& scope, const std::string& key,
                         const std::string& fallback) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

inline const std::vector<std::string> kAllAlgorithms = {
    "grasshopper", "lexrank", "lsa", "mmr", "support-sets",
    "avgsim", "begin", "middle", "end", "full"};

bool is_known_algorithm(const std::string& name);
bool is_sentence_ranker(const std::string& name); // the five graph/vector rankers

/// Parameters one summarization condition actually uses, after applying any
/// per-algorithm overrides.
struct AlgorithmParams {
  std::string algorithm;
  int vocab_size = 50;
  int sentence_size = 10;
  WeightScheme scheme = WeightScheme::DampenedTfIdf;
  double grasshopper_lambda = 0.95;
  LexRankParams lexrank;
  double mmr_lambda = 0.7;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  int workers = 0; // 0 = hardware concurrency
  int sample_rate = 22050;
  double frame_seconds = 0.5;
  double hop_seconds = 0.5;
  int vocab_size = 50;
  int sentence_size = 10;
  WeightScheme scheme = WeightScheme::DampenedTfIdf;
  double summary_seconds = 30.0;
  int mfcc_count = 20;
  bool classify_mfcc_only = false;
  int folds = 10;
  SvmParams svm;
  std::string reference = "full";
  std::vector<std::string> algorithms = kAllAlgorithms;

  double grasshopper_lambda = 0.95;
  LexRankParams lexrank;
  double mmr_lambda = 0.7;
  std::vector<double> mmr_lambdas = {0.5, 0.7};

  std::vector<int> sweep_vocab_sizes = {25, 50, 100};
  std::vector<int> sweep_sentence_sizes = {5, 10, 20};
  std::vector<double> sweep_durations = {5, 10, 15, 20, 25, 30};
  std::vector<std::string> sweep_weightings = {"binary", "tfidf"};

  CorpusParams corpus;

  std::string raw_text; // embedded verbatim in reports
  KeyValueConfig kv;

  AlgorithmParams for_algorithm(const std::string& algorithm) const;

  static ExperimentConfig defaults();
  /// Text must name a seed; every numeric knob is range-checked.
  static ExperimentConfig from_string(const std::string& text);
  static ExperimentConfig from_file(const std::filesystem::path& path);
};

} // namespace musum
