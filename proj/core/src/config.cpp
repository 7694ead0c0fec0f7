#include "musum/config.hpp"

#include "musum/common.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace musum {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

} // namespace

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Config, strformat("config line %d: expected key = value", line_no));
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(ErrorKind::Config, strformat("config line %d: empty key", line_no));
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str());
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  double v = 0.0;
  if (std::sscanf(it->second.c_str(), "%lf", &v) != 1)
    fail(ErrorKind::Config, "config key " + key + ": '" + it->second + "' is not a number");
  return v;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  int v = 0;
  if (std::sscanf(it->second.c_str(), "%d", &v) != 1)
    fail(ErrorKind::Config, "config key " + key + ": '" + it->second + "' is not an integer");
  return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorKind::Config, "config key " + key + ": '" + v + "' is not a boolean");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key,
                                                  const std::vector<std::string>& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : split_list(it->second);
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& key,
                                              const std::vector<int>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const auto& item : split_list(it->second)) {
    int v = 0;
    if (std::sscanf(item.c_str(), "%d", &v) != 1)
      fail(ErrorKind::Config, "config key " + key + ": '" + item + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(it->second)) {
    double v = 0.0;
    if (std::sscanf(item.c_str(), "%lf", &v) != 1)
      fail(ErrorKind::Config, "config key " + key + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::string KeyValueConfig::get_scoped(const std::string& scope, const std::string& key,
                                       const std::string& fallback) const {
  const auto scoped = values_.find(scope + "." + key);
  if (scoped != values_.end()) return scoped->second;
  return get_string(key, fallback);
}

bool is_known_algorithm(const std::string& name) {
  return std::find(kAllAlgorithms.begin(), kAllAlgorithms.end(), name) != kAllAlgorithms.end();
}

bool is_sentence_ranker(const std::string& name) {
  return name == "grasshopper" || name == "lexrank" || name == "lsa" || name == "mmr" ||
         name == "support-sets";
}

namespace {

const char* kDefaultConfigText = R"(# experiment defaults
seed = 42
workers = 0
sample_rate = 22050
frame_seconds = 0.5
hop_seconds = 0.5
vocab_size = 50
sentence_size = 10
weighting = tfidf
summary_seconds = 30
mfcc_count = 20
classify_mfcc_only = false
folds = 10
svm_c = 1
svm_gamma = 0
reference = full
algorithms = grasshopper,lexrank,lsa,mmr,support-sets,avgsim,begin,middle,end,full
grasshopper.lambda = 0.95
lexrank.damping = 0.85
lexrank.threshold = 0.1
lexrank.weighted = true
mmr.lambda = 0.7
mmr.lambdas = 0.5,0.7
sweep_vocab_sizes = 25,50,100
sweep_sentence_sizes = 5,10,20
sweep_durations = 5,10,15,20,25,30
sweep_weightings = binary,tfidf
corpus.songs_per_class = 50
corpus.min_seconds = 200
corpus.max_seconds = 260
corpus.ambiguity_fraction = 0.12
corpus.ambiguity_min = 0.2
corpus.ambiguity_max = 0.45
corpus.texture_tint = 0.25
)";

ExperimentConfig build(const KeyValueConfig& kv, const std::string& raw) {
  if (!kv.has("seed")) fail(ErrorKind::Config, "config must set a seed");

  ExperimentConfig c;
  c.kv = kv;
  c.raw_text = raw;
  c.seed = static_cast<std::uint64_t>(kv.get_double("seed", 42));
  c.workers = kv.get_int("workers", 0);
  c.sample_rate = kv.get_int("sample_rate", 22050);
  c.frame_seconds = kv.get_double("frame_seconds", 0.5);
  c.hop_seconds = kv.get_double("hop_seconds", 0.5);
  c.vocab_size = kv.get_int("vocab_size", 50);
  c.sentence_size = kv.get_int("sentence_size", 10);
  c.scheme = weight_scheme_from_string(kv.get_string("weighting", "tfidf"));
  c.summary_seconds = kv.get_double("summary_seconds", 30);
  c.mfcc_count = kv.get_int("mfcc_count", 20);
  c.classify_mfcc_only = kv.get_bool("classify_mfcc_only", false);
  c.folds = kv.get_int("folds", 10);
  c.svm.c = kv.get_double("svm_c", 1.0);
  c.svm.gamma = kv.get_double("svm_gamma", 0.0);
  c.reference = kv.get_string("reference", "full");
  c.algorithms = kv.get_list("algorithms", kAllAlgorithms);

  c.grasshopper_lambda = kv.get_double("grasshopper.lambda", 0.95);
  c.lexrank.damping = kv.get_double("lexrank.damping", 0.85);
  c.lexrank.threshold = kv.get_double("lexrank.threshold", 0.1);
  c.lexrank.weighted = kv.get_bool("lexrank.weighted", true);
  c.mmr_lambda = kv.get_double("mmr.lambda", 0.7);
  c.mmr_lambdas = kv.get_double_list("mmr.lambdas", {0.5, 0.7});

  c.sweep_vocab_sizes = kv.get_int_list("sweep_vocab_sizes", {25, 50, 100});
  c.sweep_sentence_sizes = kv.get_int_list("sweep_sentence_sizes", {5, 10, 20});
  c.sweep_durations = kv.get_double_list("sweep_durations", {5, 10, 15, 20, 25, 30});
  c.sweep_weightings = kv.get_list("sweep_weightings", {"binary", "tfidf"});

  c.corpus.songs_per_class = kv.get_int("corpus.songs_per_class", 50);
  c.corpus.min_song_seconds = kv.get_double("corpus.min_seconds", 200);
  c.corpus.max_song_seconds = kv.get_double("corpus.max_seconds", 260);
  c.corpus.sample_rate = c.sample_rate;
  c.corpus.ambiguity_fraction = kv.get_double("corpus.ambiguity_fraction", 0.12);
  c.corpus.ambiguity_min = kv.get_double("corpus.ambiguity_min", 0.2);
  c.corpus.ambiguity_max = kv.get_double("corpus.ambiguity_max", 0.45);
  c.corpus.texture_genre_tint = kv.get_double("corpus.texture_tint", 0.25);

  if (c.sample_rate < 1) fail(ErrorKind::Config, "sample_rate must be positive");
  if (!(c.frame_seconds > 0.0) || !(c.hop_seconds > 0.0) || c.hop_seconds > c.frame_seconds)
    fail(ErrorKind::Config, "framing requires 0 < hop_seconds <= frame_seconds");
  if (c.vocab_size < 1) fail(ErrorKind::Config, "vocab_size must be positive");
  if (c.sentence_size < 1) fail(ErrorKind::Config, "sentence_size must be positive");
  if (!(c.summary_seconds > 0.0)) fail(ErrorKind::Config, "summary_seconds must be positive");
  if (c.mfcc_count < 1 || c.mfcc_count > 40) fail(ErrorKind::Config, "mfcc_count out of range");
  if (c.folds < 2) fail(ErrorKind::Config, "folds must be at least 2");
  if (c.workers < 0) fail(ErrorKind::Config, "workers must be nonnegative");
  if (!(c.grasshopper_lambda >= 0.0 && c.grasshopper_lambda <= 1.0))
    fail(ErrorKind::Config, "grasshopper.lambda must lie in [0,1]");
  if (!(c.lexrank.damping > 0.0 && c.lexrank.damping < 1.0))
    fail(ErrorKind::Config, "lexrank.damping must lie in (0,1)");
  if (!(c.mmr_lambda >= 0.0 && c.mmr_lambda <= 1.0))
    fail(ErrorKind::Config, "mmr.lambda must lie in [0,1]");
  for (const auto& name : c.algorithms)
    if (!is_known_algorithm(name)) fail(ErrorKind::Config, "unknown algorithm: " + name);
  for (double d : c.sweep_durations)
    if (!(d > 0.0)) fail(ErrorKind::Config, "sweep durations must be positive");
  for (int v : c.sweep_vocab_sizes)
    if (v < 1) fail(ErrorKind::Config, "sweep vocab sizes must be positive");
  for (int s : c.sweep_sentence_sizes)
    if (s < 1) fail(ErrorKind::Config, "sweep sentence sizes must be positive");
  return c;
}

} // namespace

AlgorithmParams ExperimentConfig::for_algorithm(const std::string& algorithm) const {
  if (!is_known_algorithm(algorithm)) fail(ErrorKind::Config, "unknown algorithm: " + algorithm);
  AlgorithmParams p;
  p.algorithm = algorithm;

  const auto scoped_int = [&](const char* key, int fallback) {
    const std::string v = kv.get_scoped(algorithm, key, "");
    if (v.empty()) return fallback;
    int out = 0;
    if (std::sscanf(v.c_str(), "%d", &out) != 1)
      fail(ErrorKind::Config, std::string("bad value for ") + key + ": " + v);
    return out;
  };
  const auto scoped_double = [&](const char* key, double fallback) {
    const std::string v = kv.get_scoped(algorithm, key, "");
    if (v.empty()) return fallback;
    double out = 0.0;
    if (std::sscanf(v.c_str(), "%lf", &out) != 1)
      fail(ErrorKind::Config, std::string("bad value for ") + key + ": " + v);
    return out;
  };

  p.vocab_size = scoped_int("vocab_size", vocab_size);
  p.sentence_size = scoped_int("sentence_size", sentence_size);
  const std::string scheme_name = kv.get_scoped(algorithm, "weighting", to_string(scheme));
  p.scheme = weight_scheme_from_string(scheme_name);
  p.grasshopper_lambda = algorithm == "grasshopper" ? scoped_double("lambda", grasshopper_lambda)
                                                    : grasshopper_lambda;
  p.lexrank = lexrank;
  if (algorithm == "lexrank") {
    p.lexrank.damping = kv.get_double("lexrank.damping", lexrank.damping);
    p.lexrank.threshold = kv.get_double("lexrank.threshold", lexrank.threshold);
    p.lexrank.weighted = kv.get_bool("lexrank.weighted", lexrank.weighted);
  }
  p.mmr_lambda = algorithm == "mmr" ? scoped_double("lambda", mmr_lambda) : mmr_lambda;
  return p;
}

ExperimentConfig ExperimentConfig::defaults() {
  return from_string(kDefaultConfigText);
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  return build(KeyValueConfig::from_string(text), text);
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str());
}

} // namespace musum
