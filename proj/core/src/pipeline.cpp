#include "musum/pipeline.hpp"

#include "musum/common.hpp"
#include "musum/corpus.hpp"
#include "musum/dsp.hpp"
#include "musum/parallel.hpp"
#include "musum/rank.hpp"
#include "musum/rng.hpp"
#include "musum/tokenize.hpp"
#include "musum/wav.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

namespace musum {

namespace {

constexpr std::uint64_t kTokenizeSalt = 0x746f6b656e; // "token"
constexpr std::uint64_t kFoldSalt = 0x6576616c;       // "eval"

int effective_workers(const ExperimentConfig& config) {
  return config.workers > 0 ? config.workers : default_worker_count();
}

std::string format_duration(double seconds) { return strformat("%g", seconds); }

std::string algorithm_param_line(const AlgorithmParams& p, const ExperimentConfig& config) {
  if (p.algorithm == "full") return "none";
  if (p.algorithm == "begin" || p.algorithm == "middle" || p.algorithm == "end")
    return "anchor=" + p.algorithm;
  if (p.algorithm == "avgsim")
    return strformat("frame_seconds=%g hop_seconds=%g mfcc_count=%d", config.frame_seconds,
                     config.hop_seconds, config.mfcc_count);
  std::string line = strformat("vocab_size=%d sentence_size=%d weighting=%s", p.vocab_size,
                               p.sentence_size, to_string(p.scheme));
  if (p.algorithm == "grasshopper") line += strformat(" lambda=%g prior=uniform", p.grasshopper_lambda);
  if (p.algorithm == "lexrank")
    line += strformat(" damping=%g threshold=%g weighted=%d", p.lexrank.damping,
                      p.lexrank.threshold, p.lexrank.weighted ? 1 : 0);
  if (p.algorithm == "mmr") line += strformat(" lambda=%g", p.mmr_lambda);
  return line;
}

struct SongOutcome {
  std::string error; // nonempty = song skipped everywhere
  std::vector<SummarySelection> selections;
  std::vector<double> rendered_seconds;
};

} // namespace

std::string ConditionSpec::name() const {
  if (algorithm == "full") return "full";
  return algorithm + "@" + format_duration(duration_seconds) + "s";
}

SummarizeResult summarize_conditions(const DatasetManifest& corpus,
                                     const ExperimentConfig& config,
                                     const std::vector<ConditionSpec>& specs,
                                     const std::filesystem::path& out_dir) {
  if (specs.empty()) fail(ErrorKind::Config, "summarize: no conditions requested");
  for (const auto& spec : specs) {
    if (!is_known_algorithm(spec.algorithm))
      fail(ErrorKind::Config, "unknown algorithm: " + spec.algorithm);
    if (spec.algorithm != "full" && !(spec.duration_seconds > 0.0))
      fail(ErrorKind::Config, "summary duration must be positive");
  }

  // Resolve per-algorithm parameters once; they are shared by all songs.
  std::map<std::string, AlgorithmParams> algo_params;
  bool needs_features = false;
  for (const auto& spec : specs) {
    if (algo_params.count(spec.algorithm) == 0)
      algo_params.emplace(spec.algorithm, config.for_algorithm(spec.algorithm));
    if (is_sentence_ranker(spec.algorithm) || spec.algorithm == "avgsim") needs_features = true;
  }

  std::filesystem::create_directories(out_dir);
  std::set<std::filesystem::path> dirs;
  for (const auto& spec : specs)
    for (const auto& row : corpus.rows) {
      const auto rel = std::filesystem::path(row.path).parent_path();
      dirs.insert(out_dir / spec.name() / rel);
    }
  for (const auto& dir : dirs) std::filesystem::create_directories(dir);

  const int n_songs = static_cast<int>(corpus.rows.size());
  std::vector<SongOutcome> outcomes(static_cast<size_t>(n_songs));

  FramingSpec framing;
  framing.frame_seconds = config.frame_seconds;
  framing.hop_seconds = config.hop_seconds;
  FeatureOptions feature_options;
  feature_options.mfcc_count = config.mfcc_count;

  parallel_for(n_songs, effective_workers(config), [&](int i) {
    const ManifestRow& row = corpus.rows[static_cast<size_t>(i)];
    SongOutcome& outcome = outcomes[static_cast<size_t>(i)];
    try {
      const AudioClip clip = load_audio(corpus.resolve(row).string(), config.sample_rate);
      const double duration = clip.duration_seconds();

      FrameMatrix features;
      if (needs_features) features = extract_frame_features(clip, framing, feature_options);

      // Tokenizations and rankings are per algorithm but shared across
      // durations; identical (vocab, sentence) pairs share one tokenization.
      std::map<std::pair<int, int>, TokenizedSong> tokenized;
      std::map<std::tuple<int, int, int>, SentenceVectors> weighted;
      std::map<std::string, std::vector<int>> rankings;
      std::map<std::string, const TokenizedSong*> ranker_tokens;
      for (const auto& [name, params] : algo_params) {
        if (!is_sentence_ranker(name)) continue;
        const auto token_key = std::make_pair(params.vocab_size, params.sentence_size);
        auto token_it = tokenized.find(token_key);
        if (token_it == tokenized.end()) {
          const std::uint64_t token_seed = derive_seed(
              derive_seed(config.seed, static_cast<std::uint64_t>(params.vocab_size),
                          static_cast<std::uint64_t>(params.sentence_size)),
              kTokenizeSalt, static_cast<std::uint64_t>(i));
          token_it = tokenized
                         .emplace(token_key, tokenize_song(features, params.vocab_size,
                                                           params.sentence_size, token_seed))
                         .first;
        }
        const TokenizedSong& song = token_it->second;
        ranker_tokens[name] = &song;

        const auto weight_key = std::make_tuple(params.vocab_size, params.sentence_size,
                                                static_cast<int>(params.scheme));
        auto weight_it = weighted.find(weight_key);
        if (weight_it == weighted.end())
          weight_it = weighted.emplace(weight_key, weigh_sentences(song, params.scheme)).first;
        const SentenceVectors& vectors = weight_it->second;
        const int n_sentences = vectors.count();

        if (name == "grasshopper") {
          GrasshopperParams gp;
          gp.lambda = params.grasshopper_lambda;
          rankings[name] = grasshopper_rank(sentence_similarity_matrix(vectors), gp, n_sentences);
        } else if (name == "lexrank") {
          rankings[name] =
              rank_by_score_desc(lexrank(sentence_similarity_matrix(vectors), params.lexrank));
        } else if (name == "lsa") {
          rankings[name] = rank_by_score_desc(lsa_rank(vectors));
        } else if (name == "mmr") {
          rankings[name] = mmr_select(vectors, params.mmr_lambda, n_sentences);
        } else { // support-sets
          rankings[name] = rank_by_score_desc(support_sets_rank(vectors));
        }
      }

      outcome.selections.resize(specs.size());
      outcome.rendered_seconds.resize(specs.size(), 0.0);
      for (size_t s = 0; s < specs.size(); ++s) {
        const ConditionSpec& spec = specs[s];
        SummarySelection sel;
        if (is_sentence_ranker(spec.algorithm)) {
          const TokenizedSong& song = *ranker_tokens.at(spec.algorithm);
          sel = assemble_summary(rankings.at(spec.algorithm), song.sentence_spans,
                                 spec.duration_seconds);
        } else if (spec.algorithm == "avgsim") {
          const double framed = features.frame_times.empty()
                                    ? 0.0
                                    : features.frame_times.back() + config.frame_seconds;
          if (spec.duration_seconds >= framed) {
            sel.whole_song = true;
            sel.spans = {{0.0, duration}};
            sel.render_spans = sel.spans;
          } else {
            const TimeSpan span = average_similarity_span(features, spec.duration_seconds);
            sel.spans = {span};
            sel.render_spans = {span};
          }
          sel.target_seconds = spec.duration_seconds;
        } else if (spec.algorithm == "full") {
          sel.whole_song = true;
          sel.spans = {{0.0, duration}};
          sel.render_spans = sel.spans;
          sel.target_seconds = duration;
        } else { // begin | middle | end
          const Anchor anchor = spec.algorithm == "begin"  ? Anchor::Begin
                                : spec.algorithm == "middle" ? Anchor::Middle
                                                             : Anchor::End;
          bool short_song = false;
          const TimeSpan span = contiguous_span(duration, spec.duration_seconds, anchor, &short_song);
          sel.whole_song = short_song;
          sel.spans = {span};
          sel.render_spans = {span};
          sel.target_seconds = spec.duration_seconds;
        }
        sel.algorithm = spec.algorithm;

        const AudioClip rendered = render_summary(clip, sel.render_spans);
        write_wav((out_dir / spec.name() / row.path).string(), rendered);
        outcome.rendered_seconds[s] = rendered.duration_seconds();
        outcome.selections[s] = std::move(sel);
      }
    } catch (const std::exception& e) {
      outcome.error = row.path + ": " + e.what();
      outcome.selections.clear();
      outcome.rendered_seconds.clear();
    }
  });

  SummarizeResult result;
  for (const auto& outcome : outcomes)
    if (!outcome.error.empty()) result.failures.push_back(outcome.error);

  for (size_t s = 0; s < specs.size(); ++s) {
    const ConditionSpec& spec = specs[s];
    const std::filesystem::path cond_dir = out_dir / spec.name();

    DatasetManifest m;
    m.base_dir = cond_dir;
    m.classes = corpus.classes;
    m.meta["condition"] = spec.name();
    m.meta["algorithm"] = spec.algorithm;
    if (spec.algorithm != "full") m.meta["duration"] = format_duration(spec.duration_seconds);

    std::FILE* sel_file = std::fopen((cond_dir / "selections.txt").string().c_str(), "w");
    if (sel_file == nullptr)
      fail(ErrorKind::Io, "cannot write selection records in " + cond_dir.string());
    std::fprintf(sel_file, "# musum-selections 1\n# condition %s\n# algorithm %s\n",
                 spec.name().c_str(), spec.algorithm.c_str());
    if (spec.algorithm != "full")
      std::fprintf(sel_file, "# duration %s\n", format_duration(spec.duration_seconds).c_str());
    std::fprintf(sel_file, "# params %s\n",
                 algorithm_param_line(algo_params.at(spec.algorithm), config).c_str());

    int failed = 0;
    for (int i = 0; i < static_cast<int>(corpus.rows.size()); ++i) {
      const ManifestRow& row = corpus.rows[static_cast<size_t>(i)];
      const SongOutcome& outcome = outcomes[static_cast<size_t>(i)];
      if (!outcome.error.empty()) {
        ++failed;
        continue;
      }
      const SummarySelection& sel = outcome.selections[s];

      ManifestRow out_row;
      out_row.path = row.path;
      out_row.label = row.label;
      out_row.duration_seconds = outcome.rendered_seconds[s];
      out_row.seed = row.seed;
      m.rows.push_back(std::move(out_row));

      std::fprintf(sel_file, "song %s\n", row.path.c_str());
      if (!sel.ranking.empty()) {
        std::fprintf(sel_file, "  ranking");
        for (int r : sel.ranking) std::fprintf(sel_file, " %d", r);
        std::fprintf(sel_file, "\n");
      }
      if (!sel.selected.empty()) {
        std::fprintf(sel_file, "  selected");
        for (int r : sel.selected) std::fprintf(sel_file, " %d", r);
        std::fprintf(sel_file, "\n");
      }
      std::fprintf(sel_file, "  spans");
      for (const auto& span : sel.spans)
        std::fprintf(sel_file, " %.6f:%.6f", span.start_seconds, span.end_seconds);
      std::fprintf(sel_file, "\n  total %.6f\n  whole_song %d\n", sel.total_seconds(),
                   sel.whole_song ? 1 : 0);
    }
    std::fclose(sel_file);

    const std::filesystem::path manifest_path = cond_dir / "manifest.tsv";
    save_manifest(m, manifest_path);
    result.conditions.push_back({spec, manifest_path, failed});
  }
  return result;
}

RunReport evaluate_manifests(const std::vector<std::filesystem::path>& manifest_paths,
                             const ExperimentConfig& config) {
  if (manifest_paths.empty()) fail(ErrorKind::Config, "evaluate: no manifests given");

  std::vector<DatasetManifest> manifests;
  for (const auto& path : manifest_paths) manifests.push_back(load_manifest(path));
  for (size_t i = 1; i < manifests.size(); ++i)
    if (manifests[i].classes != manifests[0].classes)
      fail(ErrorKind::Config, "evaluate: manifests disagree on the class set");

  RunReport report;
  report.config_text = config.raw_text;
  report.reference = config.reference;

  int reference_index = -1;
  for (size_t i = 0; i < manifests.size(); ++i) {
    EvaluatedCondition cond;
    const auto& meta = manifests[i].meta;
    cond.condition = meta.count("condition") ? meta.at("condition")
                                             : manifest_paths[i].parent_path().filename().string();
    cond.algorithm = meta.count("algorithm") ? meta.at("algorithm") : cond.condition;
    if (meta.count("duration")) {
      std::sscanf(meta.at("duration").c_str(), "%lf", &cond.duration_seconds);
    }
    cond.songs = static_cast<int>(manifests[i].rows.size());
    if (cond.condition == config.reference || cond.algorithm == config.reference) {
      if (reference_index >= 0)
        fail(ErrorKind::Config, "evaluate: reference condition appears twice");
      reference_index = static_cast<int>(i);
      cond.is_reference = true;
    }
    report.conditions.push_back(std::move(cond));
  }
  if (reference_index < 0)
    fail(ErrorKind::Config, "evaluate: reference condition '" + config.reference +
                                "' is not among the inputs");

  for (size_t i = 0; i < manifests.size(); ++i) {
    const DatasetManifest& m = manifests[i];
    if (m.rows.empty()) fail(ErrorKind::Config, "evaluate: empty manifest " + manifest_paths[i].string());

    std::vector<std::vector<double>> feats(m.rows.size());
    parallel_for(static_cast<int>(m.rows.size()), effective_workers(config), [&](int r) {
      const AudioClip clip = load_audio(m.resolve(m.rows[static_cast<size_t>(r)]).string(),
                                        config.sample_rate);
      feats[static_cast<size_t>(r)] = classification_features(clip, config.classify_mfcc_only);
    });

    LabeledDataset ds;
    ds.classes = m.classes;
    ds.features.resize(static_cast<Eigen::Index>(m.rows.size()),
                       static_cast<Eigen::Index>(feats[0].size()));
    for (size_t r = 0; r < m.rows.size(); ++r) {
      for (size_t c = 0; c < feats[r].size(); ++c)
        ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = feats[r][c];
      const int label = m.class_index(m.rows[r].label);
      ds.labels.push_back(label);
      ds.ids.push_back(m.rows[r].path);
    }

    // One fold seed for every condition keeps the comparisons paired.
    report.conditions[i].confusion =
        cross_validate(ds, config.folds, derive_seed(config.seed, kFoldSalt), config.svm);
    report.conditions[i].acc = accuracy(report.conditions[i].confusion);
  }

  // Cell-wise pairing with matched orientation: diagonal cells count hits
  // (more is better), off-diagonal cells count confusions (fewer is better),
  // so a uniformly worse condition gives one-signed differences. Raw counts
  // would cancel — every row sums to the same class size in both matrices.
  const auto oriented = [](const ConfusionMatrix& m) {
    std::vector<double> out;
    for (int r = 0; r < m.counts.rows(); ++r)
      for (int c = 0; c < m.counts.cols(); ++c)
        out.push_back(r == c ? m.counts(r, c) : -m.counts(r, c));
    return out;
  };
  const std::vector<double> ref_cells =
      oriented(report.conditions[static_cast<size_t>(reference_index)].confusion);
  for (auto& cond : report.conditions) {
    const std::vector<double> cells = oriented(cond.confusion);
    if (cells.size() >= 5) cond.vs_reference = wilcoxon_signed_rank(cells, ref_cells);
  }
  return report;
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (f == nullptr) fail(ErrorKind::Io, "cannot write report " + path.string());

  std::fprintf(f, "musum evaluation report\n=======================\n\n");
  std::fprintf(f, "reference: %s\n\n", report.reference.c_str());
  std::fprintf(f, "config:\n-----8<-----\n%s\n----->8-----\n\n", report.config_text.c_str());

  for (const auto& cond : report.conditions) {
    std::fprintf(f, "condition %s\n", cond.condition.c_str());
    std::fprintf(f, "  algorithm %s\n", cond.algorithm.c_str());
    if (cond.duration_seconds > 0.0)
      std::fprintf(f, "  duration %s\n", strformat("%g", cond.duration_seconds).c_str());
    std::fprintf(f, "  songs %d\n", cond.songs);
    std::fprintf(f, "  classes");
    for (const auto& c : cond.confusion.classes) std::fprintf(f, " %s", c.c_str());
    std::fprintf(f, "\n  confusion rows=true cols=predicted\n");
    for (int r = 0; r < cond.confusion.counts.rows(); ++r) {
      std::fprintf(f, "    %s", cond.confusion.classes[static_cast<size_t>(r)].c_str());
      for (int c = 0; c < cond.confusion.counts.cols(); ++c)
        std::fprintf(f, " %d", cond.confusion.counts(r, c));
      std::fprintf(f, "\n");
    }
    for (size_t c = 0; c < cond.acc.per_class.size(); ++c) {
      if (cond.acc.per_class[c].has_value())
        std::fprintf(f, "  accuracy %s %.4f\n", cond.confusion.classes[c].c_str(),
                     *cond.acc.per_class[c]);
      else
        std::fprintf(f, "  accuracy %s absent\n", cond.confusion.classes[c].c_str());
    }
    std::fprintf(f, "  accuracy overall %.4f\n", cond.acc.overall);
    if (cond.vs_reference.has_value()) {
      const auto& w = *cond.vs_reference;
      std::fprintf(f, "  wilcoxon_vs_%s W %.6g n %d p %.6g mode %s\n", report.reference.c_str(),
                   w.statistic, w.n_effective, w.p_value, w.exact ? "exact" : "normal");
    } else {
      std::fprintf(f, "  wilcoxon_vs_%s none (fewer than 5 paired cells)\n",
                   report.reference.c_str());
    }
    std::fprintf(f, "\n");
  }

  // Accuracy-by-duration table over conditions that carry a duration.
  std::vector<double> durations;
  std::vector<std::string> algorithms;
  for (const auto& cond : report.conditions) {
    if (cond.duration_seconds <= 0.0) continue;
    if (std::find(durations.begin(), durations.end(), cond.duration_seconds) == durations.end())
      durations.push_back(cond.duration_seconds);
    if (std::find(algorithms.begin(), algorithms.end(), cond.algorithm) == algorithms.end())
      algorithms.push_back(cond.algorithm);
  }
  std::sort(durations.begin(), durations.end());
  if (durations.size() >= 2) {
    std::fprintf(f, "accuracy_by_duration\n  algorithm");
    for (double d : durations) std::fprintf(f, " %s", strformat("%g", d).c_str());
    std::fprintf(f, "\n");
    for (const auto& algo : algorithms) {
      std::fprintf(f, "  %s", algo.c_str());
      for (double d : durations) {
        const EvaluatedCondition* hit = nullptr;
        for (const auto& cond : report.conditions)
          if (cond.algorithm == algo && cond.duration_seconds == d) hit = &cond;
        if (hit != nullptr)
          std::fprintf(f, " %.4f", hit->acc.overall);
        else
          std::fprintf(f, " -");
      }
      std::fprintf(f, "\n");
    }
  }
  std::fclose(f);
}

int cmd_gen_corpus(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                   bool force) {
  if (std::filesystem::exists(out_dir) && !std::filesystem::is_empty(out_dir) && !force)
    fail(ErrorKind::Config,
         "output directory " + out_dir.string() + " is not empty (pass --force to reuse)");

  const auto started = std::chrono::steady_clock::now();
  const DatasetManifest manifest = generate_corpus(default_genre_profiles(), config.corpus,
                                                   out_dir, config.seed,
                                                   effective_workers(config));
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::fprintf(stderr, "gen-corpus: %zu songs in %.1f s\n", manifest.rows.size(), elapsed);
  std::printf("%s\n", (out_dir / "manifest.tsv").string().c_str());
  return 0;
}

int cmd_summarize(const std::filesystem::path& manifest_path, const std::string& algorithm,
                  const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const DatasetManifest corpus = load_manifest(manifest_path);
  const std::vector<ConditionSpec> specs = {{algorithm, config.summary_seconds}};
  const auto started = std::chrono::steady_clock::now();
  const SummarizeResult result = summarize_conditions(corpus, config, specs, out_dir);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  for (const auto& failure : result.failures)
    std::fprintf(stderr, "summarize: failed: %s\n", failure.c_str());
  std::fprintf(stderr, "summarize: %s in %.1f s\n", specs[0].name().c_str(), elapsed);
  std::printf("%s\n", result.conditions.front().manifest_path.string().c_str());
  return result.failures.empty() ? 0 : 1;
}

int cmd_evaluate(const std::vector<std::filesystem::path>& manifest_paths,
                 const ExperimentConfig& config, const std::filesystem::path& out_path) {
  const auto started = std::chrono::steady_clock::now();
  const RunReport report = evaluate_manifests(manifest_paths, config);
  write_report(report, out_path);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::fprintf(stderr, "evaluate: %zu conditions in %.1f s\n", report.conditions.size(), elapsed);
  std::printf("%s\n", out_path.string().c_str());
  return 0;
}

int cmd_sweep(const std::filesystem::path& manifest_path, const ExperimentConfig& config,
              const std::filesystem::path& out_dir) {
  const DatasetManifest corpus = load_manifest(manifest_path);

  std::vector<ConditionSpec> specs;
  for (const auto& algorithm : config.algorithms) {
    if (algorithm == "full") {
      specs.push_back({algorithm, 0.0});
    } else {
      for (double d : config.sweep_durations) specs.push_back({algorithm, d});
    }
  }

  std::filesystem::create_directories(out_dir);
  const auto started = std::chrono::steady_clock::now();
  const SummarizeResult result =
      summarize_conditions(corpus, config, specs, out_dir / "summaries");
  for (const auto& failure : result.failures)
    std::fprintf(stderr, "sweep: failed: %s\n", failure.c_str());

  std::vector<std::filesystem::path> manifest_paths;
  for (const auto& cond : result.conditions) manifest_paths.push_back(cond.manifest_path);
  const RunReport report = evaluate_manifests(manifest_paths, config);
  write_report(report, out_dir / "report.txt");
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::fprintf(stderr, "sweep: %zu conditions in %.1f s\n", report.conditions.size(), elapsed);
  std::printf("%s\n", (out_dir / "report.txt").string().c_str());
  return result.failures.empty() ? 0 : 1;
}

} // namespace musum
