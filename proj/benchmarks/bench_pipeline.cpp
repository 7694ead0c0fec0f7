// Microbenchmarks for the per-song hot path: frame features, vocabulary
// building, the five sentence rankers, summary assembly, and the song-level
// descriptor. All inputs are synthesized deterministically.

#include "musum/dsp.hpp"
#include "musum/rank.hpp"
#include "musum/rng.hpp"
#include "musum/stats.hpp"
#include "musum/summary.hpp"
#include "musum/tokenize.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

namespace {

using namespace musum;

AudioClip make_clip(double seconds) {
  AudioClip clip;
  clip.sample_rate = 22050;
  const int n = static_cast<int>(seconds * clip.sample_rate);
  clip.samples.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / clip.sample_rate;
    clip.samples[static_cast<size_t>(i)] =
        0.4 * std::sin(2.0 * std::numbers::pi * 220.0 * t) +
        0.25 * std::sin(2.0 * std::numbers::pi * 445.0 * t) +
        0.15 * std::sin(2.0 * std::numbers::pi * 1330.0 * t + 0.3 * std::sin(2.0 * std::numbers::pi * 2.0 * t));
  }
  return clip;
}

FrameMatrix make_frames(double seconds) {
  FramingSpec spec;
  spec.frame_seconds = 0.5;
  spec.hop_seconds = 0.5;
  FeatureOptions options;
  options.include_descriptors = true;
  return extract_frame_features(make_clip(seconds), spec, options);
}

SentenceVectors make_vectors(int sentences, int dim, std::uint64_t seed) {
  Rng rng(seed);
  SentenceVectors vectors;
  vectors.matrix = Eigen::MatrixXd(sentences, dim);
  for (int r = 0; r < sentences; ++r)
    for (int c = 0; c < dim; ++c) vectors.matrix(r, c) = rng.uniform() < 0.6 ? 0.0 : rng.uniform();
  return vectors;
}

void BM_FrameFeatures(benchmark::State& state) {
  const AudioClip clip = make_clip(static_cast<double>(state.range(0)));
  FramingSpec spec;
  spec.frame_seconds = 0.5;
  spec.hop_seconds = 0.5;
  FeatureOptions options;
  options.include_descriptors = true;
  for (auto _ : state) benchmark::DoNotOptimize(extract_frame_features(clip, spec, options));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2); // frames
}
BENCHMARK(BM_FrameFeatures)->Arg(30)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_SongFeatureVector(benchmark::State& state) {
  const AudioClip clip = make_clip(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(song_feature_vector(clip));
}
BENCHMARK(BM_SongFeatureVector)->Arg(30)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_BuildVocabulary(benchmark::State& state) {
  const FrameMatrix frames = make_frames(150.0);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_vocabulary(frames, k, 7));
}
BENCHMARK(BM_BuildVocabulary)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_GrasshopperRank(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SentenceVectors vectors = make_vectors(n, 50, 11);
  const Eigen::MatrixXd sim = sentence_similarity_matrix(vectors);
  GrasshopperParams params;
  for (auto _ : state) benchmark::DoNotOptimize(grasshopper_rank(sim, params, n));
}
BENCHMARK(BM_GrasshopperRank)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_LexRank(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SentenceVectors vectors = make_vectors(n, 50, 12);
  const Eigen::MatrixXd sim = sentence_similarity_matrix(vectors);
  const LexRankParams params;
  for (auto _ : state) benchmark::DoNotOptimize(lexrank(sim, params));
}
BENCHMARK(BM_LexRank)->Arg(30)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_LsaRank(benchmark::State& state) {
  const SentenceVectors vectors = make_vectors(static_cast<int>(state.range(0)), 50, 13);
  for (auto _ : state) benchmark::DoNotOptimize(lsa_rank(vectors));
}
BENCHMARK(BM_LsaRank)->Arg(30)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_MmrSelect(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SentenceVectors vectors = make_vectors(n, 50, 14);
  for (auto _ : state) benchmark::DoNotOptimize(mmr_select(vectors, 0.7, n));
}
BENCHMARK(BM_MmrSelect)->Arg(30)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_SupportSetsRank(benchmark::State& state) {
  const SentenceVectors vectors = make_vectors(static_cast<int>(state.range(0)), 50, 15);
  for (auto _ : state) benchmark::DoNotOptimize(support_sets_rank(vectors));
}
BENCHMARK(BM_SupportSetsRank)->Arg(30)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_AssembleSummary(benchmark::State& state) {
  const int n = 60;
  std::vector<TimeSpan> spans;
  std::vector<int> ranking;
  Rng rng(16);
  for (int i = 0; i < n; ++i) {
    spans.push_back({2.5 * i, 2.5 * i + 2.5});
    ranking.push_back(i);
  }
  for (int i = n - 1; i > 0; --i)
    std::swap(ranking[static_cast<size_t>(i)],
              ranking[static_cast<size_t>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)))]);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_summary(ranking, spans, 30.0));
}
BENCHMARK(BM_AssembleSummary)->Unit(benchmark::kMicrosecond);

void BM_WilcoxonExact25(benchmark::State& state) {
  Rng rng(17);
  std::vector<double> a(25), b(25);
  for (size_t i = 0; i < a.size(); ++i) {
    a[i] = std::floor(rng.uniform(0.0, 40.0));
    b[i] = std::floor(rng.uniform(0.0, 40.0));
  }
  for (auto _ : state) benchmark::DoNotOptimize(wilcoxon_signed_rank(a, b));
}
BENCHMARK(BM_WilcoxonExact25)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
