#pragma once

#include "musum/audio.hpp"
#include "musum/dsp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace musum {

/// Per-song codebook of frame-feature centroids ("musical words").
struct Vocabulary {
  Eigen::MatrixXd centroids; // K x feature dim
  double distortion = 0.0;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(centroids.rows()); }
  int dim() const { return static_cast<int>(centroids.cols()); }
};

/// Half-open range of word indices forming one sentence.
struct SentenceRange {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

struct TokenizedSong {
  std::vector<int> words; // one word per frame
  std::vector<SentenceRange> sentences;
  std::vector<TimeSpan> sentence_spans;
  Vocabulary vocabulary;

  int sentence_count() const { return static_cast<int>(sentences.size()); }
};

enum class WeightScheme { Binary, DampenedTfIdf };

const char* to_string(WeightScheme scheme);
WeightScheme weight_scheme_from_string(const std::string& name);

struct SentenceVectors {
  Eigen::MatrixXd matrix; // n_sentences x K
  WeightScheme scheme = WeightScheme::DampenedTfIdf;

  int count() const { return static_cast<int>(matrix.rows()); }
};

Vocabulary build_vocabulary(const FrameMatrix& frames, int k, std::uint64_t seed);

std::vector<int> quantize(const FrameMatrix& frames, const Vocabulary& vocab);

/// Consecutive runs of sentence_size words; a final remainder shorter than
/// ceil(S/2) is merged into the previous sentence (kept if there is none).
std::vector<SentenceRange> segment_sentences(int word_count, int sentence_size);

TokenizedSong tokenize_song(const FrameMatrix& frames, int vocab_size, int sentence_size,
                            std::uint64_t seed);

SentenceVectors weigh_sentences(const TokenizedSong& song, WeightScheme scheme);

/// dot(a,b) / (|a||b|); 0 when either vector is zero.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Pairwise cosine similarities between sentence vectors.
Eigen::MatrixXd sentence_similarity_matrix(const SentenceVectors& vectors);

/// Word sequence and sentence table as text, for inspection.
void dump_tokens(const TokenizedSong& song, const std::string& path);

} // namespace musum
