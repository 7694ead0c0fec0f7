#include "musum/tokenize.hpp"

#include "musum/common.hpp"
#include "musum/kmeans.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace musum {

const char* to_string(WeightScheme scheme) {
  return scheme == WeightScheme::Binary ? "binary" : "tfidf";
}

WeightScheme weight_scheme_from_string(const std::string& name) {
  if (name == "binary") return WeightScheme::Binary;
  if (name == "tfidf") return WeightScheme::DampenedTfIdf;
  fail(ErrorKind::Config, "unknown weighting scheme: " + name);
}

Vocabulary build_vocabulary(const FrameMatrix& frames, int k, std::uint64_t seed) {
  if (frames.frames() < k)
    fail(ErrorKind::Config,
         strformat("vocabulary size %d exceeds frame count %d", k, frames.frames()));
  const KMeansResult km = kmeans(frames.values, k, seed);
  Vocabulary vocab;
  vocab.centroids = km.centroids;
  vocab.distortion = km.distortion;
  vocab.seed = seed;
  return vocab;
}

std::vector<int> quantize(const FrameMatrix& frames, const Vocabulary& vocab) {
  if (frames.dim() != vocab.dim())
    fail(ErrorKind::Config, strformat("frame dim %d does not match vocabulary dim %d",
                                      frames.dim(), vocab.dim()));
  std::vector<int> words(static_cast<size_t>(frames.frames()));
  for (int i = 0; i < frames.frames(); ++i)
    words[static_cast<size_t>(i)] = nearest_centroid(vocab.centroids, frames.values.row(i).transpose());
  return words;
}

std::vector<SentenceRange> segment_sentences(int word_count, int sentence_size) {
  if (word_count < 1) fail(ErrorKind::Config, "segment_sentences: empty word sequence");
  if (sentence_size < 1) fail(ErrorKind::Config, "segment_sentences: sentence size must be positive");

  std::vector<SentenceRange> out;
  int pos = 0;
  while (word_count - pos >= sentence_size) {
    out.push_back({pos, pos + sentence_size});
    pos += sentence_size;
  }
  const int rem = word_count - pos;
  if (rem > 0) {
    if (rem >= (sentence_size + 1) / 2 || out.empty()) {
      out.push_back({pos, word_count});
    } else {
      out.back().end = word_count;
    }
  }
  return out;
}

TokenizedSong tokenize_song(const FrameMatrix& frames, int vocab_size, int sentence_size,
                            std::uint64_t seed) {
  TokenizedSong song;
  song.vocabulary = build_vocabulary(frames, vocab_size, seed);
  song.words = quantize(frames, song.vocabulary);
  song.sentences = segment_sentences(static_cast<int>(song.words.size()), sentence_size);
  song.sentence_spans.reserve(song.sentences.size());
  for (const auto& range : song.sentences) {
    const double start = frame_start_seconds(frames.framing, frames.sample_rate, range.begin);
    const double last = frame_start_seconds(frames.framing, frames.sample_rate, range.end - 1);
    song.sentence_spans.push_back({start, last + frames.framing.frame_seconds});
  }
  return song;
}

SentenceVectors weigh_sentences(const TokenizedSong& song, WeightScheme scheme) {
  const int n_sentences = song.sentence_count();
  if (n_sentences < 1) fail(ErrorKind::Config, "weigh_sentences: no sentences");
  const int k = song.vocabulary.size();

  SentenceVectors out;
  out.scheme = scheme;
  out.matrix = Eigen::MatrixXd::Zero(n_sentences, k);

  std::vector<std::map<int, int>> counts(static_cast<size_t>(n_sentences));
  std::vector<int> df(static_cast<size_t>(k), 0);
  for (int s = 0; s < n_sentences; ++s) {
    auto& tf = counts[static_cast<size_t>(s)];
    for (int i = song.sentences[static_cast<size_t>(s)].begin;
         i < song.sentences[static_cast<size_t>(s)].end; ++i)
      ++tf[song.words[static_cast<size_t>(i)]];
    for (const auto& [word, count] : tf) ++df[static_cast<size_t>(word)];
  }

  for (int s = 0; s < n_sentences; ++s) {
    for (const auto& [word, count] : counts[static_cast<size_t>(s)]) {
      if (scheme == WeightScheme::Binary) {
        out.matrix(s, word) = 1.0;
      } else {
        const double idf = std::log(static_cast<double>(n_sentences) /
                                    df[static_cast<size_t>(word)]);
        out.matrix(s, word) = (1.0 + std::log(static_cast<double>(count))) * idf;
      }
    }
  }
  return out;
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) fail(ErrorKind::Config, "cosine_similarity: dimension mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

Eigen::MatrixXd sentence_similarity_matrix(const SentenceVectors& vectors) {
  const int n = vectors.count();
  Eigen::MatrixXd sim(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double s = cosine_similarity(vectors.matrix.row(i).transpose(),
                                         vectors.matrix.row(j).transpose());
      sim(i, j) = s;
      sim(j, i) = s;
    }
  }
  return sim;
}

void dump_tokens(const TokenizedSong& song, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  std::fprintf(f, "# words (%zu)\n", song.words.size());
  for (size_t i = 0; i < song.words.size(); ++i)
    std::fprintf(f, "%s%d", i == 0 ? "" : " ", song.words[i]);
  std::fprintf(f, "\n# sentences (%d): begin end start_s end_s\n", song.sentence_count());
  for (int s = 0; s < song.sentence_count(); ++s) {
    const auto& r = song.sentences[static_cast<size_t>(s)];
    const auto& span = song.sentence_spans[static_cast<size_t>(s)];
    std::fprintf(f, "%d %d %.6f %.6f\n", r.begin, r.end, span.start_seconds, span.end_seconds);
  }
  std::fclose(f);
}

} // namespace musum
