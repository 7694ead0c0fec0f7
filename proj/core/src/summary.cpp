#include "musum/summary.hpp"

#include "musum/common.hpp"
#include "musum/tokenize.hpp"

#include <algorithm>
#include <cmath>

namespace musum {

namespace {

// Sorted disjoint interval set with union bookkeeping.
class Coverage {
 public:
  void add(const TimeSpan& span) {
    if (span.length() <= 0.0) return;
    double lo = span.start_seconds, hi = span.end_seconds;
    std::vector<TimeSpan> merged;
    for (const auto& s : spans_) {
      if (s.end_seconds < lo || s.start_seconds > hi) {
        merged.push_back(s);
      } else {
        lo = std::min(lo, s.start_seconds);
        hi = std::max(hi, s.end_seconds);
      }
    }
    merged.push_back({lo, hi});
    std::sort(merged.begin(), merged.end(),
              [](const TimeSpan& a, const TimeSpan& b) { return a.start_seconds < b.start_seconds; });
    spans_ = std::move(merged);
  }

  // Parts of span not yet covered, in time order.
  std::vector<TimeSpan> gaps(const TimeSpan& span) const {
    std::vector<TimeSpan> out;
    double cursor = span.start_seconds;
    for (const auto& s : spans_) {
      if (s.end_seconds <= cursor) continue;
      if (s.start_seconds >= span.end_seconds) break;
      if (s.start_seconds > cursor) out.push_back({cursor, std::min(s.start_seconds, span.end_seconds)});
      cursor = std::max(cursor, s.end_seconds);
      if (cursor >= span.end_seconds) break;
    }
    if (cursor < span.end_seconds) out.push_back({cursor, span.end_seconds});
    return out;
  }

  double length() const {
    double acc = 0.0;
    for (const auto& s : spans_) acc += s.length();
    return acc;
  }

  const std::vector<TimeSpan>& spans() const { return spans_; }

 private:
  std::vector<TimeSpan> spans_;
};

double gap_total(const std::vector<TimeSpan>& gaps) {
  double acc = 0.0;
  for (const auto& g : gaps) acc += g.length();
  return acc;
}

} // namespace

const char* to_string(Anchor anchor) {
  switch (anchor) {
    case Anchor::Begin: return "begin";
    case Anchor::Middle: return "middle";
    case Anchor::End: return "end";
  }
  return "?";
}

double SummarySelection::total_seconds() const {
  double acc = 0.0;
  for (const auto& s : render_spans) acc += s.length();
  return acc;
}

SummarySelection assemble_summary(const std::vector<int>& ranking,
                                  const std::vector<TimeSpan>& sentence_spans,
                                  double target_seconds) {
  if (ranking.empty()) fail(ErrorKind::Config, "assemble_summary: empty ranking");
  if (!(target_seconds > 0.0)) fail(ErrorKind::Config, "assemble_summary: target must be positive");
  for (int idx : ranking)
    if (idx < 0 || idx >= static_cast<int>(sentence_spans.size()))
      fail(ErrorKind::InvalidSelection, "assemble_summary: ranking index out of range");

  SummarySelection sel;
  sel.ranking = ranking;
  sel.target_seconds = target_seconds;

  Coverage all;
  for (const auto& s : sentence_spans) all.add(s);
  if (all.length() <= target_seconds) {
    // Whole song fits: keep every sentence.
    sel.whole_song = true;
    for (int i = 0; i < static_cast<int>(sentence_spans.size()); ++i) sel.selected.push_back(i);
    std::sort(sel.selected.begin(), sel.selected.end(), [&](int a, int b) {
      return sentence_spans[static_cast<size_t>(a)].start_seconds <
             sentence_spans[static_cast<size_t>(b)].start_seconds;
    });
    for (int i : sel.selected) sel.spans.push_back(sentence_spans[static_cast<size_t>(i)]);
    sel.render_spans = all.spans();
    return sel;
  }

  Coverage covered;
  std::vector<std::pair<int, TimeSpan>> chosen;
  double covered_len = 0.0;
  for (int idx : ranking) {
    const TimeSpan& span = sentence_spans[static_cast<size_t>(idx)];
    const auto gaps = covered.gaps(span);
    const double marginal = gap_total(gaps);
    if (marginal <= 0.0) continue; // already fully covered

    if (covered_len + marginal < target_seconds) {
      covered.add(span);
      covered_len += marginal;
      chosen.emplace_back(idx, span);
      continue;
    }

    // This sentence crosses the target: cut its tail so the union length
    // lands on the target exactly.
    const double need = target_seconds - covered_len;
    double acc = 0.0;
    double cut = span.end_seconds;
    for (const auto& g : gaps) {
      if (acc + g.length() >= need) {
        cut = g.start_seconds + (need - acc);
        break;
      }
      acc += g.length();
    }
    const TimeSpan truncated{span.start_seconds, cut};
    covered.add(truncated);
    covered_len = target_seconds;
    chosen.emplace_back(idx, truncated);
    break;
  }

  std::sort(chosen.begin(), chosen.end(), [](const auto& a, const auto& b) {
    if (a.second.start_seconds != b.second.start_seconds)
      return a.second.start_seconds < b.second.start_seconds;
    return a.first < b.first;
  });
  for (const auto& [idx, span] : chosen) {
    sel.selected.push_back(idx);
    sel.spans.push_back(span);
  }
  sel.render_spans = covered.spans();
  return sel;
}

TimeSpan average_similarity_span(const FrameMatrix& frames, double length_seconds) {
  const int n = frames.frames();
  if (n < 1) fail(ErrorKind::TooShort, "average similarity: no frames");
  const double frame_s = frames.framing.frame_seconds;
  const double hop_s = frames.framing.hop_seconds;
  if (length_seconds < frame_s)
    fail(ErrorKind::Config, "average similarity: window shorter than one frame");
  const double framed_duration = frames.frame_times.back() + frame_s;
  if (length_seconds > framed_duration + 1e-9)
    fail(ErrorKind::TooShort, "average similarity: window longer than the song");

  const int window = static_cast<int>(std::floor((length_seconds - frame_s) / hop_s + 1e-9)) + 1;
  if (window > n) fail(ErrorKind::TooShort, "average similarity: window longer than the song");

  // c_i = mean similarity of frame i to every frame; window score is the mean
  // of c_i over the window, so a prefix sum gives every candidate in O(n).
  std::vector<double> mean_sim(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      acc += cosine_similarity(frames.values.row(i).transpose(), frames.values.row(j).transpose());
    mean_sim[static_cast<size_t>(i)] = acc / n;
  }
  // Each candidate sums its own frames directly (not via a prefix-sum
  // difference) so windows with identical content score bitwise equal and the
  // earliest-start tie rule survives rounding.
  int best = 0;
  double best_score = -1.0;
  for (int s = 0; s + window <= n; ++s) {
    double acc = 0.0;
    for (int i = s; i < s + window; ++i) acc += mean_sim[static_cast<size_t>(i)];
    const double score = acc / window;
    if (score > best_score) {
      best_score = score;
      best = s;
    }
  }
  const double start = frame_start_seconds(frames.framing, frames.sample_rate, best);
  return {start, start + length_seconds};
}

TimeSpan contiguous_span(double clip_duration, double length_seconds, Anchor anchor,
                         bool* warning) {
  if (!(length_seconds > 0.0)) fail(ErrorKind::Config, "contiguous span: length must be positive");
  if (warning != nullptr) *warning = false;
  if (clip_duration < length_seconds) {
    if (warning != nullptr) *warning = true;
    return {0.0, clip_duration};
  }
  switch (anchor) {
    case Anchor::Begin: return {0.0, length_seconds};
    case Anchor::Middle:
      return {(clip_duration - length_seconds) / 2.0, (clip_duration + length_seconds) / 2.0};
    case Anchor::End: return {clip_duration - length_seconds, clip_duration};
  }
  fail(ErrorKind::Config, "contiguous span: unknown anchor");
}

} // namespace musum
