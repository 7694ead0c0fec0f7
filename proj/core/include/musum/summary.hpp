#pragma once

#include "musum/audio.hpp"
#include "musum/dsp.hpp"

#include <string>
#include <vector>

namespace musum {

enum class Anchor { Begin, Middle, End };

const char* to_string(Anchor anchor);

struct SummarySelection {
  std::vector<int> ranking;       // full sentence order as produced by the ranker
  std::vector<int> selected;      // chosen sentences in temporal order
  std::vector<TimeSpan> spans;    // one span per selected sentence (last may be truncated)
  std::vector<TimeSpan> render_spans; // disjoint, sorted; what gets rendered
  double target_seconds = 0.0;
  std::string algorithm;
  bool whole_song = false; // song shorter than the target

  double total_seconds() const;
};

/// Walks the ranking, keeping sentences while the summary is shorter than the
/// target. Coverage is counted as a union of time spans, so overlapping
/// sentences are not double counted and a sentence adding nothing is skipped.
/// The sentence that crosses the target loses its tail so the total hits the
/// target exactly. Songs shorter than the target are selected whole.
SummarySelection assemble_summary(const std::vector<int>& ranking,
                                  const std::vector<TimeSpan>& sentence_spans,
                                  double target_seconds);

/// Start of the L-second window whose frames are on average most similar to
/// the whole song. Ties resolve to the earliest start.
TimeSpan average_similarity_span(const FrameMatrix& frames, double length_seconds);

/// Fixed window at the beginning, middle, or end. A song shorter than the
/// window is returned whole with warning set.
TimeSpan contiguous_span(double clip_duration, double length_seconds, Anchor anchor,
                         bool* warning = nullptr);

} // namespace musum
