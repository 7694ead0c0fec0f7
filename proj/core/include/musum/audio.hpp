#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace musum {

/// Mono audio signal. Samples are clamped to [-1, 1] on decode.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source_path;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Analysis framing parameters, in seconds. hop <= frame.
struct FramingSpec {
  double frame_seconds = 0.5;
  double hop_seconds = 0.5;

  int frame_samples(int rate) const;
  int hop_samples(int rate) const;
};

/// Half-open interval of audio time, [start, end) in seconds.
struct TimeSpan {
  double start_seconds = 0.0;
  double end_seconds = 0.0;

  double length() const { return end_seconds - start_seconds; }
};

/// Decode a WAV file, downmix to mono, resample to target_rate, clamp.
AudioClip load_audio(const std::string& path, int target_rate);

/// Band-limited (windowed-sinc) resampling. Output length is
/// round(n * dst_rate / src_rate); passthrough when rates match.
std::vector<double> resample(const std::vector<double>& x, int src_rate, int dst_rate);

/// Number of full analysis frames for a signal of n samples.
std::size_t frame_count(std::size_t n_samples, int frame_len, int hop_len);

/// Split a clip into fixed-length windows; the trailing partial window is
/// dropped. Views point into the clip's sample buffer.
std::vector<std::span<const double>> frame_signal(const AudioClip& clip, const FramingSpec& spec);

/// Start time in seconds of frame index i.
double frame_start_seconds(const FramingSpec& spec, int sample_rate, std::size_t index);

/// Concatenate the sample ranges of the given spans, in order. Spans must be
/// sorted, non-overlapping, and inside the clip.
AudioClip render_summary(const AudioClip& clip, const std::vector<TimeSpan>& spans);

} // namespace musum
