#include "musum/audio.hpp"

#include "musum/common.hpp"
#include "musum/wav.hpp"

#include <algorithm>
#include <cmath>

namespace musum {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kSincTaps = 32; // one-sided kernel width at unity ratio

double sinc(double t) {
  if (std::abs(t) < 1e-12) return 1.0;
  double x = kPi * t;
  return std::sin(x) / x;
}

} // namespace

int FramingSpec::frame_samples(int rate) const {
  return static_cast<int>(std::llround(frame_seconds * rate));
}

int FramingSpec::hop_samples(int rate) const {
  return static_cast<int>(std::llround(hop_seconds * rate));
}

AudioClip load_audio(const std::string& path, int target_rate) {
  if (target_rate <= 0) fail(ErrorKind::Config, "load_audio: target rate must be positive");
  AudioClip clip = read_wav(path);
  if (clip.sample_rate != target_rate) {
    clip.samples = resample(clip.samples, clip.sample_rate, target_rate);
    clip.sample_rate = target_rate;
    for (double& v : clip.samples) v = std::min(1.0, std::max(-1.0, v));
  }
  return clip;
}

std::vector<double> resample(const std::vector<double>& x, int src_rate, int dst_rate) {
  if (src_rate <= 0 || dst_rate <= 0) fail(ErrorKind::Config, "resample: rates must be positive");
  if (src_rate == dst_rate) return x;
  if (x.empty()) return {};

  const double ratio = static_cast<double>(dst_rate) / src_rate;
  const double cutoff = 0.5 * std::min(1.0, ratio);   // cycles per source sample
  const double support = kSincTaps / std::min(1.0, ratio);
  const size_t n_in = x.size();
  const size_t n_out = static_cast<size_t>(std::llround(static_cast<double>(n_in) * ratio));

  std::vector<double> out(n_out);
  for (size_t m = 0; m < n_out; ++m) {
    const double center = static_cast<double>(m) / ratio;
    const long lo = std::max<long>(0, static_cast<long>(std::ceil(center - support)));
    const long hi = std::min<long>(static_cast<long>(n_in) - 1,
                                   static_cast<long>(std::floor(center + support)));
    double acc = 0.0;
    double norm = 0.0;
    for (long k = lo; k <= hi; ++k) {
      const double t = static_cast<double>(k) - center;
      const double w = 0.5 + 0.5 * std::cos(kPi * t / support); // Hann taper
      const double h = 2.0 * cutoff * sinc(2.0 * cutoff * t) * w;
      acc += x[static_cast<size_t>(k)] * h;
      norm += h;
    }
    out[m] = norm != 0.0 ? acc / norm : 0.0;
  }
  return out;
}

std::size_t frame_count(std::size_t n_samples, int frame_len, int hop_len) {
  if (frame_len <= 0 || hop_len <= 0 || n_samples < static_cast<std::size_t>(frame_len)) return 0;
  return (n_samples - static_cast<std::size_t>(frame_len)) / static_cast<std::size_t>(hop_len) + 1;
}

std::vector<std::span<const double>> frame_signal(const AudioClip& clip, const FramingSpec& spec) {
  if (spec.frame_seconds <= 0 || spec.hop_seconds <= 0) {
    fail(ErrorKind::Config, "frame_signal: frame and hop must be positive");
  }
  if (spec.hop_seconds > spec.frame_seconds) {
    fail(ErrorKind::Config, "frame_signal: hop exceeds frame");
  }
  const int frame_len = spec.frame_samples(clip.sample_rate);
  const int hop_len = spec.hop_samples(clip.sample_rate);
  const std::size_t count = frame_count(clip.samples.size(), frame_len, hop_len);
  if (count == 0) {
    fail(ErrorKind::TooShort,
         strformat("clip of %.3f s shorter than one %.3f s frame", clip.duration_seconds(),
                   spec.frame_seconds));
  }
  std::vector<std::span<const double>> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    frames.emplace_back(clip.samples.data() + i * static_cast<std::size_t>(hop_len),
                        static_cast<std::size_t>(frame_len));
  }
  return frames;
}

double frame_start_seconds(const FramingSpec& spec, int sample_rate, std::size_t index) {
  return static_cast<double>(index * static_cast<std::size_t>(spec.hop_samples(sample_rate))) /
         sample_rate;
}

AudioClip render_summary(const AudioClip& clip, const std::vector<TimeSpan>& spans) {
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  const long n = static_cast<long>(clip.samples.size());
  long prev_end = 0;
  std::vector<std::pair<long, long>> ranges;
  ranges.reserve(spans.size());
  for (const TimeSpan& span : spans) {
    long s = std::llround(span.start_seconds * clip.sample_rate);
    long e = std::llround(span.end_seconds * clip.sample_rate);
    if (s < 0 || e > n || s >= e) {
      fail(ErrorKind::InvalidSelection,
           strformat("span [%.6f, %.6f) out of range for %.6f s clip", span.start_seconds,
                     span.end_seconds, clip.duration_seconds()));
    }
    if (s < prev_end) {
      fail(ErrorKind::InvalidSelection,
           strformat("span starting at %.6f s overlaps the previous span", span.start_seconds));
    }
    prev_end = e;
    ranges.emplace_back(s, e);
  }
  size_t total = 0;
  for (auto [s, e] : ranges) total += static_cast<size_t>(e - s);
  out.samples.reserve(total);
  for (auto [s, e] : ranges) {
    out.samples.insert(out.samples.end(), clip.samples.begin() + s, clip.samples.begin() + e);
  }
  return out;
}

} // namespace musum
