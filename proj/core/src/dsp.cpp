#include "musum/dsp.hpp"

#include "musum/common.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>

namespace musum {

namespace {

constexpr double kLogFloor = 1e-10;

// FFTW plan creation is not thread-safe; executing a cached plan on fresh
// buffers via the new-array interface is.
std::mutex g_plan_mutex;

fftw_plan plan_for(int n) {
  static std::map<int, fftw_plan>* plans = new std::map<int, fftw_plan>();
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = plans->find(n);
  if (it != plans->end()) return it->second;
  double* in = fftw_alloc_real(static_cast<size_t>(n));
  fftw_complex* out = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  if (plan == nullptr) fail(ErrorKind::Config, strformat("fftw plan failed for n=%d", n));
  plans->emplace(n, plan);
  return plan;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

} // namespace

std::vector<double> power_spectrum(std::span<const double> frame) {
  const int n = static_cast<int>(frame.size());
  if (n < 1) fail(ErrorKind::Config, "power_spectrum: empty frame");
  fftw_plan plan = plan_for(n);

  double* in = fftw_alloc_real(static_cast<size_t>(n));
  fftw_complex* out = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
  const double step = 2.0 * std::numbers::pi / n; // periodic Hann
  for (int i = 0; i < n; ++i) in[i] = frame[i] * (0.5 - 0.5 * std::cos(step * i));
  fftw_execute_dft_r2c(plan, in, out);

  std::vector<double> power(static_cast<size_t>(n / 2 + 1));
  for (size_t k = 0; k < power.size(); ++k)
    power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
  fftw_free(in);
  fftw_free(out);
  return power;
}

std::vector<double> mel_energies(const std::vector<double>& power, int frame_len, int sample_rate,
                                 int n_mels) {
  if (n_mels < 1) fail(ErrorKind::Config, "mel_energies: n_mels must be positive");
  if (power.size() != static_cast<size_t>(frame_len / 2 + 1))
    fail(ErrorKind::Config, "mel_energies: spectrum size does not match frame length");

  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(static_cast<size_t>(n_mels) + 2);
  for (size_t m = 0; m < edges.size(); ++m)
    edges[m] = mel_max * static_cast<double>(m) / static_cast<double>(n_mels + 1);

  std::vector<double> energy(static_cast<size_t>(n_mels), 0.0);
  for (size_t k = 0; k < power.size(); ++k) {
    const double mel = hz_to_mel(static_cast<double>(k) * sample_rate / frame_len);
    for (int m = 0; m < n_mels; ++m) {
      const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
      double w = 0.0;
      if (mel >= lo && mel <= mid && mid > lo) w = (mel - lo) / (mid - lo);
      else if (mel > mid && mel <= hi && hi > mid) w = (hi - mel) / (hi - mid);
      energy[m] += w * power[k];
    }
  }
  return energy;
}

std::vector<double> mfcc_from_mel(const std::vector<double>& mel, int n_coeffs) {
  const int m_count = static_cast<int>(mel.size());
  if (n_coeffs < 1 || n_coeffs > m_count)
    fail(ErrorKind::Config, "mfcc: coefficient count out of range");
  std::vector<double> logged(mel.size());
  for (size_t m = 0; m < mel.size(); ++m) logged[m] = std::log(std::max(mel[m], kLogFloor));

  std::vector<double> coeffs(static_cast<size_t>(n_coeffs), 0.0);
  const double pi_over = std::numbers::pi / m_count;
  for (int i = 0; i < n_coeffs; ++i) {
    double acc = 0.0;
    for (int m = 0; m < m_count; ++m) acc += logged[m] * std::cos(pi_over * i * (m + 0.5));
    const double scale = i == 0 ? std::sqrt(1.0 / m_count) : std::sqrt(2.0 / m_count);
    coeffs[i] = scale * acc;
  }
  return coeffs;
}

std::vector<double> mfcc(std::span<const double> frame, int sample_rate, int n_coeffs,
                         int n_mels) {
  if (frame.size() < 2) fail(ErrorKind::Config, "mfcc: frame must hold at least two samples");
  const auto power = power_spectrum(frame);
  return mfcc_from_mel(mel_energies(power, static_cast<int>(frame.size()), sample_rate, n_mels),
                       n_coeffs);
}

const std::array<const char*, SpectralDescriptors::kCount>& SpectralDescriptors::names() {
  static const std::array<const char*, kCount> kNames = {
      "centroid", "spread", "skewness", "kurtosis",  "flux",
      "rolloff",  "brightness", "entropy", "flatness"};
  return kNames;
}

SpectralDescriptors spectral_descriptors(const std::vector<double>* prev_power,
                                         const std::vector<double>& power, int sample_rate,
                                         int frame_len, const DescriptorConfig& cfg) {
  const int bins = static_cast<int>(power.size());
  if (bins < 1) fail(ErrorKind::Config, "spectral_descriptors: empty spectrum");
  if (prev_power != nullptr && prev_power->size() != power.size())
    fail(ErrorKind::Config, "spectral_descriptors: spectrum size changed between frames");

  SpectralDescriptors d;

  // Flux compares L1-normalized magnitude spectra; an all-zero spectrum
  // normalizes to the zero vector.
  if (prev_power != nullptr) {
    double l1_prev = 0.0, l1_cur = 0.0;
    for (int k = 0; k < bins; ++k) {
      l1_prev += std::sqrt((*prev_power)[k]);
      l1_cur += std::sqrt(power[k]);
    }
    double acc = 0.0;
    for (int k = 0; k < bins; ++k) {
      const double a = l1_prev > 0.0 ? std::sqrt((*prev_power)[k]) / l1_prev : 0.0;
      const double b = l1_cur > 0.0 ? std::sqrt(power[k]) / l1_cur : 0.0;
      acc += (a - b) * (a - b);
    }
    d.flux = std::sqrt(acc);
  }

  double total = 0.0;
  for (double s : power) total += s;
  if (total <= 0.0) {
    d.flatness = 1.0;
    return d;
  }

  const double bin_hz = static_cast<double>(sample_rate) / frame_len;
  double centroid = 0.0;
  for (int k = 0; k < bins; ++k) centroid += (power[k] / total) * (k * bin_hz);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (int k = 0; k < bins; ++k) {
    const double dev = k * bin_hz - centroid;
    const double p = power[k] / total;
    m2 += p * dev * dev;
    m3 += p * dev * dev * dev;
    m4 += p * dev * dev * dev * dev;
  }
  d.centroid = centroid;
  d.spread = std::sqrt(m2);
  if (d.spread > 0.0) {
    d.skewness = m3 / (d.spread * d.spread * d.spread);
    d.kurtosis = m4 / (m2 * m2);
  }

  double cum = 0.0;
  for (int k = 0; k < bins; ++k) {
    cum += power[k];
    if (cum >= cfg.rolloff_fraction * total) {
      d.rolloff = k * bin_hz;
      break;
    }
  }

  double high = 0.0;
  for (int k = 0; k < bins; ++k)
    if (k * bin_hz >= cfg.brightness_hz) high += power[k];
  d.brightness = high / total;

  if (bins > 1) {
    double h = 0.0;
    for (int k = 0; k < bins; ++k) {
      const double p = power[k] / total;
      if (p > 0.0) h -= p * std::log(p);
    }
    d.entropy = h / std::log(static_cast<double>(bins));
  }

  bool any_zero = false;
  double log_acc = 0.0;
  for (int k = 0; k < bins; ++k) {
    if (power[k] <= 0.0) {
      any_zero = true;
      break;
    }
    log_acc += std::log(power[k]);
  }
  d.flatness = any_zero ? 0.0 : std::exp(log_acc / bins) / (total / bins);

  return d;
}

FrameMatrix extract_frame_features(const AudioClip& clip, const FramingSpec& spec,
                                   const FeatureOptions& options) {
  if (options.mfcc_count < 0 || options.n_mels < 1)
    fail(ErrorKind::Config, "extract_frame_features: bad feature options");
  const auto frames = frame_signal(clip, spec);
  const int frame_len = spec.frame_samples(clip.sample_rate);

  FrameMatrix out;
  out.framing = spec;
  out.sample_rate = clip.sample_rate;
  for (int i = 0; i < options.mfcc_count; ++i)
    out.feature_names.push_back(strformat("mfcc%d", i));
  if (options.include_descriptors)
    for (const char* name : SpectralDescriptors::names()) out.feature_names.push_back(name);

  const int dim = static_cast<int>(out.feature_names.size());
  out.values.resize(static_cast<Eigen::Index>(frames.size()), dim);
  out.frame_times.reserve(frames.size());

  std::vector<double> prev_power;
  for (size_t i = 0; i < frames.size(); ++i) {
    out.frame_times.push_back(frame_start_seconds(spec, clip.sample_rate, static_cast<int>(i)));
    const auto power = power_spectrum(frames[i]);
    int col = 0;
    if (options.mfcc_count > 0) {
      const auto coeffs = mfcc_from_mel(
          mel_energies(power, frame_len, clip.sample_rate, options.n_mels), options.mfcc_count);
      for (double c : coeffs) out.values(static_cast<Eigen::Index>(i), col++) = c;
    }
    if (options.include_descriptors) {
      const auto d = spectral_descriptors(i == 0 ? nullptr : &prev_power, power, clip.sample_rate,
                                          frame_len, options.descriptors);
      for (double v : d.as_array()) out.values(static_cast<Eigen::Index>(i), col++) = v;
    }
    prev_power = power;
  }
  return out;
}

void dump_frame_matrix(const FrameMatrix& matrix, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  std::fprintf(f, "# time");
  for (const auto& name : matrix.feature_names) std::fprintf(f, " %s", name.c_str());
  std::fprintf(f, "\n");
  for (int r = 0; r < matrix.frames(); ++r) {
    std::fprintf(f, "%.6f", matrix.frame_times[static_cast<size_t>(r)]);
    for (int c = 0; c < matrix.dim(); ++c) std::fprintf(f, " %.6f", matrix.values(r, c));
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

std::vector<double> classification_features(const AudioClip& clip, bool mfcc_only) {
  FeatureOptions options;
  options.mfcc_count = 20;
  options.include_descriptors = !mfcc_only;
  FramingSpec spec;
  spec.frame_seconds = kClassifyFrameSeconds;
  spec.hop_seconds = kClassifyFrameSeconds;
  const FrameMatrix m = extract_frame_features(clip, spec, options);
  const int n = m.frames();
  if (n < 1) fail(ErrorKind::TooShort, "no frames for classification features");

  std::vector<double> out;
  const Eigen::VectorXd mean = m.values.colwise().mean();
  for (int c = 0; c < options.mfcc_count; ++c) out.push_back(mean(c));
  if (!mfcc_only) {
    for (int c = options.mfcc_count; c < m.dim(); ++c) {
      const double mu = mean(c);
      const double var = (m.values.col(c).array() - mu).square().sum() / n;
      out.push_back(mu);
      out.push_back(var);
    }
  }
  return out;
}

std::vector<double> song_feature_vector(const AudioClip& clip) {
  auto v = classification_features(clip, false);
  if (static_cast<int>(v.size()) != kSongFeatureDim)
    fail(ErrorKind::Config, "song feature dimension mismatch");
  return v;
}

} // namespace musum
