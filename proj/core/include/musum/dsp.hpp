#pragma once

#include "musum/audio.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace musum {

/// Hann-windowed power spectrum, bins 0..N/2 (magnitude squared).
std::vector<double> power_spectrum(std::span<const double> frame);

/// Triangular mel filterbank energies over a power spectrum. The filterbank
/// spans 0 Hz to Nyquist on the HTK mel scale; frame_len is the FFT length
/// the spectrum came from.
std::vector<double> mel_energies(const std::vector<double>& power, int frame_len, int sample_rate,
                                 int n_mels);

/// MFCCs: log mel energies (floored at 1e-10) followed by an orthonormal
/// DCT-II. Coefficient 0 is included.
std::vector<double> mfcc(std::span<const double> frame, int sample_rate, int n_coeffs,
                         int n_mels = 40);

std::vector<double> mfcc_from_mel(const std::vector<double>& mel, int n_coeffs);

struct DescriptorConfig {
  double rolloff_fraction = 0.85;
  double brightness_hz = 1500.0;
};

struct SpectralDescriptors {
  double centroid = 0.0;   // Hz
  double spread = 0.0;     // Hz
  double skewness = 0.0;
  double kurtosis = 0.0;
  double flux = 0.0;
  double rolloff = 0.0;    // Hz
  double brightness = 0.0; // energy fraction above the cutoff
  double entropy = 0.0;    // normalized to [0, 1]
  double flatness = 0.0;   // geometric / arithmetic mean

  static constexpr int kCount = 9;
  std::array<double, kCount> as_array() const {
    return {centroid, spread, skewness, kurtosis, flux, rolloff, brightness, entropy, flatness};
  }
  static const std::array<const char*, kCount>& names();
};

/// Moment, shape, and flux descriptors of one power spectrum. prev_power may
/// be null (first frame): flux is then 0. All-zero spectra take the
/// conventional values (centroid/spread/skew/kurt 0, flatness 1, entropy 0).
SpectralDescriptors spectral_descriptors(const std::vector<double>* prev_power,
                                         const std::vector<double>& power, int sample_rate,
                                         int frame_len, const DescriptorConfig& cfg = {});

struct FeatureOptions {
  int mfcc_count = 20;
  int n_mels = 40;
  bool include_descriptors = false;
  DescriptorConfig descriptors;
};

/// Per-frame feature vectors for one song.
struct FrameMatrix {
  Eigen::MatrixXd values; // n_frames x dim
  std::vector<std::string> feature_names;
  FramingSpec framing;
  int sample_rate = 0;
  std::vector<double> frame_times; // frame start seconds, one per row

  int frames() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
};

FrameMatrix extract_frame_features(const AudioClip& clip, const FramingSpec& spec,
                                   const FeatureOptions& options);

/// One frame per line, space-separated columns; for inspection.
void dump_frame_matrix(const FrameMatrix& matrix, const std::string& path);

inline constexpr int kSongFeatureDim = 38;
inline constexpr double kClassifyFrameSeconds = 0.05;

/// 38-dim song descriptor: mean of MFCC 0..19 over 50 ms non-overlapping
/// frames, then mean and population variance of each of the 9 spectral
/// descriptors.
std::vector<double> song_feature_vector(const AudioClip& clip);

/// Either the full 38-dim vector or the 20 MFCC means alone.
std::vector<double> classification_features(const AudioClip& clip, bool mfcc_only);

} // namespace musum
