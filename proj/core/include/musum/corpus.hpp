#pragma once

#include "musum/audio.hpp"
#include "musum/manifest.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace musum {

enum class SectionKind { Intro, Verse, Drop, Breakdown, Outro };

const char* to_string(SectionKind kind);

struct OscillatorSpec {
  double freq_hz = 440.0;
  double amp = 1.0;
};

struct SectionRecipe {
  SectionKind kind = SectionKind::Verse;
  double min_seconds = 10.0;
  double max_seconds = 20.0;
  std::vector<OscillatorSpec> partials;
  double noise_level = 0.0;
  double noise_center_hz = 1000.0;
  double noise_q = 1.0;
  double pulse_hz = 0.0;   // amplitude pulsing rate; 0 = steady
  double pulse_depth = 0.0;
  double gain = 0.5;
  // Varied sections ignore the fixed fields above and render as a run of
  // short texture blocks drawn from the song's RNG, so their content is
  // random per song but identically distributed across genres.
  bool varied = false;
};

struct GenreProfile {
  std::string name;
  std::vector<SectionRecipe> grammar; // played in order
};

struct CorpusParams {
  int songs_per_class = 50;
  double min_song_seconds = 200.0;
  double max_song_seconds = 260.0;
  int sample_rate = 22050;
  // A fraction of songs blend their verse/drop timbre toward the next
  // genre's, creating genuinely borderline items in every condition.
  double ambiguity_fraction = 0.12;
  double ambiguity_min = 0.2;
  double ambiguity_max = 0.45;
  // Varied (texture) sections mix the song's verse partials in at this
  // relative amplitude, leaving intros/breakdowns/outros weakly informative
  // rather than pure noise.
  double texture_genre_tint = 0.25;
};

/// Five genres sharing one section grammar: a short genre-bearing hook, then
/// intro / verse / drop / breakdown / verse / drop / outro. Verses and drops
/// occupy genre-specific spectral bands with genre-specific pulsing; intros,
/// breakdowns, and outros are varied texture sections whose random blocks are
/// identically distributed across genres.
std::vector<GenreProfile> default_genre_profiles();

/// Renders one song: jittered section durations (rescaled into the song
/// length bounds), per-song oscillator and gain jitter, raised-cosine section
/// edges, per-song random blocks for varied sections. neighbor supplies the
/// blend target for ambiguous songs.
AudioClip synthesize_song(const GenreProfile& profile, const GenreProfile& neighbor,
                          const CorpusParams& params, std::uint64_t seed);

/// Writes WAVs under out_dir (one subdirectory per class) plus a manifest.
/// Per-song seeds derive from the master seed, so any worker count produces
/// the same bytes.
DatasetManifest generate_corpus(const std::vector<GenreProfile>& profiles,
                                const CorpusParams& params,
                                const std::filesystem::path& out_dir, std::uint64_t seed,
                                int workers);

} // namespace musum
