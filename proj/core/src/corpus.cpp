#include "musum/corpus.hpp"

#include "musum/common.hpp"
#include "musum/parallel.hpp"
#include "musum/rng.hpp"
#include "musum/wav.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace musum {

namespace {

// Phase-vector oscillator: one complex rotation per sample, no trig in the
// inner loop. Magnitude drift over minutes of audio is below 1e-9.
struct Osc {
  double c = 1.0, s = 0.0, dc = 1.0, ds = 0.0;

  void init(double freq_hz, int rate, double phase) {
    const double w = 2.0 * std::numbers::pi * freq_hz / rate;
    c = std::cos(phase);
    s = std::sin(phase);
    dc = std::cos(w);
    ds = std::sin(w);
  }
  double next() {
    const double nc = c * dc - s * ds;
    s = s * dc + c * ds;
    c = nc;
    return s;
  }
  double next_cos() {
    next();
    return c;
  }
};

struct Biquad {
  double b0 = 0, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
  double z1 = 0, z2 = 0;

  static Biquad bandpass(double center_hz, double q, int rate) {
    const double w = 2.0 * std::numbers::pi * center_hz / rate;
    const double alpha = std::sin(w) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    Biquad f;
    f.b0 = alpha / a0;
    f.b1 = 0.0;
    f.b2 = -alpha / a0;
    f.a1 = -2.0 * std::cos(w) / a0;
    f.a2 = (1.0 - alpha) / a0;
    return f;
  }
  double process(double x) {
    const double y = b0 * x + z1;
    z1 = b1 * x - a1 * y + z2;
    z2 = b2 * x - a2 * y;
    return y;
  }
};

SectionRecipe blend_recipes(const SectionRecipe& own, const SectionRecipe& other, double t) {
  SectionRecipe out = own;
  const size_t n = std::min(own.partials.size(), other.partials.size());
  for (size_t i = 0; i < n; ++i) {
    // Log-domain frequency interpolation keeps the blend perceptually even.
    out.partials[i].freq_hz =
        std::exp((1.0 - t) * std::log(own.partials[i].freq_hz) + t * std::log(other.partials[i].freq_hz));
    out.partials[i].amp = (1.0 - t) * own.partials[i].amp + t * other.partials[i].amp;
  }
  out.noise_center_hz =
      std::exp((1.0 - t) * std::log(own.noise_center_hz) + t * std::log(other.noise_center_hz));
  out.noise_level = (1.0 - t) * own.noise_level + t * other.noise_level;
  out.pulse_hz = (1.0 - t) * own.pulse_hz + t * other.pulse_hz;
  out.pulse_depth = (1.0 - t) * own.pulse_depth + t * other.pulse_depth;
  return out;
}

void render_section(const SectionRecipe& recipe, int n_samples, int rate, Rng& rng,
                    std::vector<double>& out) {
  std::vector<Osc> oscs(recipe.partials.size());
  for (size_t i = 0; i < oscs.size(); ++i)
    oscs[i].init(recipe.partials[i].freq_hz, rate, rng.uniform(0.0, 2.0 * std::numbers::pi));

  Osc pulse;
  const bool pulsed = recipe.pulse_hz > 0.0 && recipe.pulse_depth > 0.0;
  if (pulsed) pulse.init(recipe.pulse_hz, rate, rng.uniform(0.0, 2.0 * std::numbers::pi));

  Biquad noise_filter = Biquad::bandpass(recipe.noise_center_hz, recipe.noise_q, rate);
  const int fade = std::min(n_samples / 2, static_cast<int>(0.3 * rate));

  for (int i = 0; i < n_samples; ++i) {
    double v = 0.0;
    for (size_t k = 0; k < oscs.size(); ++k) v += recipe.partials[k].amp * oscs[k].next();
    if (recipe.noise_level > 0.0)
      v += recipe.noise_level * noise_filter.process(rng.uniform(-1.0, 1.0));

    double env = 1.0;
    if (pulsed) env -= recipe.pulse_depth * (0.5 + 0.5 * pulse.next_cos());
    if (i < fade) env *= 0.5 - 0.5 * std::cos(std::numbers::pi * i / fade);
    else if (i >= n_samples - fade)
      env *= 0.5 - 0.5 * std::cos(std::numbers::pi * (n_samples - 1 - i) / fade);

    out.push_back(recipe.gain * env * v);
  }
}

SectionRecipe texture_section(SectionKind kind, double min_seconds, double max_seconds) {
  SectionRecipe r;
  r.kind = kind;
  r.min_seconds = min_seconds;
  r.max_seconds = max_seconds;
  r.varied = true;
  return r;
}

SectionRecipe genre_section(SectionKind kind, double base_hz, double noise_hz, double pulse_hz) {
  SectionRecipe r;
  r.kind = kind;
  if (kind == SectionKind::Verse) {
    r.min_seconds = 38;
    r.max_seconds = 42;
    r.partials = {{base_hz, 0.5}, {2 * base_hz, 0.32}, {3 * base_hz, 0.18}};
    r.noise_level = 0.18;
    r.noise_center_hz = noise_hz;
    r.noise_q = 2.0;
    r.pulse_hz = pulse_hz;
    r.pulse_depth = 0.35;
    r.gain = 0.5;
  } else { // drop
    r.min_seconds = 18;
    r.max_seconds = 22;
    r.partials = {{base_hz, 0.45}, {2 * base_hz, 0.3}, {3 * base_hz, 0.25}};
    r.noise_level = 0.45;
    r.noise_center_hz = 1.5 * noise_hz;
    r.noise_q = 1.2;
    r.pulse_hz = 2.0 * pulse_hz;
    r.pulse_depth = 0.6;
    r.gain = 0.6;
  }
  return r;
}

// One random texture block: a few inharmonic partials plus filtered noise,
// slow-pulsed, with the song's verse partials mixed in at tint amplitude.
// All draws share one distribution regardless of genre.
SectionRecipe random_texture_block(Rng& rng, const std::vector<OscillatorSpec>& tint_partials,
                                   double tint, SectionKind kind) {
  SectionRecipe r;
  r.kind = kind;
  const double amps[3] = {0.45, 0.3, 0.2};
  for (double amp : amps)
    r.partials.push_back({std::exp(rng.uniform(std::log(400.0), std::log(1900.0))), amp});
  for (const auto& p : tint_partials)
    r.partials.push_back({p.freq_hz * (1.0 + rng.uniform(-0.01, 0.01)), p.amp * tint});
  r.noise_center_hz = std::exp(rng.uniform(std::log(500.0), std::log(1600.0)));
  r.noise_level = rng.uniform(0.2, 0.35);
  r.noise_q = rng.uniform(0.8, 1.5);
  r.pulse_hz = rng.uniform(0.3, 1.0);
  r.pulse_depth = rng.uniform(0.2, 0.45);
  r.gain = rng.uniform(0.26, 0.34);
  return r;
}

} // namespace

const char* to_string(SectionKind kind) {
  switch (kind) {
    case SectionKind::Intro: return "intro";
    case SectionKind::Verse: return "verse";
    case SectionKind::Drop: return "drop";
    case SectionKind::Breakdown: return "breakdown";
    case SectionKind::Outro: return "outro";
  }
  return "?";
}

std::vector<GenreProfile> default_genre_profiles() {
  const char* names[5] = {"alpha", "bravo", "charlie", "delta", "echo"};
  const double base_hz[5] = {200, 460, 1060, 2400, 3500};
  const double noise_hz[5] = {320, 740, 1700, 3800, 5600};
  const double pulse_hz[5] = {2.0, 3.3, 1.4, 4.5, 2.7};

  std::vector<GenreProfile> profiles;
  for (int g = 0; g < 5; ++g) {
    GenreProfile p;
    p.name = names[g];
    // A five-second hook opens every song with the verse timbre; durations are
    // balanced so the breakdown straddles the song's midpoint.
    SectionRecipe hook = genre_section(SectionKind::Verse, base_hz[g], noise_hz[g], pulse_hz[g]);
    hook.min_seconds = 5;
    hook.max_seconds = 5;
    p.grammar.push_back(hook);
    p.grammar.push_back(texture_section(SectionKind::Intro, 28, 32));
    p.grammar.push_back(genre_section(SectionKind::Verse, base_hz[g], noise_hz[g], pulse_hz[g]));
    p.grammar.push_back(genre_section(SectionKind::Drop, base_hz[g], noise_hz[g], pulse_hz[g]));
    p.grammar.push_back(texture_section(SectionKind::Breakdown, 38, 42));
    p.grammar.push_back(genre_section(SectionKind::Verse, base_hz[g], noise_hz[g], pulse_hz[g]));
    p.grammar.push_back(genre_section(SectionKind::Drop, base_hz[g], noise_hz[g], pulse_hz[g]));
    p.grammar.push_back(texture_section(SectionKind::Outro, 33, 37));
    profiles.push_back(std::move(p));
  }
  return profiles;
}

AudioClip synthesize_song(const GenreProfile& profile, const GenreProfile& neighbor,
                          const CorpusParams& params, std::uint64_t seed) {
  if (profile.grammar.size() < 2)
    fail(ErrorKind::Config, "genre profile needs at least two sections");
  for (const auto& section : profile.grammar)
    if (!(section.min_seconds > 0.0) || section.max_seconds < section.min_seconds)
      fail(ErrorKind::Config, "section duration range invalid in profile " + profile.name);

  Rng rng(seed);

  const bool ambiguous = rng.uniform() < params.ambiguity_fraction;
  const double blend =
      ambiguous ? rng.uniform(params.ambiguity_min, params.ambiguity_max) : 0.0;

  std::vector<double> durations;
  double total = 0.0;
  for (const auto& section : profile.grammar) {
    durations.push_back(rng.uniform(section.min_seconds, section.max_seconds));
    total += durations.back();
  }
  const double clamped = std::clamp(total, params.min_song_seconds, params.max_song_seconds);
  for (double& d : durations) d *= clamped / total;

  // Partition one exact sample count along cumulative section boundaries;
  // rounding each section independently could drift past the duration bounds.
  long long total_samples = std::llround(clamped * params.sample_rate);
  total_samples = std::clamp(
      total_samples,
      static_cast<long long>(std::ceil(params.min_song_seconds * params.sample_rate - 1e-6)),
      static_cast<long long>(std::floor(params.max_song_seconds * params.sample_rate + 1e-6)));

  // Texture blocks carry the song's own verse timbre at tint amplitude, so the
  // tint source honors the same blend as the audible verses.
  std::vector<OscillatorSpec> tint_partials;
  for (size_t s = 0; s < profile.grammar.size(); ++s) {
    const SectionRecipe& section = profile.grammar[s];
    if (section.varied || section.kind != SectionKind::Verse) continue;
    tint_partials = (blend > 0.0 && s < neighbor.grammar.size())
                        ? blend_recipes(section, neighbor.grammar[s], blend).partials
                        : section.partials;
    break;
  }

  AudioClip clip;
  clip.sample_rate = params.sample_rate;
  double elapsed = 0.0;
  long long rendered = 0;
  for (size_t s = 0; s < profile.grammar.size(); ++s) {
    elapsed += durations[s];
    const long long boundary =
        (s + 1 == profile.grammar.size())
            ? total_samples
            : std::llround(elapsed / clamped * static_cast<double>(total_samples));
    long long remaining = boundary - rendered;
    rendered = boundary;

    if (profile.grammar[s].varied) {
      // A run of independently drawn blocks; a short tail merges into the
      // last block instead of producing a sliver.
      while (remaining > 0) {
        long long block = std::llround(rng.uniform(4.0, 7.0) * params.sample_rate);
        if (block >= remaining || remaining - block < 2ll * params.sample_rate) block = remaining;
        const SectionRecipe recipe = random_texture_block(
            rng, tint_partials, params.texture_genre_tint, profile.grammar[s].kind);
        render_section(recipe, static_cast<int>(block), params.sample_rate, rng, clip.samples);
        remaining -= block;
      }
      continue;
    }

    SectionRecipe recipe = profile.grammar[s];
    const bool distinctive =
        recipe.kind == SectionKind::Verse || recipe.kind == SectionKind::Drop;
    if (distinctive && blend > 0.0 && s < neighbor.grammar.size())
      recipe = blend_recipes(recipe, neighbor.grammar[s], blend);

    for (auto& partial : recipe.partials) partial.freq_hz *= 1.0 + rng.uniform(-0.01, 0.01);
    recipe.gain *= 1.0 + rng.uniform(-0.08, 0.08);

    render_section(recipe, static_cast<int>(remaining), params.sample_rate, rng, clip.samples);
  }

  double peak = 0.0;
  for (double v : clip.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.98)
    for (double& v : clip.samples) v *= 0.95 / peak;
  return clip;
}

DatasetManifest generate_corpus(const std::vector<GenreProfile>& profiles,
                                const CorpusParams& params,
                                const std::filesystem::path& out_dir, std::uint64_t seed,
                                int workers) {
  if (profiles.size() < 2) fail(ErrorKind::Config, "corpus needs at least two genre profiles");
  if (params.songs_per_class < 1) fail(ErrorKind::Config, "songs_per_class must be positive");
  if (!(params.min_song_seconds > 0.0) || params.max_song_seconds < params.min_song_seconds)
    fail(ErrorKind::Config, "song length bounds invalid");

  std::filesystem::create_directories(out_dir);
  for (const auto& profile : profiles) std::filesystem::create_directories(out_dir / profile.name);

  const int classes = static_cast<int>(profiles.size());
  const int total = classes * params.songs_per_class;

  DatasetManifest manifest;
  manifest.base_dir = out_dir;
  for (const auto& profile : profiles) manifest.classes.push_back(profile.name);
  manifest.rows.resize(static_cast<size_t>(total));

  parallel_for(total, workers, [&](int idx) {
    const int c = idx / params.songs_per_class;
    const int i = idx % params.songs_per_class;
    const std::uint64_t song_seed =
        derive_seed(seed, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(i));
    const GenreProfile& neighbor = profiles[static_cast<size_t>((c + 1) % classes)];
    const AudioClip clip =
        synthesize_song(profiles[static_cast<size_t>(c)], neighbor, params, song_seed);

    ManifestRow row;
    row.path = profiles[static_cast<size_t>(c)].name + "/" +
               strformat("%s_%03d.wav", profiles[static_cast<size_t>(c)].name.c_str(), i);
    row.label = profiles[static_cast<size_t>(c)].name;
    row.duration_seconds = clip.duration_seconds();
    row.seed = song_seed;
    write_wav((out_dir / row.path).string(), clip);
    manifest.rows[static_cast<size_t>(idx)] = std::move(row);
  });

  save_manifest(manifest, out_dir / "manifest.tsv");
  return manifest;
}

} // namespace musum
