#pragma once

#include "musum/audio.hpp"

#include <string>

namespace musum {

/// Read a RIFF WAV file (8/16/24/32-bit PCM or 32-bit float, 1-2 channels).
/// Stereo is downmixed by channel average; samples are clamped to [-1, 1].
/// The clip keeps the file's native sample rate.
AudioClip read_wav(const std::string& path);

/// Write a clip as 16-bit PCM little-endian mono.
void write_wav(const std::string& path, const AudioClip& clip);

} // namespace musum
