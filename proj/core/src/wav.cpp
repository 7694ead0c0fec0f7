#include "musum/wav.hpp"

#include "musum/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace musum {

namespace {

constexpr uint16_t kFormatPcm = 0x0001;
constexpr uint16_t kFormatFloat = 0x0003;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

double clamp_unit(double v) { return std::min(1.0, std::max(-1.0, v)); }

struct FmtChunk {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits_per_sample = 0;
};

} // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open WAV file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.empty()) fail(ErrorKind::EmptyInput, "empty input: " + path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail(ErrorKind::Decode, "not a RIFF/WAVE file: " + path);
  }

  FmtChunk fmt;
  bool have_fmt = false;
  const uint8_t* data = nullptr;
  size_t data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    uint32_t size = read_u32(bytes.data() + pos + 4);
    size_t body = pos + 8;
    if (body + size > bytes.size()) size = static_cast<uint32_t>(bytes.size() - body);

    if (std::memcmp(id, "fmt ", 4) == 0 && size >= 16) {
      const uint8_t* p = bytes.data() + body;
      fmt.format = read_u16(p);
      fmt.channels = read_u16(p + 2);
      fmt.sample_rate = read_u32(p + 4);
      fmt.bits_per_sample = read_u16(p + 14);
      if (fmt.format == kFormatExtensible && size >= 40) {
        // subformat GUID starts with the squashed format tag
        fmt.format = read_u16(p + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1); // chunks are word-aligned
  }

  if (!have_fmt) fail(ErrorKind::Decode, "missing fmt chunk: " + path);
  if (!data) fail(ErrorKind::Decode, "missing data chunk: " + path);
  if (fmt.channels < 1 || fmt.channels > 2) {
    fail(ErrorKind::Decode,
         strformat("unsupported channel count %u (want 1-2): %s", fmt.channels, path.c_str()));
  }
  if (fmt.sample_rate == 0) fail(ErrorKind::Decode, "zero sample rate: " + path);

  const bool is_float = fmt.format == kFormatFloat;
  if (fmt.format != kFormatPcm && !is_float) {
    fail(ErrorKind::Decode,
         strformat("unsupported codec (format tag 0x%04x): %s", fmt.format, path.c_str()));
  }
  if (is_float && fmt.bits_per_sample != 32) {
    fail(ErrorKind::Decode,
         strformat("unsupported float width %u bits: %s", fmt.bits_per_sample, path.c_str()));
  }
  if (!is_float && fmt.bits_per_sample != 8 && fmt.bits_per_sample != 16 &&
      fmt.bits_per_sample != 24 && fmt.bits_per_sample != 32) {
    fail(ErrorKind::Decode,
         strformat("unsupported PCM width %u bits: %s", fmt.bits_per_sample, path.c_str()));
  }

  const size_t bytes_per_sample = fmt.bits_per_sample / 8;
  const size_t stride = bytes_per_sample * fmt.channels;
  const size_t n_frames = stride > 0 ? data_size / stride : 0;
  if (n_frames == 0) fail(ErrorKind::EmptyInput, "empty input: no samples in " + path);

  auto decode_one = [&](const uint8_t* p) -> double {
    switch (fmt.bits_per_sample) {
      case 8:
        return (static_cast<int>(*p) - 128) / 128.0;
      case 16: {
        int16_t v = static_cast<int16_t>(p[0] | (p[1] << 8));
        return v / 32768.0;
      }
      case 24: {
        int32_t v = static_cast<int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
        if (v & 0x800000) v |= ~0xFFFFFF; // sign-extend
        return v / 8388608.0;
      }
      case 32: {
        if (is_float) {
          float f;
          std::memcpy(&f, p, 4);
          return static_cast<double>(f);
        }
        int32_t v;
        std::memcpy(&v, p, 4);
        return v / 2147483648.0;
      }
    }
    return 0.0;
  };

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt.sample_rate);
  clip.source_path = path;
  clip.samples.resize(n_frames);
  for (size_t i = 0; i < n_frames; ++i) {
    const uint8_t* p = data + i * stride;
    double v = decode_one(p);
    if (fmt.channels == 2) v = 0.5 * (v + decode_one(p + bytes_per_sample));
    clip.samples[i] = clamp_unit(v);
  }
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  if (clip.sample_rate <= 0) fail(ErrorKind::Config, "write_wav: invalid sample rate");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open for writing: " + path);

  const uint32_t n = static_cast<uint32_t>(clip.samples.size());
  const uint32_t data_size = n * 2;
  const uint32_t rate = static_cast<uint32_t>(clip.sample_rate);

  uint8_t header[44];
  auto put_u32 = [&](size_t at, uint32_t v) {
    header[at] = v & 0xFF;
    header[at + 1] = (v >> 8) & 0xFF;
    header[at + 2] = (v >> 16) & 0xFF;
    header[at + 3] = (v >> 24) & 0xFF;
  };
  auto put_u16 = [&](size_t at, uint16_t v) {
    header[at] = v & 0xFF;
    header[at + 1] = (v >> 8) & 0xFF;
  };
  std::memcpy(header, "RIFF", 4);
  put_u32(4, 36 + data_size);
  std::memcpy(header + 8, "WAVE", 4);
  std::memcpy(header + 12, "fmt ", 4);
  put_u32(16, 16);
  put_u16(20, kFormatPcm);
  put_u16(22, 1);
  put_u32(24, rate);
  put_u32(28, rate * 2);
  put_u16(32, 2);
  put_u16(34, 16);
  std::memcpy(header + 36, "data", 4);
  put_u32(40, data_size);
  out.write(reinterpret_cast<const char*>(header), sizeof(header));

  std::vector<uint8_t> buf(data_size);
  for (uint32_t i = 0; i < n; ++i) {
    double v = clamp_unit(clip.samples[i]);
    // Same 1/32768 step the reader uses, so a round trip only quantizes.
    int32_t q = std::clamp<int32_t>(static_cast<int32_t>(std::lround(v * 32768.0)), -32768, 32767);
    buf[2 * i] = static_cast<uint8_t>(q & 0xFF);
    buf[2 * i + 1] = static_cast<uint8_t>((q >> 8) & 0xFF);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), buf.size());
  if (!out) fail(ErrorKind::Io, "short write: " + path);
}

} // namespace musum
