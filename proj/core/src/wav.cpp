// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "importantaug/errors.hpp"

namespace importantaug {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}
uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& why) {
  throw DataError("wav '" + path.string() + "': " + why);
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    fail(path, "not a RIFF/WAVE file");

  WavData wav;
  uint16_t format = 0;
  uint16_t bits = 0;
  bool have_fmt = false;
  bool have_data = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* tag = reinterpret_cast<const char*>(bytes.data() + pos);
    const uint32_t size = read_u32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + size > bytes.size()) fail(path, "truncated chunk");

    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (size < 16) fail(path, "fmt chunk too small");
      format = read_u16(bytes.data() + body);
      wav.num_channels = read_u16(bytes.data() + body + 2);
      wav.sample_rate_hz = static_cast<int>(read_u32(bytes.data() + body + 4));
      bits = read_u16(bytes.data() + body + 14);
      if (format == kFormatExtensible) {
        // Actual format lives in the extension's SubFormat GUID prefix.
        if (size >= 40) format = read_u16(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) fail(path, "data chunk precedes fmt chunk");
      if (format == kFormatPcm && bits == 16) {
        const size_t n = size / 2;
        wav.samples.resize(n);
        for (size_t i = 0; i < n; ++i) {
          const int16_t v = static_cast<int16_t>(read_u16(bytes.data() + body + 2 * i));
          wav.samples[i] = static_cast<float>(v) / 32768.0f;
        }
      } else if (format == kFormatFloat && bits == 32) {
        const size_t n = size / 4;
        wav.samples.resize(n);
        for (size_t i = 0; i < n; ++i) {
          const uint32_t raw = read_u32(bytes.data() + body + 4 * i);
          float f;
          std::memcpy(&f, &raw, sizeof(f));
          wav.samples[i] = f;
        }
      } else {
        fail(path, "unsupported sample format (need 16-bit PCM or 32-bit float, got format " +
                       std::to_string(format) + ", " + std::to_string(bits) + " bits)");
      }
      have_data = true;
    }
    pos = body + size + (size % 2);  // chunks are word-aligned
  }

  if (!have_fmt || !have_data) fail(path, "missing fmt or data chunk");
  if (wav.num_channels < 1) fail(path, "no channels");
  return wav;
}

void write_wav_pcm16(const std::filesystem::path& path, int sample_rate_hz,
                     std::span<const float> samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("wav '" + path.string() + "': cannot open for writing");

  auto put_u32 = [&out](uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  auto put_u16 = [&out](uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
  };

  const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
  out.write("RIFF", 4);
  put_u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(kFormatPcm);
  put_u16(1);  // mono
  put_u32(static_cast<uint32_t>(sample_rate_hz));
  put_u32(static_cast<uint32_t>(sample_rate_hz) * 2);
  put_u16(2);   // block align
  put_u16(16);  // bits
  out.write("data", 4);
  put_u32(data_bytes);
  for (float s : samples) {
    const double clamped = std::clamp(static_cast<double>(s), -1.0, 1.0);
    const auto v = static_cast<int16_t>(std::llround(clamped * 32767.0));
    put_u16(static_cast<uint16_t>(v));
  }
  if (!out) throw DataError("wav '" + path.string() + "': write failed");
}

}  // namespace importantaug
