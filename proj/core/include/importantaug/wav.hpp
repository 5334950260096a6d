// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace importantaug {

// Decoded RIFF/WAVE audio. Samples are interleaved when multi-channel and
// normalized to [-1, 1): 16-bit PCM is scaled by 1/32768, 32-bit float is
// passed through.
struct WavData {
  int sample_rate_hz = 0;
  int num_channels = 0;
  std::vector<float> samples;

  size_t frames() const {
    return num_channels > 0 ? samples.size() / static_cast<size_t>(num_channels) : 0;
  }
};

// Supports 16-bit PCM and 32-bit IEEE float WAVs; anything else is rejected
// with a DataError naming the file and the unsupported property.
WavData read_wav(const std::filesystem::path& path);

// Writes mono 16-bit PCM (values clamped to [-1, 1]).
void write_wav_pcm16(const std::filesystem::path& path, int sample_rate_hz,
                     std::span<const float> samples);

}  // namespace importantaug
