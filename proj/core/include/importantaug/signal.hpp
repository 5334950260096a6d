// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <Eigen/Core>
#include <complex>
#include <limits>
#include <span>

#include "importantaug/errors.hpp"

namespace importantaug {

// Target signal-to-noise ratio in decibels. +inf means "no noise".
struct SnrDb {
  double db = 0.0;

  SnrDb() = default;
  explicit SnrDb(double value) : db(value) {}

  static SnrDb infinite() { return SnrDb(std::numeric_limits<double>::infinity()); }
  bool is_infinite() const { return std::isinf(db); }

  friend bool operator==(const SnrDb&, const SnrDb&) = default;
};

// Analysis settings for the short-time Fourier transform. The defaults
// (16 kHz, window 512, hop 128, centered) map a 1 s utterance to a
// 257-bin x 126-frame spectrogram.
struct StftConfig {
  int sample_rate_hz = 16000;
  int window_length = 512;
  int hop_length = 128;
  bool centered = true;

  int num_bins() const { return window_length / 2 + 1; }
  int num_frames(int num_samples) const;

  // Throws ConfigError unless window_length > hop_length > 0 and the
  // window length is even (required for centered half-window padding).
  void validate() const;

  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

// F x T complex STFT of a 1 s clip; the domain where mixing happens.
struct ComplexSpectrogram {
  Eigen::ArrayXXcd values;  // rows = frequency bins, cols = time frames
  StftConfig config;

  Eigen::Index bins() const { return values.rows(); }
  Eigen::Index frames() const { return values.cols(); }
};

// dB magnitudes, 20*log10(max(|S|, floor)); same shape as the source.
struct LogMagSpectrogram {
  Eigen::ArrayXXd values;
};

// Importance map in [0,1]^{F x T}. Low values mark regions that must stay
// clean; high values admit noise.
struct Mask {
  Eigen::ArrayXXd values;
};

// Periodic Hann analysis window of the given length.
Eigen::ArrayXd hann_window(int length);

// Short-time Fourier transform of a 1 s waveform. With centered framing the
// input is reflect-padded by half a window on each side, so 16000 samples
// yield exactly 257 bins x 126 frames. Linear in the input.
// Throws InvalidInputError when the waveform is not exactly one second at
// the configured rate.
ComplexSpectrogram stft(std::span<const float> waveform, const StftConfig& config);

// 20*log10(max(|S|, amplitude_floor)). Throws ConfigError for a
// non-positive floor.
LogMagSpectrogram log_magnitude(const ComplexSpectrogram& spec, double amplitude_floor);

// Gain A that scales the (unmasked) noise batch so the batch-level SNR of
// speech over A*noise equals the target:
//   A = sqrt( sum|S|^2 / (10^(v/10) * sum|N|^2) )
// summed over every clip, frame and bin in the batch. v = +inf returns 0
// (no noise). Throws NumericError when the noise batch has zero power and
// the target is finite.
double compute_gain(std::span<const ComplexSpectrogram> speech,
                    std::span<const ComplexSpectrogram> noise, SnrDb target);

// S + gain * (N pointwise-multiplied by M), exact complex arithmetic.
ComplexSpectrogram mix(const ComplexSpectrogram& speech, const ComplexSpectrogram& noise,
                       const Mask& mask, double gain);

// Circular shift: out(f,t) = M((f - delta_f) mod F, (t - delta_t) mod T).
// Any integer shifts are accepted; the value multiset is preserved.
Mask roll_mask(const Mask& mask, long delta_f, long delta_t);

// Sets the round(q/100 * F*T) lowest-valued cells to 0 (important, keep
// clean) and all others to 1. Ties break by ascending (f, t) index so the
// result is deterministic for constant regions. Throws ConfigError when q
// is outside [0, 100].
Mask binarize_mask(const Mask& mask, double q_percent);

// 10*log10(sum|S|^2 / sum|noise|^2) over whole batches; +inf when the noise
// component carries no power.
SnrDb measure_snr(std::span<const ComplexSpectrogram> speech,
                  std::span<const ComplexSpectrogram> noise_component);

}  // namespace importantaug
