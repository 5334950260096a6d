// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace importantaug {

namespace {

using cd = std::complex<double>;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, decimation in time. The window length is
// pinned to a power of two by StftConfig::validate, so this covers every
// configuration the toolkit accepts.
void fft_in_place(std::vector<cd>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const cd wlen(std::cos(angle), std::sin(angle));
    for (size_t i = 0; i < n; i += len) {
      cd w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        cd u = a[i + k];
        cd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Reflect padding without edge repetition: [.. x2 x1 | x0 x1 x2 .. ].
double padded_sample(std::span<const float> x, long idx) {
  const long n = static_cast<long>(x.size());
  if (idx < 0) idx = -idx;
  if (idx >= n) idx = 2 * (n - 1) - idx;
  return static_cast<double>(x[static_cast<size_t>(idx)]);
}

double total_power(std::span<const ComplexSpectrogram> batch) {
  double acc = 0.0;
  for (const auto& spec : batch) acc += spec.values.abs2().sum();
  return acc;
}

}  // namespace

int StftConfig::num_frames(int num_samples) const {
  const int padded = centered ? num_samples + window_length : num_samples;
  if (padded < window_length) return 0;
  return (padded - window_length) / hop_length + 1;
}

void StftConfig::validate() const {
  if (sample_rate_hz <= 0) throw ConfigError("stft: sample_rate_hz must be positive");
  if (hop_length <= 0) throw ConfigError("stft: hop_length must be positive");
  if (window_length <= hop_length)
    throw ConfigError("stft: window_length must exceed hop_length");
  if (!is_power_of_two(window_length))
    throw ConfigError("stft: window_length must be a power of two");
}

Eigen::ArrayXd hann_window(int length) {
  Eigen::ArrayXd w(length);
  for (int n = 0; n < length; ++n)
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  return w;
}

ComplexSpectrogram stft(std::span<const float> waveform, const StftConfig& config) {
  config.validate();
  if (static_cast<int>(waveform.size()) != config.sample_rate_hz) {
    throw InvalidInputError("stft: expected exactly 1 s of audio (" +
                            std::to_string(config.sample_rate_hz) + " samples), got " +
                            std::to_string(waveform.size()));
  }

  const int win = config.window_length;
  const int hop = config.hop_length;
  const int bins = config.num_bins();
  const int frames = config.num_frames(static_cast<int>(waveform.size()));
  const int pad = config.centered ? win / 2 : 0;
  const Eigen::ArrayXd window = hann_window(win);

  ComplexSpectrogram out;
  out.config = config;
  out.values.resize(bins, frames);

  std::vector<cd> frame(static_cast<size_t>(win));
  for (int t = 0; t < frames; ++t) {
    const long start = static_cast<long>(t) * hop - pad;
    for (int n = 0; n < win; ++n)
      frame[static_cast<size_t>(n)] = cd(window[n] * padded_sample(waveform, start + n), 0.0);
    fft_in_place(frame);
    for (int f = 0; f < bins; ++f) out.values(f, t) = frame[static_cast<size_t>(f)];
  }
  return out;
}

LogMagSpectrogram log_magnitude(const ComplexSpectrogram& spec, double amplitude_floor) {
  if (!(amplitude_floor > 0.0))
    throw ConfigError("log_magnitude: amplitude_floor must be positive");
  LogMagSpectrogram out;
  out.values = 20.0 * spec.values.abs().max(amplitude_floor).log10();
  return out;
}

double compute_gain(std::span<const ComplexSpectrogram> speech,
                    std::span<const ComplexSpectrogram> noise, SnrDb target) {
  if (speech.size() != noise.size())
    throw InvalidInputError("compute_gain: speech and noise batch sizes differ");
  for (size_t i = 0; i < speech.size(); ++i) {
    if (speech[i].values.rows() != noise[i].values.rows() ||
        speech[i].values.cols() != noise[i].values.cols())
      throw InvalidInputError("compute_gain: spectrogram shape mismatch in batch");
  }
  if (target.is_infinite()) return 0.0;  // no-noise convention

  const double speech_power = total_power(speech);
  const double noise_power = total_power(noise);
  if (noise_power <= 0.0)
    throw NumericError("compute_gain: noise batch has zero power");
  return std::sqrt(speech_power / (std::pow(10.0, target.db / 10.0) * noise_power));
}

ComplexSpectrogram mix(const ComplexSpectrogram& speech, const ComplexSpectrogram& noise,
                       const Mask& mask, double gain) {
  if (speech.values.rows() != noise.values.rows() ||
      speech.values.cols() != noise.values.cols() ||
      speech.values.rows() != mask.values.rows() ||
      speech.values.cols() != mask.values.cols())
    throw InvalidInputError("mix: shapes of speech, noise and mask must agree");
  ComplexSpectrogram out;
  out.config = speech.config;
  out.values =
      speech.values + gain * (noise.values * mask.values.cast<std::complex<double>>());
  return out;
}

Mask roll_mask(const Mask& mask, long delta_f, long delta_t) {
  const long rows = mask.values.rows();
  const long cols = mask.values.cols();
  if (rows == 0 || cols == 0) return mask;
  auto wrap = [](long x, long n) { return ((x % n) + n) % n; };
  Mask out;
  out.values.resize(rows, cols);
  for (long f = 0; f < rows; ++f) {
    const long src_f = wrap(f - delta_f, rows);
    for (long t = 0; t < cols; ++t) out.values(f, t) = mask.values(src_f, wrap(t - delta_t, cols));
  }
  return out;
}

Mask binarize_mask(const Mask& mask, double q_percent) {
  if (!(q_percent >= 0.0 && q_percent <= 100.0))
    throw ConfigError("binarize_mask: q must lie in [0, 100]");
  const long rows = mask.values.rows();
  const long cols = mask.values.cols();
  const long total = rows * cols;
  const long k = std::llround(q_percent / 100.0 * static_cast<double>(total));

  // Row-major linear index == lexicographic (f, t); stable sort on the value
  // keeps that order among ties.
  std::vector<long> order(static_cast<size_t>(total));
  std::iota(order.begin(), order.end(), 0L);
  auto value_at = [&](long idx) { return mask.values(idx / cols, idx % cols); };
  std::stable_sort(order.begin(), order.end(),
                   [&](long a, long b) { return value_at(a) < value_at(b); });

  Mask out;
  out.values = Eigen::ArrayXXd::Ones(rows, cols);
  for (long i = 0; i < k; ++i) out.values(order[static_cast<size_t>(i)] / cols,
                                          order[static_cast<size_t>(i)] % cols) = 0.0;
  return out;
}

SnrDb measure_snr(std::span<const ComplexSpectrogram> speech,
                  std::span<const ComplexSpectrogram> noise_component) {
  const double speech_power = total_power(speech);
  const double noise_power = total_power(noise_component);
  if (noise_power <= 0.0) return SnrDb::infinite();
  return SnrDb(10.0 * std::log10(speech_power / noise_power));
}

}  // namespace importantaug
