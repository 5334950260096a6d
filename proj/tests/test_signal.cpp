// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "helpers.hpp"
#include "importantaug/signal.hpp"

using namespace importantaug;
using testutil::random_spec;
using testutil::spec_from;

namespace {

std::vector<float> sine_wave(double freq_hz, int n, int rate, double phase = 0.0) {
  std::vector<float> x(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    x[static_cast<size_t>(i)] = static_cast<float>(
        std::sin(2.0 * std::numbers::pi * freq_hz * i / rate + phase));
  return x;
}

double added_noise_power(const ComplexSpectrogram& noise, const Mask& mask, double gain) {
  return (gain * gain) * (noise.values.abs2() * mask.values.square()).sum();
}

}  // namespace

TEST_CASE("stft yields the documented 257x126 grid for one second of audio") {
  StftConfig cfg;
  std::vector<float> x(16000, 0.25f);
  const ComplexSpectrogram spec = stft(x, cfg);
  CHECK(spec.bins() == 257);
  CHECK(spec.frames() == 126);
  CHECK(cfg.num_bins() == 257);
  CHECK(cfg.num_frames(16000) == 126);
}

TEST_CASE("stft rejects inputs that are not exactly one second") {
  StftConfig cfg;
  std::vector<float> short_x(15999, 0.0f);
  std::vector<float> long_x(16001, 0.0f);
  CHECK_THROWS_AS((void)stft(short_x, cfg), InvalidInputError);
  CHECK_THROWS_AS((void)stft(long_x, cfg), InvalidInputError);
}

TEST_CASE("stft of silence is identically zero") {
  std::vector<float> x(16000, 0.0f);
  const ComplexSpectrogram spec = stft(x, StftConfig{});
  CHECK(spec.values.abs().maxCoeff() == 0.0);
}

TEST_CASE("stft of a 1 kHz sine peaks at bin 32 and matches a direct DFT") {
  StftConfig cfg;
  const std::vector<float> x = sine_wave(1000.0, 16000, 16000);
  const ComplexSpectrogram spec = stft(x, cfg);

  // Interior frames: away from the reflect-padded edges.
  for (int t = 10; t < 116; t += 7) {
    int argmax = 0;
    for (int f = 1; f < spec.bins(); ++f)
      if (std::abs(spec.values(f, t)) > std::abs(spec.values(argmax, t))) argmax = f;
    CHECK(argmax == 32);
  }

  // Oracle: naive windowed DFT of the frame at t=60 (entirely inside the
  // signal, so padding plays no role: start = 60*128 - 256).
  const int t = 60;
  const int start = t * cfg.hop_length - cfg.window_length / 2;
  const Eigen::ArrayXd window = hann_window(cfg.window_length);
  for (int f = 0; f < spec.bins(); f += 16) {
    std::complex<double> acc(0.0, 0.0);
    for (int n = 0; n < cfg.window_length; ++n) {
      const double sample = window[n] * static_cast<double>(x[static_cast<size_t>(start + n)]);
      const double angle = -2.0 * std::numbers::pi * f * n / cfg.window_length;
      acc += sample * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    CHECK(std::abs(spec.values(f, t) - acc) < 1e-9 * std::max(1.0, std::abs(acc)));
  }
}

TEST_CASE("stft is linear in the waveform") {
  Rng rng(11);
  std::vector<float> x(16000), y(16000);
  for (auto& v : x) v = static_cast<float>(2.0 * rng.uniform_real() - 1.0);
  for (auto& v : y) v = static_cast<float>(2.0 * rng.uniform_real() - 1.0);
  const double a = 0.7, b = -1.3;
  std::vector<float> combo(16000);
  for (size_t i = 0; i < combo.size(); ++i)
    combo[i] = static_cast<float>(a * x[i] + b * y[i]);

  const StftConfig cfg;
  const auto sx = stft(x, cfg), sy = stft(y, cfg), sc = stft(combo, cfg);
  const Eigen::ArrayXXcd expected = a * sx.values + b * sy.values;
  const double rel = std::sqrt((sc.values - expected).abs2().sum()) /
                     std::sqrt(expected.abs2().sum());
  CHECK(rel < 1e-6);  // float32 inputs bound the combination accuracy
}

TEST_CASE("stft linearity at double precision via integer-valued floats") {
  // Exact float sums: small integers have exact float representations, so
  // the 1e-9 relative bound applies to the transform itself.
  Rng rng(12);
  std::vector<float> x(16000), y(16000), combo(16000);
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<float>(rng.uniform_int(-8, 8));
    y[i] = static_cast<float>(rng.uniform_int(-8, 8));
    combo[i] = 2.0f * x[i] + 3.0f * y[i];
  }
  const StftConfig cfg;
  const auto sx = stft(x, cfg), sy = stft(y, cfg), sc = stft(combo, cfg);
  const Eigen::ArrayXXcd expected = 2.0 * sx.values + 3.0 * sy.values;
  const double rel = std::sqrt((sc.values - expected).abs2().sum()) /
                     std::sqrt(expected.abs2().sum());
  CHECK(rel < 1e-9);
}

TEST_CASE("log_magnitude evaluates the dB formula with a floor") {
  ComplexSpectrogram spec = spec_from(Eigen::ArrayXXcd::Ones(3, 4));
  CHECK(log_magnitude(spec, 1e-8).values.abs().maxCoeff() == 0.0);

  spec.values(1, 2) = std::complex<double>(10.0, 0.0);
  CHECK(log_magnitude(spec, 1e-8).values(1, 2) == doctest::Approx(20.0).epsilon(1e-12));

  ComplexSpectrogram zeros = spec_from(Eigen::ArrayXXcd::Zero(5, 6));
  const LogMagSpectrogram floored = log_magnitude(zeros, 1e-8);
  CHECK(floored.values.minCoeff() == doctest::Approx(-160.0).epsilon(1e-12));
  CHECK(floored.values.maxCoeff() == doctest::Approx(-160.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)log_magnitude(spec, 0.0), ConfigError);
  CHECK_THROWS_AS((void)log_magnitude(spec, -1.0), ConfigError);
}

TEST_CASE("compute_gain solves the batch SNR equation") {
  // One-cell spectrograms with controlled powers.
  Eigen::ArrayXXcd s(1, 1), n(1, 1);
  s(0, 0) = 10.0;  // |S|^2 = 100
  n(0, 0) = 1.0;   // |N|^2 = 1
  std::vector<ComplexSpectrogram> speech{spec_from(s)}, noise{spec_from(n)};

  CHECK(compute_gain(speech, noise, SnrDb(0.0)) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(compute_gain(speech, noise, SnrDb(20.0)) == doctest::Approx(1.0).epsilon(1e-12));

  // Equal powers at v = -12.5 dB: A = 10^0.625 by direct evaluation.
  n(0, 0) = 10.0;
  std::vector<ComplexSpectrogram> equal_noise{spec_from(n)};
  CHECK(compute_gain(speech, equal_noise, SnrDb(-12.5)) ==
        doctest::Approx(std::pow(10.0, 0.625)).epsilon(1e-12));

  CHECK(compute_gain(speech, noise, SnrDb::infinite()) == 0.0);

  std::vector<ComplexSpectrogram> silent{spec_from(Eigen::ArrayXXcd::Zero(1, 1))};
  CHECK_THROWS_AS((void)compute_gain(speech, silent, SnrDb(0.0)), NumericError);
}

TEST_CASE("mix honors annihilating and identity masks") {
  Rng rng(3);
  const ComplexSpectrogram s = random_spec(rng, 6, 5);
  const ComplexSpectrogram n = random_spec(rng, 6, 5);

  const Mask zeros{Eigen::ArrayXXd::Zero(6, 5)};
  CHECK((mix(s, n, zeros, 2.5).values - s.values).abs().maxCoeff() == 0.0);

  const Mask ones{Eigen::ArrayXXd::Ones(6, 5)};
  const Eigen::ArrayXXcd expected = s.values + n.values;
  CHECK((mix(s, n, ones, 1.0).values - expected).abs().maxCoeff() < 1e-15);

  const ComplexSpectrogram bad = random_spec(rng, 6, 4);
  CHECK_THROWS_AS((void)mix(s, bad, ones, 1.0), InvalidInputError);
  Mask bad_mask{Eigen::ArrayXXd::Ones(5, 5)};
  CHECK_THROWS_AS((void)mix(s, n, bad_mask, 1.0), InvalidInputError);
}

TEST_CASE("gain + mix + measure round-trips the target SNR within 1e-6 dB") {
  Rng rng(17);
  const std::vector<double> targets = {-12.5, 0.0, 15.0, 40.0, -33.7, 21.9};
  for (double v : targets) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto batch = static_cast<size_t>(rng.uniform_int(1, 4));
      std::vector<ComplexSpectrogram> speech, noise;
      for (size_t b = 0; b < batch; ++b) {
        speech.push_back(random_spec(rng, 9, 7));
        noise.push_back(random_spec(rng, 9, 7));
      }
      const double gain = compute_gain(speech, noise, SnrDb(v));
      const Mask ones{Eigen::ArrayXXd::Ones(9, 7)};
      std::vector<ComplexSpectrogram> added;
      for (size_t b = 0; b < batch; ++b) {
        ComplexSpectrogram component = noise[b];
        component.values *= gain;
        added.push_back(std::move(component));
      }
      const SnrDb measured = measure_snr(speech, added);
      CHECK(std::abs(measured.db - v) < 1e-6);
    }
  }
}

TEST_CASE("measure_snr conventions") {
  Rng rng(5);
  const std::vector<ComplexSpectrogram> speech{random_spec(rng, 4, 4)};
  const std::vector<ComplexSpectrogram> silent{spec_from(Eigen::ArrayXXcd::Zero(4, 4))};
  CHECK(measure_snr(speech, silent).is_infinite());
  CHECK(measure_snr(speech, speech).db == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("roll_mask shifts circularly and composes to identity") {
  Rng rng(23);
  Mask m{testutil::random_array(rng, 11, 9, 0.0, 1.0)};

  CHECK((roll_mask(m, 0, 0).values - m.values).abs().maxCoeff() == 0.0);

  Mask impulse{Eigen::ArrayXXd::Zero(4, 3)};
  impulse.values(0, 0) = 1.0;
  const Mask shifted = roll_mask(impulse, 1, 0);
  CHECK(shifted.values(1, 0) == 1.0);
  CHECK(shifted.values.sum() == 1.0);

  for (int trial = 0; trial < 1000; ++trial) {
    const long df = rng.uniform_int(-40, 40);
    const long dt = rng.uniform_int(-40, 40);
    const Mask rolled = roll_mask(m, df, dt);
    // Value multiset is preserved.
    std::multiset<double> before(m.values.data(), m.values.data() + m.values.size());
    std::multiset<double> after(rolled.values.data(),
                                rolled.values.data() + rolled.values.size());
    CHECK(before == after);
    // Inverse composition restores the input exactly.
    const Mask restored = roll_mask(rolled, -df, -dt);
    CHECK((restored.values - m.values).abs().maxCoeff() == 0.0);
  }

  const Mask full_turn = roll_mask(m, m.values.rows(), m.values.cols());
  CHECK((full_turn.values - m.values).abs().maxCoeff() == 0.0);
}

TEST_CASE("binarize_mask zeroes exactly the k lowest cells") {
  Mask example{Eigen::ArrayXXd(2, 2)};
  example.values << 0.1, 0.9, 0.2, 0.8;
  const Mask bin = binarize_mask(example, 50.0);
  Eigen::ArrayXXd expected(2, 2);
  expected << 0, 1, 0, 1;
  CHECK((bin.values - expected).abs().maxCoeff() == 0.0);

  Rng rng(31);
  Mask m{testutil::random_array(rng, 13, 17, 0.0, 1.0)};
  CHECK(binarize_mask(m, 0.0).values.minCoeff() == 1.0);
  CHECK(binarize_mask(m, 100.0).values.maxCoeff() == 0.0);

  for (double q : {0.0, 1.0, 5.0, 10.0, 20.0, 40.0, 50.0, 70.0, 100.0}) {
    const Mask b = binarize_mask(m, q);
    const auto zeros = static_cast<long>((b.values == 0.0).count());
    CHECK(zeros == std::llround(q / 100.0 * 13 * 17));
    CHECK(((b.values == 0.0) || (b.values == 1.0)).all());
  }

  // Constant masks exercise the lexicographic tie-break: the zeroed cells
  // are the first k in row-major (f, t) order.
  Mask constant{Eigen::ArrayXXd::Constant(5, 4, 0.5)};
  const Mask tie = binarize_mask(constant, 37.0);
  const long k = std::llround(0.37 * 20);
  for (long f = 0; f < 5; ++f)
    for (long t = 0; t < 4; ++t)
      CHECK(tie.values(f, t) == ((f * 4 + t < k) ? 0.0 : 1.0));

  CHECK_THROWS_AS((void)binarize_mask(m, -1.0), ConfigError);
  CHECK_THROWS_AS((void)binarize_mask(m, 100.5), ConfigError);
}

TEST_CASE("added noise power grows monotonically with any mask entry") {
  Rng rng(41);
  const ComplexSpectrogram noise = random_spec(rng, 8, 6);
  Mask m{testutil::random_array(rng, 8, 6, 0.0, 1.0)};
  const double gain = 1.7;
  const double base = added_noise_power(noise, m, gain);
  for (int trial = 0; trial < 50; ++trial) {
    Mask bumped = m;
    const long f = rng.uniform_int(0, 7);
    const long t = rng.uniform_int(0, 5);
    bumped.values(f, t) = std::min(1.0, bumped.values(f, t) + 0.2);
    CHECK(added_noise_power(noise, bumped, gain) >= base - 1e-12);
  }
}
