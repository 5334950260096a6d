// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <functional>

#include "importantaug/dataset.hpp"
#include "importantaug/models.hpp"
#include "importantaug/rng.hpp"
#include "importantaug/signal.hpp"
#include "importantaug/training.hpp"

namespace testutil {

using importantaug::ComplexSpectrogram;
using importantaug::Rng;
using importantaug::StftConfig;

inline Eigen::ArrayXXd random_array(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                    double lo = -1.0, double hi = 1.0) {
  Eigen::ArrayXXd a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = lo + (hi - lo) * rng.uniform_real();
  return a;
}

inline ComplexSpectrogram random_spec(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                      const StftConfig& cfg = {}) {
  ComplexSpectrogram spec;
  spec.config = cfg;
  spec.values.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      spec.values(r, c) = std::complex<double>(2.0 * rng.uniform_real() - 1.0,
                                               2.0 * rng.uniform_real() - 1.0);
  return spec;
}

inline ComplexSpectrogram spec_from(Eigen::ArrayXXcd values, const StftConfig& cfg = {}) {
  return ComplexSpectrogram{std::move(values), cfg};
}

// Small analysis setup so desk tests stay fast: 2 kHz clips, 33 x 126 grid.
inline StftConfig tiny_stft_config() {
  StftConfig cfg;
  cfg.sample_rate_hz = 2000;
  cfg.window_length = 64;
  cfg.hop_length = 16;
  cfg.centered = true;
  return cfg;
}

// Toy corpus paired with tiny_stft_config; cues sit inside the 1 kHz band.
inline importantaug::ToyConfig tiny_toy_config(int n_per_class = 12) {
  importantaug::ToyConfig cfg;
  cfg.n_classes = 4;
  cfg.n_per_class = n_per_class;
  cfg.train_fraction = 0.6;
  cfg.dev_fraction = 0.2;
  cfg.n_noise_clips = 8;
  cfg.cue_freqs_hz = {250, 430, 620, 810};
  cfg.distractor_freq_hz = 120.0;
  cfg.cue_half_width_bins = 1;
  return cfg;
}

inline importantaug::TrainSetup tiny_train_setup(uint64_t seed = 7) {
  importantaug::TrainSetup setup;
  setup.stft = tiny_stft_config();
  setup.arch.n_freq = setup.stft.num_bins();
  setup.arch.n_classes = 4;
  setup.optim.batch_size = 16;
  setup.optim.max_epochs = 6;
  setup.optim.patience = 6;
  setup.policy.snr = importantaug::SnrDb(-10.0);
  setup.policy.roll_extent = 4;
  setup.seed = seed;
  setup.threads = 1;
  return setup;
}

// Central finite differences of a scalar function over one array argument.
inline Eigen::ArrayXXd numeric_gradient(const std::function<double(const Eigen::ArrayXXd&)>& f,
                                        const Eigen::ArrayXXd& x, double step = 1e-6) {
  Eigen::ArrayXXd grad(x.rows(), x.cols());
  Eigen::ArrayXXd probe = x;
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      probe(r, c) = x(r, c) + step;
      const double up = f(probe);
      probe(r, c) = x(r, c) - step;
      const double down = f(probe);
      probe(r, c) = x(r, c);
      grad(r, c) = (up - down) / (2.0 * step);
    }
  return grad;
}

inline double relative_error(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b) {
  const double denom = std::max({std::sqrt(a.square().sum()), std::sqrt(b.square().sum()),
                                 1e-300});
  return std::sqrt((a - b).square().sum()) / denom;
}

}  // namespace testutil
