// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "importantaug/augment.hpp"

using namespace importantaug;
using testutil::random_array;
using testutil::tiny_stft_config;
using testutil::tiny_toy_config;

namespace {

struct ToyFixture {
  ToyFixture()
      : stft_cfg(tiny_stft_config()),
        toy(gen_toy_dataset(tiny_toy_config(), stft_cfg, Rng(2024))) {
    ArchConfig arch;
    arch.n_freq = stft_cfg.num_bins();
    arch.n_classes = 4;
    generator = init_generator(Rng(5).substream("g"), arch);
  }

  StftConfig stft_cfg;
  ToyDataset toy;
  GeneratorParams generator;
};

AugmentStreams make_streams(uint64_t seed) {
  Rng root(seed);
  return AugmentStreams{root.substream("noise-draw", 0), root.substream("roll", 0),
                        root.substream("null-replace", 0)};
}

}  // namespace

TEST_CASE("sample_noise draws uniformly with replacement under a seed") {
  std::vector<NoiseClip> pool;
  for (int i = 0; i < 4; ++i)
    pool.push_back(NoiseClip{std::vector<float>(100, static_cast<float>(i)),
                             "clip" + std::to_string(i)});

  // Forced draw from a single-clip pool.
  std::vector<NoiseClip> one(pool.begin(), pool.begin() + 1);
  Rng rng(1);
  const auto forced = sample_noise(one, 5, rng);
  for (const auto& clip : forced) CHECK(clip.id == "clip0");

  // Same seed, same sequence.
  Rng r1(9), r2(9);
  const auto a = sample_noise(pool, 50, r1);
  const auto b = sample_noise(pool, 50, r2);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].id == b[i].id);

  // 10^4 draws from 4 clips: each count within 3 sigma of 2500
  // (sigma = sqrt(10^4 * 0.25 * 0.75) ~ 43.3).
  Rng r3(77);
  const auto big = sample_noise(pool, 10000, r3);
  std::array<int, 4> counts{};
  for (const auto& clip : big) counts[static_cast<size_t>(clip.id.back() - '0')]++;
  for (int c : counts) CHECK(std::abs(c - 2500) <= 130);

  std::vector<NoiseClip> empty;
  CHECK_THROWS_AS((void)sample_noise(empty, 1, rng), DataError);
}

TEST_CASE("make_training_mask implements the three mask policies") {
  Rng rng(3);
  Mask m{random_array(rng, 16, 12, 0.1, 0.9)};

  AugmentPolicy null_policy;
  null_policy.kind = PolicyKind::null_importantaug;
  Rng roll(1), null(2);
  const Mask nulled = make_training_mask(m, null_policy, roll, null);
  CHECK(nulled.values.minCoeff() == 1.0);

  // Degenerate roll: D=0 and p_null=0 leave the mask untouched.
  AugmentPolicy frozen;
  frozen.kind = PolicyKind::importantaug;
  frozen.roll_extent = 0;
  frozen.null_probability = 0.0;
  const Mask same = make_training_mask(m, frozen, roll, null);
  CHECK((same.values == m.values).all());

  // Binarized: exact zero count at q, only {0,1} values, never nulled.
  AugmentPolicy binarized;
  binarized.kind = PolicyKind::importantaug_binarized;
  binarized.roll_extent = 4;
  binarized.q_percent = 10.0;
  Mask big{random_array(rng, 257, 126, 0.0, 1.0)};
  for (int trial = 0; trial < 5; ++trial) {
    const Mask b = make_training_mask(big, binarized, roll, null);
    CHECK(static_cast<long>((b.values == 0.0).count()) == std::llround(0.10 * 257 * 126));
    CHECK(((b.values == 0.0) || (b.values == 1.0)).all());
  }

  // Statistical: with p_null = 0.5 the all-ones fraction sits within 3 sigma
  // of one half (sigma = sqrt(N/4), N = 2000).
  AugmentPolicy half;
  half.kind = PolicyKind::importantaug;
  half.roll_extent = 3;
  half.null_probability = 0.5;
  int all_ones = 0;
  const int trials = 2000;
  for (int i = 0; i < trials; ++i) {
    const Mask t = make_training_mask(m, half, roll, null);
    if (t.values.minCoeff() == 1.0) ++all_ones;
  }
  CHECK(std::abs(all_ones - trials / 2) <= 3 * std::sqrt(trials / 4.0));
}

TEST_CASE("importantaug_batch mixes per policy and reports realized SNR") {
  const ToyFixture fx;
  std::span<const Utterance> speech(fx.toy.split.speech.train.data(), 8);
  std::span<const NoiseClip> pool(fx.toy.split.noise.train);

  AugmentPolicy policy;
  policy.kind = PolicyKind::importantaug;
  policy.snr = SnrDb(-10.0);
  policy.roll_extent = 4;
  policy.null_probability = 0.5;

  // Determinism: identical streams give identical batches.
  auto s1 = make_streams(11), s2 = make_streams(11);
  const AugmentedBatch b1 =
      importantaug_batch(speech, fx.generator, pool, policy, fx.stft_cfg, 1e-8, s1);
  const AugmentedBatch b2 =
      importantaug_batch(speech, fx.generator, pool, policy, fx.stft_cfg, 1e-8, s2);
  CHECK(b1.labels == b2.labels);
  CHECK(b1.realized_snr.db == b2.realized_snr.db);
  for (size_t i = 0; i < b1.features.size(); ++i)
    CHECK((b1.features[i].values == b2.features[i].values).all());

  // Masked mixing can only remove noise power: realized SNR >= target.
  CHECK(b1.realized_snr.db >= policy.snr.db - 1e-9);

  // Feature shapes and labels pass through.
  const int bins = fx.stft_cfg.num_bins();
  const int frames = fx.stft_cfg.num_frames(fx.stft_cfg.sample_rate_hz);
  for (size_t i = 0; i < b1.features.size(); ++i) {
    CHECK(b1.features[i].values.rows() == bins);
    CHECK(b1.features[i].values.cols() == frames);
    CHECK(b1.labels[i] == speech[i].label);
  }

  // Null variant realizes the target exactly (mask of all ones).
  AugmentPolicy null_policy = policy;
  null_policy.kind = PolicyKind::null_importantaug;
  auto s3 = make_streams(11);
  const AugmentedBatch nb =
      importantaug_batch(speech, fx.generator, pool, null_policy, fx.stft_cfg, 1e-8, s3);
  CHECK(std::abs(nb.realized_snr.db - policy.snr.db) < 1e-6);

  // A zero generator mask reproduces the clean features exactly.
  GeneratorParams zero_gen = fx.generator;
  for (auto& row : zero_gen.layers.back().weights)
    for (auto& w : row) w.setZero();
  zero_gen.layers.back().bias.setConstant(-1000.0);  // sigmoid underflows to 0
  AugmentPolicy no_roll = policy;
  no_roll.roll_extent = 0;
  no_roll.null_probability = 0.0;
  auto s4 = make_streams(11);
  const AugmentedBatch zb =
      importantaug_batch(speech, zero_gen, pool, no_roll, fx.stft_cfg, 1e-8, s4);
  for (size_t i = 0; i < zb.features.size(); ++i) {
    const LogMagSpectrogram clean =
        log_magnitude(stft(speech[i].samples, fx.stft_cfg), 1e-8);
    CHECK((zb.features[i].values == clean.values).all());
  }
}

TEST_CASE("conventional_batch realizes its target exactly and handles inf") {
  const ToyFixture fx;
  std::span<const Utterance> speech(fx.toy.split.speech.train.data(), 6);
  std::span<const NoiseClip> pool(fx.toy.split.noise.train);

  Rng noise_stream(5);
  const AugmentedBatch clean =
      conventional_batch(speech, pool, SnrDb::infinite(), fx.stft_cfg, 1e-8, noise_stream);
  CHECK(clean.realized_snr.is_infinite());
  for (size_t i = 0; i < clean.features.size(); ++i) {
    const LogMagSpectrogram expected =
        log_magnitude(stft(speech[i].samples, fx.stft_cfg), 1e-8);
    CHECK((clean.features[i].values == expected.values).all());
  }

  Rng noise_stream2(5);
  const AugmentedBatch noisy =
      conventional_batch(speech, pool, SnrDb(15.0), fx.stft_cfg, 1e-8, noise_stream2);
  CHECK(std::abs(noisy.realized_snr.db - 15.0) < 1e-6);

  // Zero-power speech surfaces the degenerate-gain hazard.
  std::vector<Utterance> silent(4);
  for (size_t i = 0; i < silent.size(); ++i) {
    silent[i].samples.assign(static_cast<size_t>(fx.stft_cfg.sample_rate_hz), 0.0f);
    silent[i].label = 0;
    silent[i].id = "silent";
  }
  Rng noise_stream3(5);
  CHECK_THROWS_AS(
      (void)conventional_batch(silent, pool, SnrDb(0.0), fx.stft_cfg, 1e-8, noise_stream3),
      NumericError);
}
