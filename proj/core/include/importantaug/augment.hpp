// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <span>
#include <string>
#include <vector>

#include "importantaug/dataset.hpp"
#include "importantaug/models.hpp"
#include "importantaug/rng.hpp"
#include "importantaug/signal.hpp"

namespace importantaug {

enum class PolicyKind {
  none,
  conventional,
  importantaug,
  null_importantaug,
  importantaug_binarized,
};

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

// Which augmentation to apply while retraining the recognizer.
//   importantaug            roll the generator mask, sometimes null-replace
//   null_importantaug       all-ones mask at the same SNR (ablation)
//   importantaug_binarized  roll, then binarize at q; never null-replaced
//   conventional            noise everywhere at a fixed SNR, no masks
struct AugmentPolicy {
  PolicyKind kind = PolicyKind::importantaug;
  SnrDb snr{-12.5};           // target v
  int roll_extent = 30;       // D, max |shift| in bins and frames
  double null_probability = 0.5;
  double q_percent = 10.0;    // binarized variant only

  void validate() const;
};

struct AugmentedBatch {
  std::vector<LogMagSpectrogram> features;
  std::vector<int> labels;
  SnrDb realized_snr = SnrDb::infinite();  // diagnostic, measured after mixing
};

// Named random streams consumed while building one batch. Keeping them
// separate means changing one consumer (say, the roll draws) never perturbs
// the others.
struct AugmentStreams {
  Rng noise_draw;
  Rng roll;
  Rng null_replace;
};

// Uniform i.i.d. draws with replacement. Throws DataError on an empty pool.
std::vector<NoiseClip> sample_noise(std::span<const NoiseClip> pool, int count, Rng& stream);

// Applies the policy's mask transform to a generator output:
//   importantaug            roll by independent uniform shifts in
//                           [-D, D], then with p_null replace by all ones
//   null_importantaug       all ones, unconditionally
//   importantaug_binarized  roll, then binarize at q (never nulled)
Mask make_training_mask(const Mask& mask, const AugmentPolicy& policy, Rng& roll_stream,
                        Rng& null_stream);

// Builds one training batch under a mask policy: per utterance STFT ->
// dB features -> generator mask -> training mask; one batch gain from the
// unmasked noise (so null batches hit the target SNR exactly and masked
// batches land at or above it); features are the dB mixture.
AugmentedBatch importantaug_batch(std::span<const Utterance> speech,
                                  const GeneratorParams& generator,
                                  std::span<const NoiseClip> pool, const AugmentPolicy& policy,
                                  const StftConfig& stft_cfg, double amplitude_floor,
                                  AugmentStreams& streams);

// Mask-free noise augmentation (mask of all ones, no roll). An infinite
// target returns clean features.
AugmentedBatch conventional_batch(std::span<const Utterance> speech,
                                  std::span<const NoiseClip> pool, SnrDb target,
                                  const StftConfig& stft_cfg, double amplitude_floor,
                                  Rng& noise_stream);

}  // namespace importantaug
