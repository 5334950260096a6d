// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/augment.hpp"

namespace importantaug {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::none: return "none";
    case PolicyKind::conventional: return "conventional";
    case PolicyKind::importantaug: return "importantaug";
    case PolicyKind::null_importantaug: return "null-importantaug";
    case PolicyKind::importantaug_binarized: return "importantaug-binarized";
  }
  throw InvalidInputError("unknown policy kind");
}

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "none") return PolicyKind::none;
  if (name == "conventional") return PolicyKind::conventional;
  if (name == "importantaug") return PolicyKind::importantaug;
  if (name == "null-importantaug") return PolicyKind::null_importantaug;
  if (name == "importantaug-binarized") return PolicyKind::importantaug_binarized;
  throw ConfigError("unknown augmentation policy '" + name +
                    "' (expected none, conventional, importantaug, null-importantaug or "
                    "importantaug-binarized)");
}

void AugmentPolicy::validate() const {
  if (roll_extent < 0) throw ConfigError("policy: roll_extent must be >= 0");
  if (!(null_probability >= 0.0 && null_probability <= 1.0))
    throw ConfigError("policy: null_probability must lie in [0, 1]");
  if (kind == PolicyKind::importantaug_binarized &&
      !(q_percent >= 0.0 && q_percent <= 100.0))
    throw ConfigError("policy: q_percent must lie in [0, 100]");
  if (kind != PolicyKind::none && !snr.is_infinite() && !std::isfinite(snr.db))
    throw ConfigError("policy: snr must be finite or +inf");
}

std::vector<NoiseClip> sample_noise(std::span<const NoiseClip> pool, int count, Rng& stream) {
  if (pool.empty()) throw DataError("sample_noise: empty noise pool");
  if (count < 0) throw InvalidInputError("sample_noise: negative count");
  std::vector<NoiseClip> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(pool[static_cast<size_t>(
        stream.uniform_int(0, static_cast<int64_t>(pool.size()) - 1))]);
  return out;
}

Mask make_training_mask(const Mask& mask, const AugmentPolicy& policy, Rng& roll_stream,
                        Rng& null_stream) {
  switch (policy.kind) {
    case PolicyKind::null_importantaug:
      return Mask{Eigen::ArrayXXd::Ones(mask.values.rows(), mask.values.cols())};
    case PolicyKind::importantaug: {
      const long df = roll_stream.uniform_int(-policy.roll_extent, policy.roll_extent);
      const long dt = roll_stream.uniform_int(-policy.roll_extent, policy.roll_extent);
      Mask rolled = roll_mask(mask, df, dt);
      if (null_stream.bernoulli(policy.null_probability))
        return Mask{Eigen::ArrayXXd::Ones(mask.values.rows(), mask.values.cols())};
      return rolled;
    }
    case PolicyKind::importantaug_binarized: {
      const long df = roll_stream.uniform_int(-policy.roll_extent, policy.roll_extent);
      const long dt = roll_stream.uniform_int(-policy.roll_extent, policy.roll_extent);
      return binarize_mask(roll_mask(mask, df, dt), policy.q_percent);
    }
    default:
      throw InvalidInputError("make_training_mask: policy kind " + to_string(policy.kind) +
                              " does not use masks");
  }
}

namespace {

void check_finite_target_power(std::span<const ComplexSpectrogram> speech, SnrDb target) {
  if (target.is_infinite()) return;
  double power = 0.0;
  for (const auto& s : speech) power += s.values.abs2().sum();
  if (power <= 0.0)
    throw NumericError("augmentation: speech batch has zero power; the batch gain of a "
                       "finite-SNR mix degenerates to zero");
}

}  // namespace

AugmentedBatch importantaug_batch(std::span<const Utterance> speech,
                                  const GeneratorParams& generator,
                                  std::span<const NoiseClip> pool, const AugmentPolicy& policy,
                                  const StftConfig& stft_cfg, double amplitude_floor,
                                  AugmentStreams& streams) {
  policy.validate();
  if (policy.kind != PolicyKind::importantaug &&
      policy.kind != PolicyKind::null_importantaug &&
      policy.kind != PolicyKind::importantaug_binarized)
    throw InvalidInputError("importantaug_batch: policy must be a mask policy");

  const std::vector<NoiseClip> drawn =
      sample_noise(pool, static_cast<int>(speech.size()), streams.noise_draw);

  std::vector<ComplexSpectrogram> speech_specs, noise_specs;
  std::vector<Mask> masks;
  speech_specs.reserve(speech.size());
  noise_specs.reserve(speech.size());
  masks.reserve(speech.size());
  for (size_t i = 0; i < speech.size(); ++i) {
    speech_specs.push_back(stft(speech[i].samples, stft_cfg));
    noise_specs.push_back(stft(drawn[i].samples, stft_cfg));
    if (policy.kind == PolicyKind::null_importantaug) {
      // The generator output would be discarded; skip the forward pass.
      masks.push_back(Mask{Eigen::ArrayXXd::Ones(speech_specs.back().bins(),
                                                 speech_specs.back().frames())});
      continue;
    }
    const LogMagSpectrogram s_tilde = log_magnitude(speech_specs.back(), amplitude_floor);
    const Mask raw = generator_forward(generator, s_tilde);
    masks.push_back(make_training_mask(raw, policy, streams.roll, streams.null_replace));
  }

  check_finite_target_power(speech_specs, policy.snr);
  const double gain = compute_gain(speech_specs, noise_specs, policy.snr);

  AugmentedBatch batch;
  std::vector<ComplexSpectrogram> added;
  added.reserve(speech.size());
  for (size_t i = 0; i < speech.size(); ++i) {
    const ComplexSpectrogram noisy = mix(speech_specs[i], noise_specs[i], masks[i], gain);
    batch.features.push_back(log_magnitude(noisy, amplitude_floor));
    batch.labels.push_back(speech[i].label);
    ComplexSpectrogram component;
    component.config = stft_cfg;
    component.values = gain * (noise_specs[i].values * masks[i].values.cast<std::complex<double>>());
    added.push_back(std::move(component));
  }
  batch.realized_snr = measure_snr(speech_specs, added);
  return batch;
}

AugmentedBatch conventional_batch(std::span<const Utterance> speech,
                                  std::span<const NoiseClip> pool, SnrDb target,
                                  const StftConfig& stft_cfg, double amplitude_floor,
                                  Rng& noise_stream) {
  AugmentedBatch batch;
  if (target.is_infinite()) {
    for (const Utterance& u : speech) {
      batch.features.push_back(log_magnitude(stft(u.samples, stft_cfg), amplitude_floor));
      batch.labels.push_back(u.label);
    }
    batch.realized_snr = SnrDb::infinite();
    return batch;
  }

  const std::vector<NoiseClip> drawn =
      sample_noise(pool, static_cast<int>(speech.size()), noise_stream);
  std::vector<ComplexSpectrogram> speech_specs, noise_specs;
  for (size_t i = 0; i < speech.size(); ++i) {
    speech_specs.push_back(stft(speech[i].samples, stft_cfg));
    noise_specs.push_back(stft(drawn[i].samples, stft_cfg));
  }
  check_finite_target_power(speech_specs, target);
  const double gain = compute_gain(speech_specs, noise_specs, target);

  const Mask ones{Eigen::ArrayXXd::Ones(stft_cfg.num_bins(),
                                        stft_cfg.num_frames(stft_cfg.sample_rate_hz))};
  std::vector<ComplexSpectrogram> added;
  for (size_t i = 0; i < speech.size(); ++i) {
    const ComplexSpectrogram noisy = mix(speech_specs[i], noise_specs[i], ones, gain);
    batch.features.push_back(log_magnitude(noisy, amplitude_floor));
    batch.labels.push_back(speech[i].label);
    ComplexSpectrogram component;
    component.config = stft_cfg;
    component.values =
        gain * (noise_specs[i].values * ones.values.cast<std::complex<double>>());
    added.push_back(std::move(component));
  }
  batch.realized_snr = measure_snr(speech_specs, added);
  return batch;
}

}  // namespace importantaug
