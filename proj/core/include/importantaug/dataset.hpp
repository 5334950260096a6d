// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "importantaug/rng.hpp"
#include "importantaug/signal.hpp"

namespace importantaug {

// One-second 16 kHz mono utterance. Shorter source files are zero-padded at
// the tail; longer ones are rejected at ingestion.
struct Utterance {
  std::vector<float> samples;
  int label = -1;
  std::string id;
};

// One-second noise clip; sources shorter than a second are excluded, never
// padded.
struct NoiseClip {
  std::vector<float> samples;
  std::string id;
};

struct SpeechDataset {
  std::vector<Utterance> train, dev, test;
  std::vector<std::string> words;  // label order (sorted directory names)
};

struct NoisePools {
  std::vector<NoiseClip> train, test;
};

struct DatasetSplit {
  SpeechDataset speech;
  NoisePools noise;
};

// Per-file rejections collected during ingestion ("path: reason").
struct IngestReport {
  int num_loaded = 0;
  std::vector<std::string> rejected;
};

// Loads a speech-commands-layout corpus: one subdirectory per word holding
// WAV files; directories starting with '_' are skipped. The two list files
// name dev/test members as newline-delimited relative paths; everything
// else is training data. Labels follow sorted directory-name order. Files
// that are not 16 kHz mono PCM/float, or longer than one second, are
// rejected per file with a report entry. A path present in both lists is a
// corrupt split and raises DataError.
SpeechDataset load_speech_corpus(const std::filesystem::path& root,
                                 const std::filesystem::path& dev_list,
                                 const std::filesystem::path& test_list,
                                 IngestReport* report = nullptr);

// Recursively scans a directory of WAV files, keeps the first second of
// every file at least one second long, drops shorter files, then shuffles
// the sorted ids under the stream and splits train_fraction/(1 -
// train_fraction). Raises DataError when nothing survives the filter.
NoisePools load_noise_corpus(const std::filesystem::path& root, double train_fraction,
                             Rng stream, IngestReport* report = nullptr);

// Cuts `count` random one-second windows out of a long 16 kHz mono
// recording, start offsets uniform over every valid position. Inputs at any
// other rate must be resampled beforehand; the error says so.
std::vector<NoiseClip> crop_long_noise(const std::filesystem::path& file, int count,
                                       Rng stream);

// Materialized evaluation set: dB features plus labels at one SNR.
struct EvalSet {
  std::vector<LogMagSpectrogram> features;
  std::vector<int> labels;
  SnrDb snr;
};

EvalSet make_clean_eval_set(std::span<const Utterance> utterances, const StftConfig& stft_cfg,
                            double amplitude_floor);

// Fixed utterance-to-noise pairing, drawn once and reused for every SNR so
// grid rows are paired measurements. build() enforces the target SNR with
// one batch gain over the whole set (mask of all ones).
class NoisyTestSynth {
 public:
  NoisyTestSynth(std::vector<Utterance> speech, std::vector<NoiseClip> noise_pool, Rng stream);

  EvalSet build(SnrDb snr, const StftConfig& stft_cfg, double amplitude_floor) const;

  std::span<const size_t> pairing() const { return pair_index_; }

 private:
  std::vector<Utterance> speech_;
  std::vector<NoiseClip> noise_;
  std::vector<size_t> pair_index_;  // utterance i mixes with noise_[pair_index_[i]]
};

// One evaluation set per grid entry, in grid order.
std::vector<EvalSet> synth_noisy_testset(const NoisyTestSynth& synth,
                                         std::span<const SnrDb> snr_grid,
                                         const StftConfig& stft_cfg, double amplitude_floor);

// ---- Synthetic toy corpus ----------------------------------------------

// Half-open time-frequency rectangle [f_lo, f_hi) x [t_lo, t_hi).
struct CueRegion {
  int f_lo = 0, f_hi = 0, t_lo = 0, t_hi = 0;

  bool contains(int f, int t) const {
    return f >= f_lo && f < f_hi && t >= t_lo && t < t_hi;
  }
};

// Desk-scale verification corpus: every class is a tone confined to its own
// frequency band (the cue region), on top of a common white-noise floor and
// an optional non-discriminative distractor tone shared by all classes.
struct ToyConfig {
  int n_classes = 4;
  int n_per_class = 150;
  double train_fraction = 0.7;
  double dev_fraction = 0.15;
  int n_noise_clips = 16;
  double cue_amplitude = 0.25;
  double background_level = 0.02;
  double distractor_freq_hz = 500.0;  // 0 disables
  double distractor_amplitude = 0.1;
  std::vector<double> cue_freqs_hz;  // empty: evenly spaced 1-6 kHz
  int cue_half_width_bins = 3;

  void validate() const;
};

struct ToyDataset {
  DatasetSplit split;
  std::vector<CueRegion> cue_regions;  // one per class
};

// Deterministic under the stream; throws ConfigError when class cues (or
// the distractor band) overlap.
ToyDataset gen_toy_dataset(const ToyConfig& cfg, const StftConfig& stft_cfg, Rng stream);

// Writes the toy corpus in speech-commands layout (word directories,
// dev/test list files, a noise/ directory and a cues.json manifest) so every
// pipeline command runs on it unchanged.
void write_toy_corpus(const ToyDataset& toy, const ToyConfig& cfg, const StftConfig& stft_cfg,
                      const std::filesystem::path& root);

// UTF-8 CSV manifest (id, path, label, split) covering speech and noise.
void write_manifest(const DatasetSplit& split, const std::filesystem::path& corpus_root,
                    const std::filesystem::path& out_path);

}  // namespace importantaug
