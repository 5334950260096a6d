// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "importantaug/augment.hpp"
#include "importantaug/dataset.hpp"
#include "importantaug/models.hpp"

namespace importantaug {

// Weights of the composite mask-training loss:
//   lambda_r * CE  -  (lambda_e/TF) sum log M
//   + (lambda_f/TF) sum |diff_f M|  +  (lambda_t/TF) sum |diff_t M|
// with TF the number of mask cells. The difference sums run over forward
// differences (F-1 and T-1 terms) but are still divided by TF.
struct LossWeights {
  double lambda_r = 1.0;
  double lambda_e = 3.0;
  double lambda_f = 3.0;
  double lambda_t = 3.0;

  void validate() const;
};

struct OptimConfig {
  double initial_lr = 0.001;
  int halve_every_epochs = 20;
  int batch_size = 256;
  int max_epochs = 200;
  int patience = 30;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

// Optimizer state plus early-stopping bookkeeping.
struct TrainState {
  TensorMap params;
  TensorMap m, v;  // Adam moment accumulators, shaped like params
  int64_t step = 0;
  int epoch = 0;
  double best_dev_loss = std::numeric_limits<double>::infinity();
  int epochs_since_improvement = 0;
};

TrainState make_train_state(TensorMap params);

// Composite loss for one utterance. Terms with a zero weight are skipped
// entirely (a zero mask cell must not poison a term that is switched off).
// Throws NumericError when the result is not finite.
double total_loss(const ClassDistribution& pred, int label, const Mask& mask,
                  const LossWeights& w);

// Same formula on the tape, for gradient computation.
autodiff::Var build_total_loss(autodiff::Graph& g, autodiff::Var log_probs, int label,
                               autodiff::Var mask, const LossWeights& w);

// One bias-corrected Adam update. Throws NumericError on non-finite
// gradients.
void adam_step(TrainState& state, const TensorMap& grads, double lr,
               const OptimConfig& cfg);

// initial_lr * 0.5^floor(epoch / halve_every_epochs)
double lr_at(int epoch, const OptimConfig& cfg);

// Everything a training procedure needs besides the data.
struct TrainSetup {
  ArchConfig arch;
  StftConfig stft;
  double amplitude_floor = 1e-8;
  OptimConfig optim;
  LossWeights loss;
  AugmentPolicy policy;
  uint64_t seed = 1234;
  int threads = 1;                    // worker cap for batch gradients
  std::ostream* progress = nullptr;   // optional per-epoch status lines
};

struct EpochStats {
  int epoch = 0;
  double lr = 0;
  double train_loss = 0;
  double dev_loss = 0;
  double dev_error_percent = 0;
  double wall_s = 0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;
  double best_dev_loss = std::numeric_limits<double>::infinity();
};

// Appends the log as CSV (epoch, lr, train loss, dev loss, dev error, wall
// time); truncates first so a rerun rewrites the file.
void write_train_log(const TrainLog& log, const std::filesystem::path& path);

struct BaselineResult {
  RecognizerParams params;
  TrainLog log;
};
struct GeneratorResult {
  GeneratorParams params;
  TrainLog log;
};
struct RetrainResult {
  RecognizerParams params;
  TrainLog log;
};

// Recognizer trained on clean features only; early stopping on dev
// cross-entropy; returns the best-dev checkpoint.
BaselineResult train_baseline(const SpeechDataset& data, const TrainSetup& setup);

// Stage 1: the recognizer is frozen, the generator minimizes the composite
// loss on raw masks (no roll, no null replacement). Early stopping monitors
// the composite dev loss under a fixed dev noise pairing.
GeneratorResult train_generator(const RecognizerParams& frozen_recognizer,
                                const SpeechDataset& data,
                                std::span<const NoiseClip> noise_pool,
                                const TrainSetup& setup);

// Stage 2: the generator is frozen, the recognizer retrains on augmented
// batches (roll and null replacement active) with cross-entropy only,
// starting from the pretrained baseline. Also handles the
// null-importantaug and binarized policies.
RetrainResult train_recognizer_importantaug(const GeneratorParams& frozen_generator,
                                            const RecognizerParams& init_recognizer,
                                            const SpeechDataset& data,
                                            std::span<const NoiseClip> noise_pool,
                                            const TrainSetup& setup);

// Conventional noise augmentation at a fixed SNR (mask-free), starting from
// the pretrained baseline; used by the SNR sweep.
RetrainResult train_recognizer_conventional(const RecognizerParams& init_recognizer,
                                            const SpeechDataset& data,
                                            std::span<const NoiseClip> noise_pool, SnrDb snr,
                                            const TrainSetup& setup);

}  // namespace importantaug
