// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "importantaug/dataset.hpp"
#include "importantaug/models.hpp"
#include "importantaug/training.hpp"

namespace importantaug {

struct EvalResult {
  std::string condition;
  SnrDb snr = SnrDb::infinite();
  double error_rate_percent = 0.0;
  int n_examples = 0;
};

// 100 * mismatches / n. Throws InvalidInputError on length mismatch or
// empty input.
double error_rate(std::span<const int> predictions, std::span<const int> labels);

// Deterministic argmax decoding over the set (ties to the lowest class).
EvalResult evaluate(const RecognizerParams& recognizer, const EvalSet& eval_set,
                    const std::string& condition);

// One result per set, in input order.
std::vector<EvalResult> snr_grid_eval(const RecognizerParams& recognizer,
                                      std::span<const EvalSet> noisy_sets,
                                      const std::string& condition);

struct SweepResult {
  std::vector<EvalResult> rows;
  size_t best_index = 0;          // row the dev criterion selects
  TensorMap best_params;          // recognizer chosen by the sweep
};

// Trains one conventional-augmentation recognizer per grid SNR (the
// infinite entry reuses the clean baseline, which also initializes every
// other entry) and reports dev error per SNR. dev_eval_snr picks the dev
// condition: +inf evaluates the clean dev set, a finite value synthesizes a
// noisy dev set from the training noise pool. Ties prefer the higher SNR.
SweepResult noiseaug_snr_sweep(const DatasetSplit& data, std::span<const SnrDb> grid,
                               const TrainSetup& setup, SnrDb dev_eval_snr);

// One stage-2 retraining per q with the binarized policy; emits a dev row
// and a test row per q (conditions "q=<val> dev" / "q=<val> test").
// best_index points at the winning dev row.
SweepResult binarize_q_sweep(const GeneratorParams& frozen_generator,
                             const RecognizerParams& baseline, const DatasetSplit& data,
                             std::span<const double> q_grid, const TrainSetup& setup,
                             SnrDb dev_eval_snr, SnrDb test_eval_snr);

// 8-bit grayscale PNG, one row per frequency bin with bin 0 at the bottom,
// pixel = round(255 * M).
void export_mask_image(const Mask& mask, const std::filesystem::path& path);

// CSV with header `condition,snr_db,error_rate_percent,n`; +inf SNR is
// serialized as `inf`, error rates with two decimals.
void emit_table(std::span<const EvalResult> results, const std::filesystem::path& path);
std::vector<EvalResult> parse_table(const std::filesystem::path& path);

}  // namespace importantaug
