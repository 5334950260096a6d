// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "importantaug/png_image.hpp"

namespace importantaug {

namespace {

std::string format_snr(SnrDb snr) {
  if (snr.is_infinite()) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", snr.db);
  return buf;
}

SnrDb parse_snr(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "Inf") return SnrDb::infinite();
  return SnrDb(std::stod(text));
}

// Noisy dev/test set for sweeps; +inf means the clean set.
EvalSet sweep_eval_set(std::span<const Utterance> utterances,
                       std::span<const NoiseClip> pool, SnrDb snr, const TrainSetup& setup,
                       Rng stream) {
  if (snr.is_infinite())
    return make_clean_eval_set(utterances, setup.stft, setup.amplitude_floor);
  NoisyTestSynth synth(std::vector<Utterance>(utterances.begin(), utterances.end()),
                       std::vector<NoiseClip>(pool.begin(), pool.end()), stream);
  return synth.build(snr, setup.stft, setup.amplitude_floor);
}

}  // namespace

double error_rate(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw InvalidInputError("error_rate: prediction/label length mismatch");
  if (predictions.empty()) throw InvalidInputError("error_rate: empty input");
  int wrong = 0;
  for (size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] != labels[i]) ++wrong;
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(predictions.size());
}

EvalResult evaluate(const RecognizerParams& recognizer, const EvalSet& eval_set,
                    const std::string& condition) {
  if (eval_set.features.empty()) throw InvalidInputError("evaluate: empty evaluation set");
  std::vector<int> predictions;
  predictions.reserve(eval_set.features.size());
  for (const LogMagSpectrogram& features : eval_set.features)
    predictions.push_back(argmax_class(recognizer_forward(recognizer, features)));
  return EvalResult{condition, eval_set.snr, error_rate(predictions, eval_set.labels),
                    static_cast<int>(eval_set.features.size())};
}

std::vector<EvalResult> snr_grid_eval(const RecognizerParams& recognizer,
                                      std::span<const EvalSet> noisy_sets,
                                      const std::string& condition) {
  std::vector<EvalResult> results;
  results.reserve(noisy_sets.size());
  for (const EvalSet& set : noisy_sets) results.push_back(evaluate(recognizer, set, condition));
  return results;
}

SweepResult noiseaug_snr_sweep(const DatasetSplit& data, std::span<const SnrDb> grid,
                               const TrainSetup& setup, SnrDb dev_eval_snr) {
  if (grid.empty()) throw InvalidInputError("noiseaug_snr_sweep: empty grid");

  BaselineResult baseline = train_baseline(data.speech, setup);
  const EvalSet dev_set =
      sweep_eval_set(data.speech.dev, data.noise.train, dev_eval_snr, setup,
                     Rng(setup.seed).substream("sweep-dev-synth"));

  SweepResult result;
  double best_error = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    const SnrDb snr = grid[i];
    RecognizerParams model =
        snr.is_infinite()
            ? baseline.params
            : train_recognizer_conventional(baseline.params, data.speech, data.noise.train,
                                            snr, setup)
                  .params;
    EvalResult row = evaluate(model, dev_set, "noiseaug dev");
    row.snr = snr;  // report the training SNR, not the dev condition
    if (setup.progress)
      *setup.progress << "sweep snr=" << format_snr(snr)
                      << " dev_err=" << row.error_rate_percent << "%" << std::endl;
    result.rows.push_back(row);
    // Strict improvement only: on ties the earlier (higher-SNR) entry wins,
    // provided the grid is ordered from +inf downward.
    if (row.error_rate_percent < best_error) {
      best_error = row.error_rate_percent;
      result.best_index = i;
      result.best_params = to_tensors(model);
    }
  }
  return result;
}

SweepResult binarize_q_sweep(const GeneratorParams& frozen_generator,
                             const RecognizerParams& baseline, const DatasetSplit& data,
                             std::span<const double> q_grid, const TrainSetup& setup,
                             SnrDb dev_eval_snr, SnrDb test_eval_snr) {
  if (q_grid.empty()) throw InvalidInputError("binarize_q_sweep: empty q grid");

  const EvalSet dev_set =
      sweep_eval_set(data.speech.dev, data.noise.train, dev_eval_snr, setup,
                     Rng(setup.seed).substream("sweep-dev-synth"));
  const EvalSet test_set =
      sweep_eval_set(data.speech.test, data.noise.test, test_eval_snr, setup,
                     Rng(setup.seed).substream("sweep-test-synth"));

  SweepResult result;
  double best_error = std::numeric_limits<double>::infinity();
  for (double q : q_grid) {
    TrainSetup q_setup = setup;
    q_setup.policy.kind = PolicyKind::importantaug_binarized;
    q_setup.policy.q_percent = q;
    RetrainResult model = train_recognizer_importantaug(frozen_generator, baseline,
                                                        data.speech, data.noise.train,
                                                        q_setup);
    char label[48];
    std::snprintf(label, sizeof(label), "q=%.6g", q);
    EvalResult dev_row = evaluate(model.params, dev_set, std::string(label) + " dev");
    EvalResult test_row = evaluate(model.params, test_set, std::string(label) + " test");
    dev_row.snr = setup.policy.snr;
    test_row.snr = setup.policy.snr;
    if (setup.progress)
      *setup.progress << "sweep q=" << q << " dev_err=" << dev_row.error_rate_percent
                      << "% test_err=" << test_row.error_rate_percent << "%" << std::endl;
    result.rows.push_back(dev_row);
    if (dev_row.error_rate_percent < best_error) {
      best_error = dev_row.error_rate_percent;
      result.best_index = result.rows.size() - 1;
      result.best_params = to_tensors(model.params);
    }
    result.rows.push_back(test_row);
  }
  return result;
}

void export_mask_image(const Mask& mask, const std::filesystem::path& path) {
  const auto rows = static_cast<int>(mask.values.rows());
  const auto cols = static_cast<int>(mask.values.cols());
  if (rows < 1 || cols < 1) throw InvalidInputError("export_mask_image: empty mask");
  GrayImage image;
  image.width = cols;
  image.height = rows;
  image.pixels.resize(static_cast<size_t>(rows) * static_cast<size_t>(cols));
  for (int f = 0; f < rows; ++f) {
    // bin 0 renders at the bottom of the image
    const int image_row = rows - 1 - f;
    for (int t = 0; t < cols; ++t) {
      const double v = std::clamp(mask.values(f, t), 0.0, 1.0);
      image.pixels[static_cast<size_t>(image_row) * static_cast<size_t>(cols) +
                   static_cast<size_t>(t)] = static_cast<uint8_t>(std::llround(255.0 * v));
    }
  }
  write_png_gray8(path, image);
}

void emit_table(std::span<const EvalResult> results, const std::filesystem::path& path) {
  if (results.empty()) throw InvalidInputError("emit_table: no results");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write table '" + path.string() + "'");
  out << "condition,snr_db,error_rate_percent,n\n";
  char line[160];
  for (const EvalResult& r : results) {
    std::snprintf(line, sizeof(line), "%s,%s,%.2f,%d\n", r.condition.c_str(),
                  format_snr(r.snr).c_str(), r.error_rate_percent, r.n_examples);
    out << line;
  }
  if (!out) throw DataError("write failed for table '" + path.string() + "'");
}

std::vector<EvalResult> parse_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open table '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "condition,snr_db,error_rate_percent,n")
    throw DataError("table '" + path.string() + "': unexpected header");
  std::vector<EvalResult> results;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string condition, snr, error, n;
    if (!std::getline(ss, condition, ',') || !std::getline(ss, snr, ',') ||
        !std::getline(ss, error, ',') || !std::getline(ss, n))
      throw DataError("table '" + path.string() + "': malformed row '" + line + "'");
    results.push_back(EvalResult{condition, parse_snr(snr), std::stod(error), std::stoi(n)});
  }
  return results;
}

}  // namespace importantaug
