// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "importantaug/augment.hpp"
#include "importantaug/dataset.hpp"
#include "importantaug/signal.hpp"
#include "importantaug/training.hpp"

namespace importantaug {

struct DataConfig {
  std::string speech_root;
  std::string dev_list;
  std::string test_list;
  std::string noise_root;
  double noise_train_fraction = 0.8;
  std::string long_noise_file;  // out-of-domain evaluation source
};

struct EvalConfig {
  std::vector<SnrDb> snr_grid{SnrDb(-12.5), SnrDb(-10), SnrDb(0), SnrDb(10),
                              SnrDb(20),    SnrDb(30),  SnrDb(40)};
};

struct SweepConfig {
  std::vector<SnrDb> noiseaug_snr_grid;     // defaults to inf, 40, 35, ..., -10
  std::vector<double> q_grid_percent{70, 50, 40, 20, 10, 5, 1, 0};
  SnrDb dev_eval_snr = SnrDb::infinite();   // +inf: clean dev selection
  SnrDb test_eval_snr = SnrDb::infinite();
};

// Additional ToyConfig field: where make-toy materializes the corpus.
struct ToyRunConfig {
  ToyConfig toy;
  std::string root = "toy_corpus";
};

// Every knob of the pipeline in one serializable record. Loaded from JSON
// with defaults filled in, unknown keys rejected, dotted-key overrides
// applied, and ranges checked before any work starts.
struct RunConfig {
  uint64_t seed = 1234;
  std::string output_dir = "out";
  int threads = 1;
  StftConfig stft;
  double amplitude_floor = 1e-8;
  LossWeights loss;
  AugmentPolicy policy;
  OptimConfig optim;
  DataConfig data;
  EvalConfig eval;
  SweepConfig sweep;
  ToyRunConfig toy;

  void validate() const;  // throws ConfigError naming the offending field

  TrainSetup train_setup() const;
};

RunConfig default_config();

// Reads a JSON config file, layers it over the defaults (unknown keys are
// errors), applies overrides of the form "a.b.c=value" and validates.
RunConfig load_config(const std::filesystem::path& path,
                      std::span<const std::string> overrides = {});

// Canonical JSON serialization (sorted keys, round-trips through
// config_from_json).
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& json_text);

}  // namespace importantaug
