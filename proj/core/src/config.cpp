// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/config.hpp"

#include <fstream>

#include <json.hpp>

namespace importantaug {

namespace {

using nlohmann::json;

json snr_to_json(SnrDb snr) {
  if (snr.is_infinite()) return json("inf");
  return json(snr.db);
}

SnrDb snr_from_json(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return SnrDb::infinite();
    throw ConfigError(path + ": expected a number or \"inf\", got \"" + s + "\"");
  }
  if (j.is_number()) return SnrDb(j.get<double>());
  throw ConfigError(path + ": expected a number or \"inf\"");
}

json defaults_json() {
  const SweepConfig sweep_defaults;
  json noiseaug_grid = json::array({"inf"});
  for (int v = 40; v >= -10; v -= 5) noiseaug_grid.push_back(v);

  return json{
      {"seed", 1234},
      {"output_dir", "out"},
      {"threads", 1},
      {"stft",
       {{"sample_rate_hz", 16000},
        {"window_length", 512},
        {"hop_length", 128},
        {"centered", true}}},
      {"features", {{"amplitude_floor", 1e-8}}},
      {"loss", {{"lambda_r", 1.0}, {"lambda_e", 3.0}, {"lambda_f", 3.0}, {"lambda_t", 3.0}}},
      {"policy",
       {{"kind", "importantaug"},
        {"snr_db", -12.5},
        {"roll_extent", 30},
        {"null_probability", 0.5},
        {"q_percent", 10.0}}},
      {"optim",
       {{"initial_lr", 0.001},
        {"halve_every_epochs", 20},
        {"batch_size", 256},
        {"max_epochs", 200},
        {"patience", 30},
        {"adam_beta1", 0.9},
        {"adam_beta2", 0.999},
        {"adam_eps", 1e-8}}},
      {"data",
       {{"speech_root", ""},
        {"dev_list", ""},
        {"test_list", ""},
        {"noise_root", ""},
        {"noise_train_fraction", 0.8},
        {"long_noise_file", ""}}},
      {"eval", {{"snr_grid_db", json::array({-12.5, -10, 0, 10, 20, 30, 40})}}},
      {"sweep",
       {{"noiseaug_snr_grid_db", noiseaug_grid},
        {"q_grid_percent", json::array({70, 50, 40, 20, 10, 5, 1, 0})},
        {"dev_eval_snr_db", "inf"},
        {"test_eval_snr_db", "inf"}}},
      {"toy",
       {{"root", "toy_corpus"},
        {"n_classes", 4},
        {"n_per_class", 150},
        {"train_fraction", 0.7},
        {"dev_fraction", 0.15},
        {"n_noise_clips", 16},
        {"cue_amplitude", 0.25},
        {"background_level", 0.02},
        {"distractor_freq_hz", 500.0},
        {"distractor_amplitude", 0.1},
        {"cue_freqs_hz", json::array()},
        {"cue_half_width_bins", 3}}},
  };
}

// Layers `patch` over `base`, requiring every patch key to already exist.
void merge_checked(json& base, const json& patch, const std::string& path) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key_path = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key()))
      throw ConfigError("unknown config key '" + key_path + "'");
    if (base[it.key()].is_object() && it.value().is_object()) {
      merge_checked(base[it.key()], it.value(), key_path);
    } else if (base[it.key()].is_object() != it.value().is_object()) {
      throw ConfigError("config key '" + key_path + "' has the wrong structure");
    } else {
      base[it.key()] = it.value();
    }
  }
}

void apply_override(json& base, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key.path=value");
  const std::string key_path = assignment.substr(0, eq);
  const std::string value_text = assignment.substr(eq + 1);

  json* node = &base;
  size_t start = 0;
  std::vector<std::string> parts;
  while (true) {
    const size_t dot = key_path.find('.', start);
    parts.push_back(key_path.substr(start, dot == std::string::npos ? dot : dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object())
      throw ConfigError("override '" + assignment + "': unknown section '" + parts[i] + "'");
    node = &(*node)[parts[i]];
  }
  const std::string& leaf = parts.back();
  if (!node->contains(leaf))
    throw ConfigError("override '" + assignment + "': unknown key '" + leaf + "'");

  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::exception&) {
    value = json(value_text);  // plain strings may be unquoted on the command line
  }
  if ((*node)[leaf].is_object())
    throw ConfigError("override '" + assignment + "': cannot replace a whole section");
  (*node)[leaf] = value;
}

template <typename T>
T field(const json& j, const std::string& section, const std::string& key) {
  try {
    return j.at(section).at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + section + "." + key + "': " + e.what());
  }
}

RunConfig from_json_object(const json& j) {
  RunConfig c;
  try {
    c.seed = j.at("seed").get<uint64_t>();
    c.output_dir = j.at("output_dir").get<std::string>();
    c.threads = j.at("threads").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config root field: ") + e.what());
  }

  c.stft.sample_rate_hz = field<int>(j, "stft", "sample_rate_hz");
  c.stft.window_length = field<int>(j, "stft", "window_length");
  c.stft.hop_length = field<int>(j, "stft", "hop_length");
  c.stft.centered = field<bool>(j, "stft", "centered");
  c.amplitude_floor = field<double>(j, "features", "amplitude_floor");

  c.loss.lambda_r = field<double>(j, "loss", "lambda_r");
  c.loss.lambda_e = field<double>(j, "loss", "lambda_e");
  c.loss.lambda_f = field<double>(j, "loss", "lambda_f");
  c.loss.lambda_t = field<double>(j, "loss", "lambda_t");

  c.policy.kind = policy_kind_from_string(field<std::string>(j, "policy", "kind"));
  c.policy.snr = snr_from_json(j.at("policy").at("snr_db"), "policy.snr_db");
  c.policy.roll_extent = field<int>(j, "policy", "roll_extent");
  c.policy.null_probability = field<double>(j, "policy", "null_probability");
  c.policy.q_percent = field<double>(j, "policy", "q_percent");

  c.optim.initial_lr = field<double>(j, "optim", "initial_lr");
  c.optim.halve_every_epochs = field<int>(j, "optim", "halve_every_epochs");
  c.optim.batch_size = field<int>(j, "optim", "batch_size");
  c.optim.max_epochs = field<int>(j, "optim", "max_epochs");
  c.optim.patience = field<int>(j, "optim", "patience");
  c.optim.adam_beta1 = field<double>(j, "optim", "adam_beta1");
  c.optim.adam_beta2 = field<double>(j, "optim", "adam_beta2");
  c.optim.adam_eps = field<double>(j, "optim", "adam_eps");

  c.data.speech_root = field<std::string>(j, "data", "speech_root");
  c.data.dev_list = field<std::string>(j, "data", "dev_list");
  c.data.test_list = field<std::string>(j, "data", "test_list");
  c.data.noise_root = field<std::string>(j, "data", "noise_root");
  c.data.noise_train_fraction = field<double>(j, "data", "noise_train_fraction");
  c.data.long_noise_file = field<std::string>(j, "data", "long_noise_file");

  c.eval.snr_grid.clear();
  for (const auto& entry : j.at("eval").at("snr_grid_db"))
    c.eval.snr_grid.push_back(snr_from_json(entry, "eval.snr_grid_db"));

  c.sweep.noiseaug_snr_grid.clear();
  for (const auto& entry : j.at("sweep").at("noiseaug_snr_grid_db"))
    c.sweep.noiseaug_snr_grid.push_back(snr_from_json(entry, "sweep.noiseaug_snr_grid_db"));
  c.sweep.q_grid_percent = j.at("sweep").at("q_grid_percent").get<std::vector<double>>();
  c.sweep.dev_eval_snr = snr_from_json(j.at("sweep").at("dev_eval_snr_db"),
                                       "sweep.dev_eval_snr_db");
  c.sweep.test_eval_snr = snr_from_json(j.at("sweep").at("test_eval_snr_db"),
                                        "sweep.test_eval_snr_db");

  c.toy.root = field<std::string>(j, "toy", "root");
  c.toy.toy.n_classes = field<int>(j, "toy", "n_classes");
  c.toy.toy.n_per_class = field<int>(j, "toy", "n_per_class");
  c.toy.toy.train_fraction = field<double>(j, "toy", "train_fraction");
  c.toy.toy.dev_fraction = field<double>(j, "toy", "dev_fraction");
  c.toy.toy.n_noise_clips = field<int>(j, "toy", "n_noise_clips");
  c.toy.toy.cue_amplitude = field<double>(j, "toy", "cue_amplitude");
  c.toy.toy.background_level = field<double>(j, "toy", "background_level");
  c.toy.toy.distractor_freq_hz = field<double>(j, "toy", "distractor_freq_hz");
  c.toy.toy.distractor_amplitude = field<double>(j, "toy", "distractor_amplitude");
  c.toy.toy.cue_freqs_hz = j.at("toy").at("cue_freqs_hz").get<std::vector<double>>();
  c.toy.toy.cue_half_width_bins = field<int>(j, "toy", "cue_half_width_bins");

  c.validate();
  return c;
}

json to_json_object(const RunConfig& c) {
  json j = defaults_json();
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  j["stft"]["sample_rate_hz"] = c.stft.sample_rate_hz;
  j["stft"]["window_length"] = c.stft.window_length;
  j["stft"]["hop_length"] = c.stft.hop_length;
  j["stft"]["centered"] = c.stft.centered;
  j["features"]["amplitude_floor"] = c.amplitude_floor;
  j["loss"]["lambda_r"] = c.loss.lambda_r;
  j["loss"]["lambda_e"] = c.loss.lambda_e;
  j["loss"]["lambda_f"] = c.loss.lambda_f;
  j["loss"]["lambda_t"] = c.loss.lambda_t;
  j["policy"]["kind"] = to_string(c.policy.kind);
  j["policy"]["snr_db"] = snr_to_json(c.policy.snr);
  j["policy"]["roll_extent"] = c.policy.roll_extent;
  j["policy"]["null_probability"] = c.policy.null_probability;
  j["policy"]["q_percent"] = c.policy.q_percent;
  j["optim"]["initial_lr"] = c.optim.initial_lr;
  j["optim"]["halve_every_epochs"] = c.optim.halve_every_epochs;
  j["optim"]["batch_size"] = c.optim.batch_size;
  j["optim"]["max_epochs"] = c.optim.max_epochs;
  j["optim"]["patience"] = c.optim.patience;
  j["optim"]["adam_beta1"] = c.optim.adam_beta1;
  j["optim"]["adam_beta2"] = c.optim.adam_beta2;
  j["optim"]["adam_eps"] = c.optim.adam_eps;
  j["data"]["speech_root"] = c.data.speech_root;
  j["data"]["dev_list"] = c.data.dev_list;
  j["data"]["test_list"] = c.data.test_list;
  j["data"]["noise_root"] = c.data.noise_root;
  j["data"]["noise_train_fraction"] = c.data.noise_train_fraction;
  j["data"]["long_noise_file"] = c.data.long_noise_file;
  j["eval"]["snr_grid_db"] = json::array();
  for (SnrDb snr : c.eval.snr_grid) j["eval"]["snr_grid_db"].push_back(snr_to_json(snr));
  j["sweep"]["noiseaug_snr_grid_db"] = json::array();
  for (SnrDb snr : c.sweep.noiseaug_snr_grid)
    j["sweep"]["noiseaug_snr_grid_db"].push_back(snr_to_json(snr));
  j["sweep"]["q_grid_percent"] = c.sweep.q_grid_percent;
  j["sweep"]["dev_eval_snr_db"] = snr_to_json(c.sweep.dev_eval_snr);
  j["sweep"]["test_eval_snr_db"] = snr_to_json(c.sweep.test_eval_snr);
  j["toy"]["root"] = c.toy.root;
  j["toy"]["n_classes"] = c.toy.toy.n_classes;
  j["toy"]["n_per_class"] = c.toy.toy.n_per_class;
  j["toy"]["train_fraction"] = c.toy.toy.train_fraction;
  j["toy"]["dev_fraction"] = c.toy.toy.dev_fraction;
  j["toy"]["n_noise_clips"] = c.toy.toy.n_noise_clips;
  j["toy"]["cue_amplitude"] = c.toy.toy.cue_amplitude;
  j["toy"]["background_level"] = c.toy.toy.background_level;
  j["toy"]["distractor_freq_hz"] = c.toy.toy.distractor_freq_hz;
  j["toy"]["distractor_amplitude"] = c.toy.toy.distractor_amplitude;
  j["toy"]["cue_freqs_hz"] = c.toy.toy.cue_freqs_hz;
  j["toy"]["cue_half_width_bins"] = c.toy.toy.cue_half_width_bins;
  return j;
}

}  // namespace

void RunConfig::validate() const {
  stft.validate();
  if (!(amplitude_floor > 0.0))
    throw ConfigError("features.amplitude_floor must be positive");
  loss.validate();
  policy.validate();
  optim.validate();
  if (!(data.noise_train_fraction >= 0.0 && data.noise_train_fraction <= 1.0))
    throw ConfigError("data.noise_train_fraction must lie in [0, 1]");
  if (eval.snr_grid.empty()) throw ConfigError("eval.snr_grid_db must not be empty");
  if (sweep.noiseaug_snr_grid.empty())
    throw ConfigError("sweep.noiseaug_snr_grid_db must not be empty");
  if (sweep.q_grid_percent.empty())
    throw ConfigError("sweep.q_grid_percent must not be empty");
  for (double q : sweep.q_grid_percent)
    if (!(q >= 0.0 && q <= 100.0))
      throw ConfigError("sweep.q_grid_percent entries must lie in [0, 100]");
  if (threads < 0) throw ConfigError("threads must be >= 0 (0 = hardware concurrency)");
  toy.toy.validate();
  if (toy.root.empty()) throw ConfigError("toy.root must not be empty");
}

TrainSetup RunConfig::train_setup() const {
  TrainSetup setup;
  setup.arch.n_freq = stft.num_bins();
  setup.stft = stft;
  setup.amplitude_floor = amplitude_floor;
  setup.optim = optim;
  setup.loss = loss;
  setup.policy = policy;
  setup.seed = seed;
  setup.threads = threads;
  return setup;
}

RunConfig default_config() { return from_json_object(defaults_json()); }

RunConfig load_config(const std::filesystem::path& path,
                      std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json file_json;
  try {
    file_json = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!file_json.is_object()) throw ConfigError("config root must be a JSON object");

  json merged = defaults_json();
  merge_checked(merged, file_json, "");
  for (const std::string& assignment : overrides) apply_override(merged, assignment);
  return from_json_object(merged);
}

std::string config_to_json(const RunConfig& config) {
  return to_json_object(config).dump(2) + "\n";
}

RunConfig config_from_json(const std::string& json_text) {
  json parsed;
  try {
    parsed = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("embedded config is not valid JSON: ") + e.what());
  }
  json merged = defaults_json();
  merge_checked(merged, parsed, "");
  return from_json_object(merged);
}

}  // namespace importantaug
