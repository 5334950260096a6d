// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/training.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <ostream>
#include <thread>

namespace importantaug {

namespace {

// Items are processed in fixed chunks of 8 and chunk partials are combined
// in chunk order, so the result is bitwise independent of the worker count.
constexpr size_t kGradChunk = 8;
// Above this many utterances, features are recomputed per epoch instead of
// cached (keeps full-corpus runs inside commodity RAM).
constexpr size_t kMaxCachedItems = 4000;

void add_into(TensorMap& acc, const TensorMap& inc) {
  if (acc.empty()) {
    acc = inc;
    return;
  }
  auto a = acc.begin();
  auto b = inc.begin();
  for (; a != acc.end() && b != inc.end(); ++a, ++b) {
    if (a->first != b->first)
      throw InvalidInputError("gradient accumulation: tensor name mismatch");
    a->second += b->second;
  }
  if (a != acc.end() || b != inc.end())
    throw InvalidInputError("gradient accumulation: tensor count mismatch");
}

using ItemFn = std::function<std::pair<double, TensorMap>(size_t item)>;

std::pair<double, TensorMap> chunked_mean_gradients(size_t n_items, int threads,
                                                    const ItemFn& item_fn) {
  if (n_items == 0) throw InvalidInputError("gradient batch is empty");
  const size_t n_chunks = (n_items + kGradChunk - 1) / kGradChunk;
  std::vector<std::pair<double, TensorMap>> partials(n_chunks);

  auto run_chunk = [&](size_t chunk) {
    double loss_sum = 0.0;
    TensorMap grad_sum;
    const size_t begin = chunk * kGradChunk;
    const size_t end = std::min(begin + kGradChunk, n_items);
    for (size_t i = begin; i < end; ++i) {
      auto [loss, grads] = item_fn(i);
      loss_sum += loss;
      add_into(grad_sum, grads);
    }
    partials[chunk] = {loss_sum, std::move(grad_sum)};
  };

  const int max_workers = threads <= 0
                              ? static_cast<int>(std::thread::hardware_concurrency())
                              : threads;
  const size_t n_workers =
      std::min<size_t>(std::max(1, max_workers), n_chunks);
  if (n_workers <= 1) {
    for (size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (size_t w = 0; w < n_workers; ++w)
      pool.emplace_back([&] {
        for (size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) run_chunk(c);
      });
    for (auto& t : pool) t.join();
  }

  double loss_sum = 0.0;
  TensorMap grad_sum;
  for (auto& [l, g] : partials) {
    loss_sum += l;
    add_into(grad_sum, g);
  }
  const double inv = 1.0 / static_cast<double>(n_items);
  for (auto& [name, g] : grad_sum) g *= inv;
  return {loss_sum * inv, std::move(grad_sum)};
}

// Mean cross-entropy and error rate of a recognizer over a feature set.
std::pair<double, double> recognizer_dev_metrics(const RecognizerParams& params,
                                                 std::span<const LogMagSpectrogram> features,
                                                 std::span<const int> labels) {
  double ce_sum = 0.0;
  int wrong = 0;
  for (size_t i = 0; i < features.size(); ++i) {
    const ClassDistribution pred = recognizer_forward(params, features[i]);
    ce_sum += cross_entropy(pred, labels[i]);
    if (argmax_class(pred) != labels[i]) ++wrong;
  }
  const double n = static_cast<double>(features.size());
  return {ce_sum / n, 100.0 * static_cast<double>(wrong) / n};
}

struct LoopCallbacks {
  std::function<void(int epoch)> on_epoch_start;
  // (mean loss, mean grads) over the given training items
  std::function<std::pair<double, TensorMap>(const TensorMap& params,
                                             std::span<const size_t> items)>
      batch_grads;
  // (monitored dev loss, dev error percent)
  std::function<std::pair<double, double>(const TensorMap& params)> dev_eval;
};

TrainLog run_training(TrainState& state, size_t n_train, const TrainSetup& setup,
                      const LoopCallbacks& cb, TensorMap& best_params_out) {
  const OptimConfig& optim = setup.optim;
  optim.validate();
  Rng root(setup.seed);

  TrainLog log;
  best_params_out = state.params;
  for (int epoch = 0; epoch < optim.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    state.epoch = epoch;
    const double lr = lr_at(epoch, optim);
    if (cb.on_epoch_start) cb.on_epoch_start(epoch);

    std::vector<size_t> order(n_train);
    std::iota(order.begin(), order.end(), size_t{0});
    Rng shuffle_stream = root.substream("shuffle", static_cast<uint64_t>(epoch));
    shuffle_stream.shuffle(order);

    double loss_sum = 0.0;
    size_t seen = 0;
    const auto batch_size = static_cast<size_t>(optim.batch_size);
    for (size_t start = 0; start < order.size(); start += batch_size) {
      const size_t len = std::min(batch_size, order.size() - start);
      std::span<const size_t> batch(order.data() + start, len);
      auto [loss, grads] = cb.batch_grads(state.params, batch);
      adam_step(state, grads, lr, optim);
      loss_sum += loss * static_cast<double>(len);
      seen += len;
    }

    const auto [dev_loss, dev_err] = cb.dev_eval(state.params);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log.epochs.push_back(
        {epoch, lr, loss_sum / static_cast<double>(seen), dev_loss, dev_err, wall});
    if (setup.progress) {
      char line[160];
      std::snprintf(line, sizeof(line),
                    "epoch %3d  lr %.6g  train %.6f  dev %.6f  dev_err %.2f%%  %.1fs", epoch,
                    lr, loss_sum / static_cast<double>(seen), dev_loss, dev_err, wall);
      *setup.progress << line << std::endl;
    }

    if (dev_loss < state.best_dev_loss) {
      state.best_dev_loss = dev_loss;
      state.epochs_since_improvement = 0;
      log.best_epoch = epoch;
      log.best_dev_loss = dev_loss;
      best_params_out = state.params;
    } else {
      ++state.epochs_since_improvement;
    }
    if (state.epochs_since_improvement >= optim.patience) break;
  }
  return log;
}

// Clean dB features with an optional cache for small corpora.
class CleanFeatures {
 public:
  CleanFeatures(std::span<const Utterance> utterances, const StftConfig& stft_cfg,
                double amplitude_floor)
      : utterances_(utterances), stft_cfg_(stft_cfg), floor_(amplitude_floor) {
    if (utterances.size() <= kMaxCachedItems) {
      cache_.reserve(utterances.size());
      for (const Utterance& u : utterances)
        cache_.push_back(log_magnitude(stft(u.samples, stft_cfg_), floor_));
    }
  }

  LogMagSpectrogram get(size_t i) const {
    if (!cache_.empty()) return cache_[i];
    return log_magnitude(stft(utterances_[i].samples, stft_cfg_), floor_);
  }

  std::vector<LogMagSpectrogram> all() const {
    std::vector<LogMagSpectrogram> out;
    out.reserve(utterances_.size());
    for (size_t i = 0; i < utterances_.size(); ++i) out.push_back(get(i));
    return out;
  }

 private:
  std::span<const Utterance> utterances_;
  StftConfig stft_cfg_;
  double floor_;
  std::vector<LogMagSpectrogram> cache_;
};

std::vector<int> labels_of(std::span<const Utterance> utterances) {
  std::vector<int> labels;
  labels.reserve(utterances.size());
  for (const Utterance& u : utterances) labels.push_back(u.label);
  return labels;
}

std::vector<Utterance> gather(std::span<const Utterance> all, std::span<const size_t> idx) {
  std::vector<Utterance> out;
  out.reserve(idx.size());
  for (size_t i : idx) out.push_back(all[i]);
  return out;
}

// Shared batch-gradient body for every cross-entropy recognizer update.
std::pair<double, TensorMap> recognizer_ce_gradients(
    const TensorMap& params, const ArchConfig& arch,
    std::span<const LogMagSpectrogram> features, std::span<const int> labels, int threads) {
  const RecognizerParams rec = recognizer_from_tensors(params, arch);
  return chunked_mean_gradients(
      features.size(), threads, [&](size_t i) -> std::pair<double, TensorMap> {
        autodiff::Graph g;
        RecognizerVars vars = make_recognizer_vars(g, rec, /*trainable=*/true);
        RecognizerOutputs out = build_recognizer(g, vars, g.constant(features[i].values));
        autodiff::Var loss = g.neg(g.pick(out.log_probs, labels[i], 0));
        g.backward(loss);
        return {g.scalar_value(loss), recognizer_grad_tensors(g, vars)};
      });
}

void check_dataset(const SpeechDataset& data, const char* who) {
  if (data.train.empty())
    throw InvalidInputError(std::string(who) + ": empty training set");
  if (data.dev.empty())
    throw InvalidInputError(std::string(who) +
                            ": empty dev set (early stopping needs one)");
}

ArchConfig resolved_arch(const TrainSetup& setup, const SpeechDataset& data) {
  ArchConfig arch = setup.arch;
  arch.n_freq = setup.stft.num_bins();
  arch.n_classes = static_cast<int>(data.words.size());
  arch.validate();
  return arch;
}

}  // namespace

void LossWeights::validate() const {
  for (double v : {lambda_r, lambda_e, lambda_f, lambda_t})
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ConfigError("loss weights must be finite and >= 0");
}

void OptimConfig::validate() const {
  if (!(initial_lr > 0.0)) throw ConfigError("optim: initial_lr must be positive");
  if (halve_every_epochs < 1) throw ConfigError("optim: halve_every_epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("optim: batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("optim: max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("optim: patience must be >= 1");
  if (patience > max_epochs) throw ConfigError("optim: patience must not exceed max_epochs");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw ConfigError("optim: Adam betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("optim: adam_eps must be positive");
}

TrainState make_train_state(TensorMap params) {
  TrainState state;
  for (const auto& [name, value] : params) {
    state.m[name] = Eigen::ArrayXXd::Zero(value.rows(), value.cols());
    state.v[name] = Eigen::ArrayXXd::Zero(value.rows(), value.cols());
  }
  state.params = std::move(params);
  return state;
}

double total_loss(const ClassDistribution& pred, int label, const Mask& mask,
                  const LossWeights& w) {
  w.validate();
  const double tf = static_cast<double>(mask.values.rows() * mask.values.cols());
  double value = 0.0;
  if (w.lambda_r != 0.0) value += w.lambda_r * cross_entropy(pred, label);
  if (w.lambda_e != 0.0) value -= w.lambda_e / tf * mask.values.log().sum();
  if (w.lambda_f != 0.0 && mask.values.rows() >= 2) {
    const Eigen::Index n = mask.values.rows() - 1;
    value += w.lambda_f / tf *
             (mask.values.bottomRows(n) - mask.values.topRows(n)).abs().sum();
  }
  if (w.lambda_t != 0.0 && mask.values.cols() >= 2) {
    const Eigen::Index n = mask.values.cols() - 1;
    value += w.lambda_t / tf *
             (mask.values.rightCols(n) - mask.values.leftCols(n)).abs().sum();
  }
  if (!std::isfinite(value))
    throw NumericError("total_loss: non-finite value (mask with zero entries?)");
  return value;
}

autodiff::Var build_total_loss(autodiff::Graph& g, autodiff::Var log_probs, int label,
                               autodiff::Var mask, const LossWeights& w) {
  w.validate();
  const auto& mv = g.value(mask);
  const double tf = static_cast<double>(mv.rows() * mv.cols());
  autodiff::Var loss = g.constant(Eigen::ArrayXXd::Zero(1, 1));
  if (w.lambda_r != 0.0)
    loss = g.add(loss, g.scale(g.neg(g.pick(log_probs, label, 0)), w.lambda_r));
  if (w.lambda_e != 0.0)
    loss = g.add(loss, g.scale(g.sum(g.log(mask)), -w.lambda_e / tf));
  if (w.lambda_f != 0.0 && mv.rows() >= 2)
    loss = g.add(loss, g.scale(g.sum(g.abs(g.diff_rows(mask))), w.lambda_f / tf));
  if (w.lambda_t != 0.0 && mv.cols() >= 2)
    loss = g.add(loss, g.scale(g.sum(g.abs(g.diff_cols(mask))), w.lambda_t / tf));
  return loss;
}

void adam_step(TrainState& state, const TensorMap& grads, double lr,
               const OptimConfig& cfg) {
  if (grads.size() != state.params.size())
    throw InvalidInputError("adam_step: gradient tensor count mismatch");
  ++state.step;
  const double bias1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(state.step));
  auto g_it = grads.begin();
  for (auto p_it = state.params.begin(); p_it != state.params.end(); ++p_it, ++g_it) {
    if (p_it->first != g_it->first)
      throw InvalidInputError("adam_step: gradient named '" + g_it->first +
                              "' does not match parameter '" + p_it->first + "'");
    const Eigen::ArrayXXd& g = g_it->second;
    if (g.rows() != p_it->second.rows() || g.cols() != p_it->second.cols())
      throw InvalidInputError("adam_step: gradient shape mismatch for '" + p_it->first + "'");
    if (!g.isFinite().all())
      throw NumericError("adam_step: non-finite gradient for '" + p_it->first + "'");
    Eigen::ArrayXXd& m = state.m[p_it->first];
    Eigen::ArrayXXd& v = state.v[p_it->first];
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * g;
    v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * g.square();
    p_it->second -= lr * (m / bias1) / ((v / bias2).sqrt() + cfg.adam_eps);
  }
}

double lr_at(int epoch, const OptimConfig& cfg) {
  if (epoch < 0) throw InvalidInputError("lr_at: negative epoch");
  return cfg.initial_lr * std::pow(0.5, epoch / cfg.halve_every_epochs);
}

void write_train_log(const TrainLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write training log '" + path.string() + "'");
  out << "epoch,lr,train_loss,dev_loss,dev_error_percent,wall_time_s\n";
  char line[200];
  for (const EpochStats& e : log.epochs) {
    std::snprintf(line, sizeof(line), "%d,%.10g,%.10g,%.10g,%.4f,%.3f\n", e.epoch, e.lr,
                  e.train_loss, e.dev_loss, e.dev_error_percent, e.wall_s);
    out << line;
  }
}

BaselineResult train_baseline(const SpeechDataset& data, const TrainSetup& setup) {
  check_dataset(data, "train_baseline");
  const ArchConfig arch = resolved_arch(setup, data);
  const CleanFeatures train_features(data.train, setup.stft, setup.amplitude_floor);
  const CleanFeatures dev_features(data.dev, setup.stft, setup.amplitude_floor);
  const std::vector<LogMagSpectrogram> dev_feats = dev_features.all();
  const std::vector<int> train_labels = labels_of(data.train);
  const std::vector<int> dev_labels = labels_of(data.dev);

  RecognizerParams init = init_params(setup.seed, arch).first;
  TrainState state = make_train_state(to_tensors(init));

  LoopCallbacks cb;
  cb.batch_grads = [&](const TensorMap& params, std::span<const size_t> items) {
    std::vector<LogMagSpectrogram> feats;
    std::vector<int> labels;
    feats.reserve(items.size());
    for (size_t i : items) {
      feats.push_back(train_features.get(i));
      labels.push_back(train_labels[i]);
    }
    return recognizer_ce_gradients(params, arch, feats, labels, setup.threads);
  };
  cb.dev_eval = [&](const TensorMap& params) {
    return recognizer_dev_metrics(recognizer_from_tensors(params, arch), dev_feats,
                                  dev_labels);
  };

  TensorMap best;
  TrainLog log = run_training(state, data.train.size(), setup, cb, best);
  return {recognizer_from_tensors(best, arch), std::move(log)};
}

GeneratorResult train_generator(const RecognizerParams& frozen_recognizer,
                                const SpeechDataset& data,
                                std::span<const NoiseClip> noise_pool,
                                const TrainSetup& setup) {
  check_dataset(data, "train_generator");
  if (noise_pool.empty()) throw DataError("train_generator: empty noise pool");
  const ArchConfig arch = resolved_arch(setup, data);
  if (frozen_recognizer.arch != arch)
    throw InvalidInputError("train_generator: recognizer architecture does not match data");
  setup.loss.validate();
  const SnrDb v = setup.policy.snr;
  Rng root(setup.seed);

  // Stage 1 uses raw masks: rolling and null replacement only apply when
  // re-training the recognizer.
  GeneratorParams init = init_params(setup.seed, arch).second;
  TrainState state = make_train_state(to_tensors(init));

  const bool cache = data.train.size() <= kMaxCachedItems / 2;
  std::vector<ComplexSpectrogram> train_specs;
  if (cache)
    for (const Utterance& u : data.train) train_specs.push_back(stft(u.samples, setup.stft));
  auto train_spec = [&](size_t i) {
    return cache ? train_specs[i] : stft(data.train[i].samples, setup.stft);
  };

  std::vector<ComplexSpectrogram> dev_specs;
  for (const Utterance& u : data.dev) dev_specs.push_back(stft(u.samples, setup.stft));
  // Fixed dev noise pairing, drawn once, reused every epoch.
  Rng dev_noise_stream = root.substream("dev-noise");
  std::vector<ComplexSpectrogram> dev_noise_specs;
  for (size_t i = 0; i < data.dev.size(); ++i) {
    const auto pick = static_cast<size_t>(
        dev_noise_stream.uniform_int(0, static_cast<int64_t>(noise_pool.size()) - 1));
    dev_noise_specs.push_back(stft(noise_pool[pick].samples, setup.stft));
  }
  const std::vector<int> dev_labels = labels_of(data.dev);

  Rng noise_stream = root.substream("noise-draw", 0);

  LoopCallbacks cb;
  cb.on_epoch_start = [&](int epoch) {
    noise_stream = root.substream("noise-draw", static_cast<uint64_t>(epoch));
  };
  cb.batch_grads = [&](const TensorMap& params, std::span<const size_t> items) {
    const GeneratorParams gen = generator_from_tensors(params, arch);
    std::vector<ComplexSpectrogram> speech_specs, noise_specs;
    std::vector<int> labels;
    for (size_t i : items) {
      speech_specs.push_back(train_spec(i));
      const auto pick = static_cast<size_t>(
          noise_stream.uniform_int(0, static_cast<int64_t>(noise_pool.size()) - 1));
      noise_specs.push_back(stft(noise_pool[pick].samples, setup.stft));
      labels.push_back(data.train[i].label);
    }
    const double gain = compute_gain(speech_specs, noise_specs, v);

    return chunked_mean_gradients(
        items.size(), setup.threads, [&](size_t i) -> std::pair<double, TensorMap> {
          autodiff::Graph g;
          GeneratorVars gen_vars = make_generator_vars(g, gen, /*trainable=*/true);
          const LogMagSpectrogram s_tilde =
              log_magnitude(speech_specs[i], setup.amplitude_floor);
          autodiff::Var mask = build_generator(g, gen_vars, g.constant(s_tilde.values));
          autodiff::Var features =
              g.mix_log_magnitude(speech_specs[i].values, noise_specs[i].values, gain,
                                  setup.amplitude_floor, mask);
          RecognizerVars rec_vars =
              make_recognizer_vars(g, frozen_recognizer, /*trainable=*/false);
          RecognizerOutputs out = build_recognizer(g, rec_vars, features);
          autodiff::Var loss =
              build_total_loss(g, out.log_probs, labels[i], mask, setup.loss);
          g.backward(loss);
          return {g.scalar_value(loss), generator_grad_tensors(g, gen_vars)};
        });
  };
  cb.dev_eval = [&](const TensorMap& params) -> std::pair<double, double> {
    const GeneratorParams gen = generator_from_tensors(params, arch);
    const auto batch_size = static_cast<size_t>(setup.optim.batch_size);
    double loss_sum = 0.0;
    int wrong = 0;
    for (size_t start = 0; start < dev_specs.size(); start += batch_size) {
      const size_t len = std::min(batch_size, dev_specs.size() - start);
      std::span<const ComplexSpectrogram> speech(dev_specs.data() + start, len);
      std::span<const ComplexSpectrogram> noise(dev_noise_specs.data() + start, len);
      const double gain = compute_gain(speech, noise, v);
      for (size_t i = 0; i < len; ++i) {
        const LogMagSpectrogram s_tilde = log_magnitude(speech[i], setup.amplitude_floor);
        const Mask mask = generator_forward(gen, s_tilde);
        const LogMagSpectrogram features =
            log_magnitude(mix(speech[i], noise[i], mask, gain), setup.amplitude_floor);
        const ClassDistribution pred = recognizer_forward(frozen_recognizer, features);
        loss_sum += total_loss(pred, dev_labels[start + i], mask, setup.loss);
        if (argmax_class(pred) != dev_labels[start + i]) ++wrong;
      }
    }
    const double n = static_cast<double>(dev_specs.size());
    return {loss_sum / n, 100.0 * static_cast<double>(wrong) / n};
  };

  TensorMap best;
  TrainLog log = run_training(state, data.train.size(), setup, cb, best);
  return {generator_from_tensors(best, arch), std::move(log)};
}

namespace {

// Stage-2 style retraining shared by the mask policies and conventional
// augmentation: cross-entropy on augmented batches, early stopping on clean
// dev cross-entropy, starting from the pretrained baseline.
RetrainResult retrain_recognizer(
    const RecognizerParams& init_recognizer, const SpeechDataset& data,
    const TrainSetup& setup,
    const std::function<void(int epoch)>& on_epoch_start,
    const std::function<AugmentedBatch(std::span<const Utterance> batch)>& make_batch) {
  check_dataset(data, "retrain_recognizer");
  const ArchConfig arch = resolved_arch(setup, data);
  if (init_recognizer.arch != arch)
    throw InvalidInputError("retraining: recognizer architecture does not match data");

  const CleanFeatures dev_features(data.dev, setup.stft, setup.amplitude_floor);
  const std::vector<LogMagSpectrogram> dev_feats = dev_features.all();
  const std::vector<int> dev_labels = labels_of(data.dev);

  TrainState state = make_train_state(to_tensors(init_recognizer));

  LoopCallbacks cb;
  cb.on_epoch_start = on_epoch_start;
  cb.batch_grads = [&](const TensorMap& params, std::span<const size_t> items) {
    const std::vector<Utterance> batch_utts = gather(data.train, items);
    const AugmentedBatch batch = make_batch(batch_utts);
    return recognizer_ce_gradients(params, arch, batch.features, batch.labels,
                                   setup.threads);
  };
  cb.dev_eval = [&](const TensorMap& params) {
    return recognizer_dev_metrics(recognizer_from_tensors(params, arch), dev_feats,
                                  dev_labels);
  };

  TensorMap best;
  TrainLog log = run_training(state, data.train.size(), setup, cb, best);
  return {recognizer_from_tensors(best, arch), std::move(log)};
}

}  // namespace

RetrainResult train_recognizer_importantaug(const GeneratorParams& frozen_generator,
                                            const RecognizerParams& init_recognizer,
                                            const SpeechDataset& data,
                                            std::span<const NoiseClip> noise_pool,
                                            const TrainSetup& setup) {
  setup.policy.validate();
  if (setup.policy.kind != PolicyKind::importantaug &&
      setup.policy.kind != PolicyKind::null_importantaug &&
      setup.policy.kind != PolicyKind::importantaug_binarized)
    throw InvalidInputError(
        "train_recognizer_importantaug: policy must be a mask policy (got " +
        to_string(setup.policy.kind) + ")");
  if (noise_pool.empty())
    throw DataError("train_recognizer_importantaug: empty noise pool");

  Rng root(setup.seed);
  AugmentStreams streams{root.substream("noise-draw", 0), root.substream("roll", 0),
                         root.substream("null-replace", 0)};
  auto on_epoch = [&](int epoch) {
    const auto e = static_cast<uint64_t>(epoch);
    streams = AugmentStreams{root.substream("noise-draw", e), root.substream("roll", e),
                             root.substream("null-replace", e)};
  };
  auto make_batch = [&](std::span<const Utterance> batch) {
    return importantaug_batch(batch, frozen_generator, noise_pool, setup.policy, setup.stft,
                              setup.amplitude_floor, streams);
  };
  return retrain_recognizer(init_recognizer, data, setup, on_epoch, make_batch);
}

RetrainResult train_recognizer_conventional(const RecognizerParams& init_recognizer,
                                            const SpeechDataset& data,
                                            std::span<const NoiseClip> noise_pool, SnrDb snr,
                                            const TrainSetup& setup) {
  if (!snr.is_infinite() && noise_pool.empty())
    throw DataError("train_recognizer_conventional: empty noise pool");
  Rng root(setup.seed);
  Rng noise_stream = root.substream("noise-draw", 0);
  auto on_epoch = [&](int epoch) {
    noise_stream = root.substream("noise-draw", static_cast<uint64_t>(epoch));
  };
  auto make_batch = [&](std::span<const Utterance> batch) {
    return conventional_batch(batch, noise_pool, snr, setup.stft, setup.amplitude_floor,
                              noise_stream);
  };
  return retrain_recognizer(init_recognizer, data, setup, on_epoch, make_batch);
}

}  // namespace importantaug
