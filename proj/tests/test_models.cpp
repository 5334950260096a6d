// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "importantaug/models.hpp"
#include "importantaug/training.hpp"

using namespace importantaug;
using testutil::random_array;
using testutil::relative_error;

namespace {

LogMagSpectrogram random_features(Rng& rng, int n_freq, int n_frames) {
  return LogMagSpectrogram{random_array(rng, n_freq, n_frames, -80.0, 20.0)};
}

ArchConfig small_arch() {
  ArchConfig arch;
  arch.n_freq = 5;
  arch.n_classes = 3;
  return arch;
}

}  // namespace

TEST_CASE("recognizer output is a normalized 35-way distribution") {
  auto [rec, gen] = init_params(42);
  Rng rng(1);
  const LogMagSpectrogram features = random_features(rng, 257, 126);
  const ClassDistribution pred = recognizer_forward(rec, features);
  CHECK(pred.log_probs.size() == 35);
  CHECK(pred.log_probs.exp().sum() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("zero head weights produce the uniform distribution") {
  auto [rec, gen] = init_params(42);
  rec.head_weight.setZero();
  rec.head_bias.setZero();
  Rng rng(2);
  const ClassDistribution pred = recognizer_forward(rec, random_features(rng, 257, 126));
  for (int i = 0; i < pred.log_probs.size(); ++i)
    CHECK(std::exp(pred.log_probs[i]) == doctest::Approx(1.0 / 35.0).epsilon(1e-9));
}

TEST_CASE("recognizer and generator forwards are byte-stable") {
  auto [rec, gen] = init_params(7);
  Rng rng(3);
  const LogMagSpectrogram features = random_features(rng, 257, 126);
  const ClassDistribution a = recognizer_forward(rec, features);
  const ClassDistribution b = recognizer_forward(rec, features);
  CHECK((a.log_probs == b.log_probs).all());

  const Mask ma = generator_forward(gen, features);
  const Mask mb = generator_forward(gen, features);
  CHECK((ma.values == mb.values).all());
}

TEST_CASE("recognizer rejects mismatched feature shapes") {
  auto [rec, gen] = init_params(7);
  Rng rng(4);
  const LogMagSpectrogram wrong = random_features(rng, 64, 126);
  CHECK_THROWS_AS((void)recognizer_forward(rec, wrong), InvalidInputError);
  CHECK_THROWS_AS((void)generator_forward(gen, wrong), InvalidInputError);
}

TEST_CASE("generator masks live in [0,1] and saturate with a huge final bias") {
  ArchConfig arch = small_arch();
  Rng rng(5);
  GeneratorParams gen = init_generator(Rng(9).substream("g"), arch);
  const LogMagSpectrogram s_tilde = random_features(rng, arch.n_freq, 6);
  const Mask mask = generator_forward(gen, s_tilde);
  CHECK(mask.values.minCoeff() >= 0.0);
  CHECK(mask.values.maxCoeff() <= 1.0);

  // Silence the last layer and push its bias toward +inf: logistic saturation.
  for (auto& row : gen.layers.back().weights)
    for (auto& w : row) w.setZero();
  gen.layers.back().bias.setConstant(100.0);
  const Mask ones = generator_forward(gen, s_tilde);
  CHECK(ones.values.minCoeff() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cross_entropy evaluates -log p") {
  ClassDistribution pred;
  pred.log_probs = Eigen::ArrayXd::Constant(35, -1e9);
  pred.log_probs[4] = 0.0;  // probability one on class 4
  CHECK(cross_entropy(pred, 4) == 0.0);

  pred.log_probs = Eigen::ArrayXd::Constant(35, -std::log(35.0));
  CHECK(cross_entropy(pred, 11) == doctest::Approx(std::log(35.0)).epsilon(1e-12));
  CHECK(cross_entropy(pred, 11) == doctest::Approx(3.5553480614894135).epsilon(1e-12));

  pred.log_probs[7] = std::log(0.5);
  CHECK(cross_entropy(pred, 7) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS((void)cross_entropy(pred, 35), InvalidInputError);
  CHECK_THROWS_AS((void)cross_entropy(pred, -1), InvalidInputError);
}

TEST_CASE("initialization is deterministic per seed and shape-correct") {
  auto [rec1, gen1] = init_params(1234);
  auto [rec2, gen2] = init_params(1234);
  auto [rec3, gen3] = init_params(1235);

  const TensorMap t1 = to_tensors(rec1), t2 = to_tensors(rec2), t3 = to_tensors(rec3);
  CHECK(tensor_checksum(t1) == tensor_checksum(t2));
  CHECK(tensor_checksum(t1) != tensor_checksum(t3));
  CHECK(tensor_checksum(to_tensors(gen1)) == tensor_checksum(to_tensors(gen2)));
  CHECK(tensor_checksum(to_tensors(gen1)) != tensor_checksum(to_tensors(gen3)));

  CHECK(rec1.blocks.size() == 5);
  for (const auto& block : rec1.blocks) {
    CHECK(block.dw_weight.rows() == 257);
    CHECK(block.dw_weight.cols() == 9);
    CHECK(block.pw_weight.rows() == 257);
    CHECK(block.pw_weight.cols() == 257);
  }
  CHECK(rec1.head_weight.rows() == 35);
  CHECK(rec1.head_weight.cols() == 257);

  CHECK(gen1.layers.size() == 4);
  CHECK(gen1.layers[0].weights.size() == 2);     // 1 -> 2 channels
  CHECK(gen1.layers[0].weights[0].size() == 1);
  CHECK(gen1.layers[3].weights.size() == 1);     // 2 -> 1 channels
  CHECK(gen1.layers[3].weights[0].size() == 2);
  for (const auto& layer : gen1.layers)
    for (const auto& row : layer.weights)
      for (const auto& w : row) {
        CHECK(w.rows() == 5);
        CHECK(w.cols() == 5);
      }
}

TEST_CASE("tensor round-trip preserves parameters exactly") {
  auto [rec, gen] = init_params(99);
  const RecognizerParams rec2 = recognizer_from_tensors(to_tensors(rec), rec.arch);
  const GeneratorParams gen2 = generator_from_tensors(to_tensors(gen), gen.arch);
  CHECK(tensor_checksum(to_tensors(rec)) == tensor_checksum(to_tensors(rec2)));
  CHECK(tensor_checksum(to_tensors(gen)) == tensor_checksum(to_tensors(gen2)));
}

TEST_CASE("time-rolled input shifts interior pre-pooling activations") {
  ArchConfig arch;
  arch.n_freq = 257;
  arch.n_classes = 35;
  const RecognizerParams rec = init_recognizer(Rng(55).substream("r"), arch);
  Rng rng(6);
  const LogMagSpectrogram features = random_features(rng, 257, 126);
  const Eigen::ArrayXXd base = recognizer_prepool(rec, features);

  const int shift = 5;
  LogMagSpectrogram rolled;
  rolled.values.resize(257, 126);
  for (int t = 0; t < 126; ++t)
    rolled.values.col((t + shift) % 126) = features.values.col(t);
  const Eigen::ArrayXXd moved = recognizer_prepool(rec, rolled);

  // Five blocks of kernel 9 reach 20 frames; columns beyond that margin on
  // both sides must match the unshifted activations exactly.
  const int margin = 20 + shift;
  for (int t = margin; t < 126 - margin; ++t)
    CHECK((moved.col(t + shift) == base.col(t)).all());
}

TEST_CASE("composite loss gradients match finite differences on a 5x6 setup") {
  // Reduced configuration: full pipeline from generator parameters through
  // mixing and the frozen recognizer, checked term by term.
  ArchConfig arch = small_arch();
  const int frames = 6;
  Rng rng(77);
  const RecognizerParams rec = init_recognizer(Rng(88).substream("r"), arch);
  const GeneratorParams gen = init_generator(Rng(88).substream("g"), arch);

  const auto speech = testutil::random_spec(rng, arch.n_freq, frames).values;
  const auto noise = testutil::random_spec(rng, arch.n_freq, frames).values;
  const Eigen::ArrayXXd s_tilde = random_array(rng, arch.n_freq, frames, -60.0, 10.0);
  const double gain = 2.3;
  const int label = 1;

  const LossWeights weight_sets[] = {
      {1.0, 0.0, 0.0, 0.0},  // recognition term alone
      {0.0, 3.0, 0.0, 0.0},  // energy term alone
      {0.0, 0.0, 3.0, 0.0},  // frequency smoothness alone
      {0.0, 0.0, 0.0, 3.0},  // time smoothness alone
      {1.0, 3.0, 3.0, 3.0},  // full composite
  };

  for (const LossWeights& w : weight_sets) {
    auto loss_value = [&](const GeneratorParams& g_params) -> double {
      autodiff::Graph g;
      GeneratorVars gen_vars = make_generator_vars(g, g_params, true);
      autodiff::Var mask = build_generator(g, gen_vars, g.constant(s_tilde));
      autodiff::Var feats = g.mix_log_magnitude(speech, noise, gain, 1e-8, mask);
      RecognizerVars rec_vars = make_recognizer_vars(g, rec, false);
      RecognizerOutputs out = build_recognizer(g, rec_vars, feats);
      return g.scalar_value(build_total_loss(g, out.log_probs, label, mask, w));
    };

    TensorMap analytic;
    {
      autodiff::Graph g;
      GeneratorVars gen_vars = make_generator_vars(g, gen, true);
      autodiff::Var mask = build_generator(g, gen_vars, g.constant(s_tilde));
      autodiff::Var feats = g.mix_log_magnitude(speech, noise, gain, 1e-8, mask);
      RecognizerVars rec_vars = make_recognizer_vars(g, rec, false);
      RecognizerOutputs out = build_recognizer(g, rec_vars, feats);
      g.backward(build_total_loss(g, out.log_probs, label, mask, w));
      analytic = generator_grad_tensors(g, gen_vars);
    }

    // Central differences over every generator parameter, step 1e-5.
    TensorMap params = to_tensors(gen);
    double analytic_norm = 0.0, numeric_norm = 0.0, diff_norm = 0.0;
    for (auto& [name, tensor] : params) {
      for (Eigen::Index r = 0; r < tensor.rows(); ++r)
        for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
          const double saved = tensor(r, c);
          const double h = 1e-5;
          tensor(r, c) = saved + h;
          const double loss_up = loss_value(generator_from_tensors(params, arch));
          tensor(r, c) = saved - h;
          const double loss_down = loss_value(generator_from_tensors(params, arch));
          tensor(r, c) = saved;
          const double numeric = (loss_up - loss_down) / (2.0 * h);
          const double a = analytic.at(name)(r, c);
          diff_norm += (a - numeric) * (a - numeric);
          analytic_norm += a * a;
          numeric_norm += numeric * numeric;
        }
    }
    const double rel = std::sqrt(diff_norm) /
                       std::max({std::sqrt(analytic_norm), std::sqrt(numeric_norm), 1e-300});
    CAPTURE(w.lambda_r);
    CAPTURE(w.lambda_e);
    CAPTURE(w.lambda_f);
    CAPTURE(w.lambda_t);
    CHECK(rel < 1e-4);
  }
}
