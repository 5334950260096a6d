// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "importantaug/autodiff.hpp"
#include "importantaug/rng.hpp"
#include "importantaug/signal.hpp"

namespace importantaug {

// Ordered name -> tensor container used for optimizer state, gradients and
// checkpoints. std::map keeps iteration deterministic.
using TensorMap = std::map<std::string, Eigen::ArrayXXd>;

// Dimensions shared by both networks. The block/layer structure itself is
// fixed: 5 depthwise-separable recognizer blocks and a 4-layer generator
// with channel plan 1-2-2-2-1.
struct ArchConfig {
  int n_freq = 257;
  int n_classes = 35;

  static constexpr int recognizer_blocks = 5;
  static constexpr int depthwise_taps = 9;
  static constexpr int generator_kernel = 5;
  static constexpr int generator_layers = 4;

  void validate() const;

  friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

// Fixed affine scaling applied to dB features before either network.
// Part of the architecture definition, not learned: dB inputs span roughly
// [-160, 40] and would saturate the activations unscaled.
inline constexpr double kFeatureShiftDb = -40.0;
inline constexpr double kFeatureScaleDb = 40.0;

struct RecognizerBlock {
  Eigen::ArrayXXd dw_weight;  // n_freq x 9, per-channel kernel over time
  Eigen::ArrayXXd dw_bias;    // n_freq x 1
  Eigen::ArrayXXd pw_weight;  // n_freq x n_freq, 1x1 channel mixing
  Eigen::ArrayXXd pw_bias;    // n_freq x 1
};

// Speech command recognizer R: 5 blocks of depthwise time-convolution
// (kernel 9, same padding) + pointwise mixing + SELU, then global mean over
// time and an affine head to n_classes logits.
struct RecognizerParams {
  ArchConfig arch;
  std::vector<RecognizerBlock> blocks;
  Eigen::ArrayXXd head_weight;  // n_classes x n_freq
  Eigen::ArrayXXd head_bias;    // n_classes x 1
};

struct GeneratorLayer {
  // weights[out][in]: 5x5 kernel; bias: n_out x 1 per-channel offsets.
  std::vector<std::vector<Eigen::ArrayXXd>> weights;
  Eigen::ArrayXXd bias;
};

// Mask generator G: 4 same-padded 5x5 convolution layers (channels
// 1-2-2-2-1), SELU between layers, logistic squashing on the output so the
// mask lands strictly inside (0,1).
struct GeneratorParams {
  ArchConfig arch;
  std::vector<GeneratorLayer> layers;
};

// 35 log-probabilities; exponentials sum to one.
struct ClassDistribution {
  Eigen::ArrayXd log_probs;
};

// Independent fan-in-scaled initialization (LeCun uniform, zero biases).
// The same seed always produces identical parameters.
RecognizerParams init_recognizer(Rng stream, const ArchConfig& arch = {});
GeneratorParams init_generator(Rng stream, const ArchConfig& arch = {});
std::pair<RecognizerParams, GeneratorParams> init_params(uint64_t seed,
                                                         const ArchConfig& arch = {});

ClassDistribution recognizer_forward(const RecognizerParams& params,
                                     const LogMagSpectrogram& features);
// Activations after the last block, before time pooling (n_freq x T).
Eigen::ArrayXXd recognizer_prepool(const RecognizerParams& params,
                                   const LogMagSpectrogram& features);
Mask generator_forward(const GeneratorParams& params, const LogMagSpectrogram& s_tilde);

// -log p(label). Throws InvalidInputError for an out-of-range label.
double cross_entropy(const ClassDistribution& pred, int label);

// Index of the highest log-probability; exact ties resolve to the lowest
// class index.
int argmax_class(const ClassDistribution& pred);

// ---- Differentiable graph builders -----------------------------------

struct RecognizerBlockVars {
  autodiff::Var dw_weight, dw_bias, pw_weight, pw_bias;
};
struct RecognizerVars {
  std::vector<RecognizerBlockVars> blocks;
  autodiff::Var head_weight, head_bias;
};
struct GeneratorLayerVars {
  std::vector<std::vector<autodiff::Var>> weights;
  autodiff::Var bias;
};
struct GeneratorVars {
  std::vector<GeneratorLayerVars> layers;
};
struct RecognizerOutputs {
  autodiff::Var prepool, logits, log_probs;
};

// trainable=false loads the parameters as graph constants; gradients then
// flow through the network but are not accumulated into it (frozen model).
RecognizerVars make_recognizer_vars(autodiff::Graph& g, const RecognizerParams& params,
                                    bool trainable);
GeneratorVars make_generator_vars(autodiff::Graph& g, const GeneratorParams& params,
                                  bool trainable);

RecognizerOutputs build_recognizer(autodiff::Graph& g, const RecognizerVars& vars,
                                   autodiff::Var features);
autodiff::Var build_generator(autodiff::Graph& g, const GeneratorVars& vars,
                              autodiff::Var s_tilde);

// ---- Tensor-map plumbing ----------------------------------------------

TensorMap to_tensors(const RecognizerParams& params);
TensorMap to_tensors(const GeneratorParams& params);
RecognizerParams recognizer_from_tensors(const TensorMap& tensors, const ArchConfig& arch);
GeneratorParams generator_from_tensors(const TensorMap& tensors, const ArchConfig& arch);

// Gradients of the last backward pass, keyed like to_tensors.
TensorMap recognizer_grad_tensors(const autodiff::Graph& g, const RecognizerVars& vars);
TensorMap generator_grad_tensors(const autodiff::Graph& g, const GeneratorVars& vars);

// FNV-1a over names, shapes and raw double payloads; used by the freeze
// contract checks.
uint64_t tensor_checksum(const TensorMap& tensors);

}  // namespace importantaug
