// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/models.hpp"

#include <cmath>
#include <cstring>

namespace importantaug {

namespace {

constexpr std::array<int, 5> kGeneratorChannels = {1, 2, 2, 2, 1};

// Row-major fill so the draw order is independent of Eigen's storage layout.
Eigen::ArrayXXd lecun_uniform(Rng& stream, Eigen::Index rows, Eigen::Index cols,
                              double fan_in) {
  const double bound = std::sqrt(3.0 / fan_in);
  Eigen::ArrayXXd w(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      w(r, c) = (2.0 * stream.uniform_real() - 1.0) * bound;
  return w;
}

autodiff::Var standardized_features(autodiff::Graph& g, autodiff::Var features) {
  return g.scale(g.add_scalar(features, -kFeatureShiftDb), 1.0 / kFeatureScaleDb);
}

const Eigen::ArrayXXd& tensor_at(const TensorMap& tensors, const std::string& name) {
  auto it = tensors.find(name);
  if (it == tensors.end())
    throw InvalidInputError("missing tensor '" + name + "' in parameter set");
  return it->second;
}

void check_shape(const Eigen::ArrayXXd& t, Eigen::Index rows, Eigen::Index cols,
                 const std::string& name) {
  if (t.rows() != rows || t.cols() != cols)
    throw InvalidInputError("tensor '" + name + "' has shape " + std::to_string(t.rows()) +
                            "x" + std::to_string(t.cols()) + ", expected " +
                            std::to_string(rows) + "x" + std::to_string(cols));
}

std::string block_key(int b, const char* field) {
  return "block" + std::to_string(b) + "." + field;
}
std::string layer_weight_key(int l, int o, int i) {
  return "layer" + std::to_string(l) + ".w" + std::to_string(o) + "_" + std::to_string(i);
}
std::string layer_bias_key(int l) { return "layer" + std::to_string(l) + ".bias"; }

}  // namespace

void ArchConfig::validate() const {
  if (n_freq < 1) throw ConfigError("arch: n_freq must be positive");
  if (n_classes < 2) throw ConfigError("arch: need at least two classes");
}

RecognizerParams init_recognizer(Rng stream, const ArchConfig& arch) {
  arch.validate();
  RecognizerParams p;
  p.arch = arch;
  const int f = arch.n_freq;
  for (int b = 0; b < ArchConfig::recognizer_blocks; ++b) {
    RecognizerBlock block;
    block.dw_weight = lecun_uniform(stream, f, ArchConfig::depthwise_taps,
                                    ArchConfig::depthwise_taps);
    block.dw_bias = Eigen::ArrayXXd::Zero(f, 1);
    block.pw_weight = lecun_uniform(stream, f, f, f);
    block.pw_bias = Eigen::ArrayXXd::Zero(f, 1);
    p.blocks.push_back(std::move(block));
  }
  p.head_weight = lecun_uniform(stream, arch.n_classes, f, f);
  p.head_bias = Eigen::ArrayXXd::Zero(arch.n_classes, 1);
  return p;
}

GeneratorParams init_generator(Rng stream, const ArchConfig& arch) {
  arch.validate();
  GeneratorParams p;
  p.arch = arch;
  const int k = ArchConfig::generator_kernel;
  for (int l = 0; l < ArchConfig::generator_layers; ++l) {
    const int n_in = kGeneratorChannels[static_cast<size_t>(l)];
    const int n_out = kGeneratorChannels[static_cast<size_t>(l) + 1];
    GeneratorLayer layer;
    layer.weights.resize(static_cast<size_t>(n_out));
    for (int o = 0; o < n_out; ++o)
      for (int i = 0; i < n_in; ++i)
        layer.weights[static_cast<size_t>(o)].push_back(
            lecun_uniform(stream, k, k, static_cast<double>(n_in * k * k)));
    layer.bias = Eigen::ArrayXXd::Zero(n_out, 1);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

std::pair<RecognizerParams, GeneratorParams> init_params(uint64_t seed,
                                                         const ArchConfig& arch) {
  Rng root(seed);
  Rng init_stream = root.substream("init");
  return {init_recognizer(init_stream.substream("recognizer"), arch),
          init_generator(init_stream.substream("generator"), arch)};
}

RecognizerVars make_recognizer_vars(autodiff::Graph& g, const RecognizerParams& params,
                                    bool trainable) {
  auto load = [&](const Eigen::ArrayXXd& t) {
    return trainable ? g.leaf(t) : g.constant(t);
  };
  RecognizerVars vars;
  for (const auto& b : params.blocks)
    vars.blocks.push_back({load(b.dw_weight), load(b.dw_bias), load(b.pw_weight),
                           load(b.pw_bias)});
  vars.head_weight = load(params.head_weight);
  vars.head_bias = load(params.head_bias);
  return vars;
}

GeneratorVars make_generator_vars(autodiff::Graph& g, const GeneratorParams& params,
                                  bool trainable) {
  auto load = [&](const Eigen::ArrayXXd& t) {
    return trainable ? g.leaf(t) : g.constant(t);
  };
  GeneratorVars vars;
  for (const auto& layer : params.layers) {
    GeneratorLayerVars lv;
    lv.weights.resize(layer.weights.size());
    for (size_t o = 0; o < layer.weights.size(); ++o)
      for (const auto& w : layer.weights[o]) lv.weights[o].push_back(load(w));
    lv.bias = load(layer.bias);
    vars.layers.push_back(std::move(lv));
  }
  return vars;
}

RecognizerOutputs build_recognizer(autodiff::Graph& g, const RecognizerVars& vars,
                                   autodiff::Var features) {
  autodiff::Var x = standardized_features(g, features);
  for (const auto& b : vars.blocks) {
    autodiff::Var dw = g.add_col_broadcast(g.conv1d_depthwise(x, b.dw_weight), b.dw_bias);
    autodiff::Var pw = g.add_col_broadcast(g.matmul(b.pw_weight, dw), b.pw_bias);
    x = g.selu(pw);
  }
  autodiff::Var pooled = g.mean_cols(x);
  autodiff::Var logits = g.add(g.matmul(vars.head_weight, pooled), vars.head_bias);
  return {x, logits, g.log_softmax_col(logits)};
}

autodiff::Var build_generator(autodiff::Graph& g, const GeneratorVars& vars,
                              autodiff::Var s_tilde) {
  std::vector<autodiff::Var> channels = {standardized_features(g, s_tilde)};
  for (size_t l = 0; l < vars.layers.size(); ++l) {
    const auto& layer = vars.layers[l];
    const bool last = l + 1 == vars.layers.size();
    std::vector<autodiff::Var> next;
    for (size_t o = 0; o < layer.weights.size(); ++o) {
      autodiff::Var acc = g.conv2d(channels[0], layer.weights[o][0]);
      for (size_t i = 1; i < channels.size(); ++i)
        acc = g.add(acc, g.conv2d(channels[i], layer.weights[o][i]));
      acc = g.add_scalar_broadcast(acc, g.pick(layer.bias, static_cast<Eigen::Index>(o), 0));
      next.push_back(last ? g.sigmoid(acc) : g.selu(acc));
    }
    channels = std::move(next);
  }
  return channels[0];
}

namespace {

void check_features(const ArchConfig& arch, const LogMagSpectrogram& features,
                    const char* who) {
  if (features.values.rows() != arch.n_freq)
    throw InvalidInputError(std::string(who) + ": features have " +
                            std::to_string(features.values.rows()) +
                            " frequency bins, model expects " + std::to_string(arch.n_freq));
  if (features.values.cols() < 1)
    throw InvalidInputError(std::string(who) + ": features are empty");
}

}  // namespace

ClassDistribution recognizer_forward(const RecognizerParams& params,
                                     const LogMagSpectrogram& features) {
  check_features(params.arch, features, "recognizer_forward");
  autodiff::Graph g;
  RecognizerVars vars = make_recognizer_vars(g, params, /*trainable=*/false);
  RecognizerOutputs out = build_recognizer(g, vars, g.constant(features.values));
  return ClassDistribution{g.value(out.log_probs).col(0)};
}

Eigen::ArrayXXd recognizer_prepool(const RecognizerParams& params,
                                   const LogMagSpectrogram& features) {
  check_features(params.arch, features, "recognizer_prepool");
  autodiff::Graph g;
  RecognizerVars vars = make_recognizer_vars(g, params, /*trainable=*/false);
  RecognizerOutputs out = build_recognizer(g, vars, g.constant(features.values));
  return g.value(out.prepool);
}

Mask generator_forward(const GeneratorParams& params, const LogMagSpectrogram& s_tilde) {
  check_features(params.arch, s_tilde, "generator_forward");
  autodiff::Graph g;
  GeneratorVars vars = make_generator_vars(g, params, /*trainable=*/false);
  autodiff::Var mask = build_generator(g, vars, g.constant(s_tilde.values));
  return Mask{g.value(mask)};
}

double cross_entropy(const ClassDistribution& pred, int label) {
  if (label < 0 || label >= pred.log_probs.size())
    throw InvalidInputError("cross_entropy: label " + std::to_string(label) +
                            " outside [0, " + std::to_string(pred.log_probs.size()) + ")");
  return -pred.log_probs[label];
}

int argmax_class(const ClassDistribution& pred) {
  if (pred.log_probs.size() == 0)
    throw InvalidInputError("argmax_class: empty distribution");
  int best = 0;
  for (int i = 1; i < pred.log_probs.size(); ++i)
    if (pred.log_probs[i] > pred.log_probs[best]) best = i;
  return best;
}

TensorMap to_tensors(const RecognizerParams& params) {
  TensorMap t;
  for (size_t b = 0; b < params.blocks.size(); ++b) {
    const int bi = static_cast<int>(b);
    t[block_key(bi, "dw_weight")] = params.blocks[b].dw_weight;
    t[block_key(bi, "dw_bias")] = params.blocks[b].dw_bias;
    t[block_key(bi, "pw_weight")] = params.blocks[b].pw_weight;
    t[block_key(bi, "pw_bias")] = params.blocks[b].pw_bias;
  }
  t["head.weight"] = params.head_weight;
  t["head.bias"] = params.head_bias;
  return t;
}

TensorMap to_tensors(const GeneratorParams& params) {
  TensorMap t;
  for (size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    for (size_t o = 0; o < layer.weights.size(); ++o)
      for (size_t i = 0; i < layer.weights[o].size(); ++i)
        t[layer_weight_key(static_cast<int>(l), static_cast<int>(o), static_cast<int>(i))] =
            layer.weights[o][i];
    t[layer_bias_key(static_cast<int>(l))] = layer.bias;
  }
  return t;
}

RecognizerParams recognizer_from_tensors(const TensorMap& tensors, const ArchConfig& arch) {
  arch.validate();
  RecognizerParams p;
  p.arch = arch;
  const int f = arch.n_freq;
  for (int b = 0; b < ArchConfig::recognizer_blocks; ++b) {
    RecognizerBlock block;
    block.dw_weight = tensor_at(tensors, block_key(b, "dw_weight"));
    block.dw_bias = tensor_at(tensors, block_key(b, "dw_bias"));
    block.pw_weight = tensor_at(tensors, block_key(b, "pw_weight"));
    block.pw_bias = tensor_at(tensors, block_key(b, "pw_bias"));
    check_shape(block.dw_weight, f, ArchConfig::depthwise_taps, block_key(b, "dw_weight"));
    check_shape(block.dw_bias, f, 1, block_key(b, "dw_bias"));
    check_shape(block.pw_weight, f, f, block_key(b, "pw_weight"));
    check_shape(block.pw_bias, f, 1, block_key(b, "pw_bias"));
    p.blocks.push_back(std::move(block));
  }
  p.head_weight = tensor_at(tensors, "head.weight");
  p.head_bias = tensor_at(tensors, "head.bias");
  check_shape(p.head_weight, arch.n_classes, f, "head.weight");
  check_shape(p.head_bias, arch.n_classes, 1, "head.bias");
  return p;
}

GeneratorParams generator_from_tensors(const TensorMap& tensors, const ArchConfig& arch) {
  arch.validate();
  GeneratorParams p;
  p.arch = arch;
  const int k = ArchConfig::generator_kernel;
  for (int l = 0; l < ArchConfig::generator_layers; ++l) {
    const int n_in = kGeneratorChannels[static_cast<size_t>(l)];
    const int n_out = kGeneratorChannels[static_cast<size_t>(l) + 1];
    GeneratorLayer layer;
    layer.weights.resize(static_cast<size_t>(n_out));
    for (int o = 0; o < n_out; ++o)
      for (int i = 0; i < n_in; ++i) {
        const std::string key = layer_weight_key(l, o, i);
        Eigen::ArrayXXd w = tensor_at(tensors, key);
        check_shape(w, k, k, key);
        layer.weights[static_cast<size_t>(o)].push_back(std::move(w));
      }
    layer.bias = tensor_at(tensors, layer_bias_key(l));
    check_shape(layer.bias, n_out, 1, layer_bias_key(l));
    p.layers.push_back(std::move(layer));
  }
  return p;
}

TensorMap recognizer_grad_tensors(const autodiff::Graph& g, const RecognizerVars& vars) {
  TensorMap t;
  for (size_t b = 0; b < vars.blocks.size(); ++b) {
    const int bi = static_cast<int>(b);
    t[block_key(bi, "dw_weight")] = g.grad(vars.blocks[b].dw_weight);
    t[block_key(bi, "dw_bias")] = g.grad(vars.blocks[b].dw_bias);
    t[block_key(bi, "pw_weight")] = g.grad(vars.blocks[b].pw_weight);
    t[block_key(bi, "pw_bias")] = g.grad(vars.blocks[b].pw_bias);
  }
  t["head.weight"] = g.grad(vars.head_weight);
  t["head.bias"] = g.grad(vars.head_bias);
  return t;
}

TensorMap generator_grad_tensors(const autodiff::Graph& g, const GeneratorVars& vars) {
  TensorMap t;
  for (size_t l = 0; l < vars.layers.size(); ++l) {
    const auto& layer = vars.layers[l];
    for (size_t o = 0; o < layer.weights.size(); ++o)
      for (size_t i = 0; i < layer.weights[o].size(); ++i)
        t[layer_weight_key(static_cast<int>(l), static_cast<int>(o), static_cast<int>(i))] =
            g.grad(layer.weights[o][i]);
    t[layer_bias_key(static_cast<int>(l))] = g.grad(layer.bias);
  }
  return t;
}

uint64_t tensor_checksum(const TensorMap& tensors) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_byte = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (const auto& [name, value] : tensors) {
    for (char c : name) mix_byte(static_cast<unsigned char>(c));
    const auto rows = static_cast<uint64_t>(value.rows());
    const auto cols = static_cast<uint64_t>(value.cols());
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(rows >> (8 * i)));
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(cols >> (8 * i)));
    for (Eigen::Index r = 0; r < value.rows(); ++r)
      for (Eigen::Index c = 0; c < value.cols(); ++c) {
        uint64_t bits;
        const double d = value(r, c);
        std::memcpy(&bits, &d, sizeof(bits));
        for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(bits >> (8 * i)));
      }
  }
  return h;
}

}  // namespace importantaug
