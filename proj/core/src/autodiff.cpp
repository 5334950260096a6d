// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/autodiff.hpp"

#include <cmath>
#include <numbers>

namespace importantaug::autodiff {

namespace {
constexpr double kSeluScale = 1.0507009873554804934193349852946;
constexpr double kSeluAlpha = 1.6732632423543772848170429916717;
const double kDbPerLn = 20.0 / std::numbers::ln10;

Array zero_pad_cols(const Array& x, Eigen::Index pad) {
  Array out = Array::Zero(x.rows(), x.cols() + 2 * pad);
  out.middleCols(pad, x.cols()) = x;
  return out;
}

Array zero_pad_2d(const Array& x, Eigen::Index pad_rows, Eigen::Index pad_cols) {
  Array out = Array::Zero(x.rows() + 2 * pad_rows, x.cols() + 2 * pad_cols);
  out.block(pad_rows, pad_cols, x.rows(), x.cols()) = x;
  return out;
}
}  // namespace

Var Graph::make(Array value, bool requires_grad, std::function<void(Graph&)> back) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::leaf(Array value) { return make(std::move(value), true, nullptr); }

Var Graph::constant(Array value) { return make(std::move(value), false, nullptr); }

Array& Graph::grad_buffer(int id) {
  Node& n = node(id);
  if (!n.grad_alloc) {
    n.grad = Array::Zero(n.value.rows(), n.value.cols());
    n.grad_alloc = true;
  }
  return n.grad;
}

void Graph::accumulate(int id, const Array& g) {
  if (!node(id).requires_grad) return;
  grad_buffer(id) += g;
}

Array Graph::grad(Var v) const {
  const Node& n = node(v.id);
  if (n.grad_alloc) return n.grad;
  return Array::Zero(n.value.rows(), n.value.cols());
}

double Graph::scalar_value(Var v) const {
  const Array& a = value(v);
  if (a.size() != 1) throw InvalidInputError("scalar_value: node is not 1x1");
  return a(0, 0);
}

void Graph::backward(Var output) {
  const Node& out = node(output.id);
  if (out.value.size() != 1)
    throw InvalidInputError("backward: output must be a 1x1 scalar");
  if (!std::isfinite(out.value(0, 0)))
    throw NumericError("backward: output value is not finite");
  grad_buffer(output.id)(0, 0) = 1.0;
  for (int id = output.id; id >= 0; --id) {
    Node& n = node(id);
    if (n.back && n.grad_alloc && n.requires_grad) n.back(*this);
  }
}

Var Graph::add(Var a, Var b) {
  const bool rg = node(a.id).requires_grad || node(b.id).requires_grad;
  Var out = make(node(a.id).value + node(b.id).value, rg, nullptr);
  if (rg)
    node(out.id).back = [out, a, b](Graph& g) {
      const Array& go = g.node(out.id).grad;
      g.accumulate(a.id, go);
      g.accumulate(b.id, go);
    };
  return out;
}

Var Graph::sub(Var a, Var b) {
  const bool rg = node(a.id).requires_grad || node(b.id).requires_grad;
  Var out = make(node(a.id).value - node(b.id).value, rg, nullptr);
  if (rg)
    node(out.id).back = [out, a, b](Graph& g) {
      const Array& go = g.node(out.id).grad;
      g.accumulate(a.id, go);
      g.accumulate(b.id, -go);
    };
  return out;
}

Var Graph::mul(Var a, Var b) {
  const bool rg = node(a.id).requires_grad || node(b.id).requires_grad;
  Var out = make(node(a.id).value * node(b.id).value, rg, nullptr);
  if (rg)
    node(out.id).back = [out, a, b](Graph& g) {
      const Array& go = g.node(out.id).grad;
      g.accumulate(a.id, go * g.node(b.id).value);
      g.accumulate(b.id, go * g.node(a.id).value);
    };
  return out;
}

Var Graph::scale(Var a, double s) {
  const bool rg = node(a.id).requires_grad;
  Var out = make(node(a.id).value * s, rg, nullptr);
  if (rg)
    node(out.id).back = [out, a, s](Graph& g) { g.accumulate(a.id, g.node(out.id).grad * s); };
  return out;
}

Var Graph::add_scalar(Var a, double s) {
  const bool rg = node(a.id).requires_grad;
  Var out = make(node(a.id).value + s, rg, nullptr);
  if (rg)
    node(out.id).back = [out, a](Graph& g) { g.accumulate(a.id, g.node(out.id).grad); };
  return out;
}

Var Graph::matmul(Var a, Var b) {
  const Array& av = node(a.id).value;
  const Array& bv = node(b.id).value;
  if (av.cols() != bv.rows()) throw InvalidInputError("matmul: inner dimensions disagree");
  const bool rg = node(a.id).requires_grad || node(b.id).requires_grad;
  Var out = make((av.matrix() * bv.matrix()).array(), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a, b](Graph& g) {
      const auto go = g.node(out.id).grad.matrix();
      if (g.node(a.id).requires_grad)
        g.accumulate(a.id, (go * g.node(b.id).value.matrix().transpose()).array());
      if (g.node(b.id).requires_grad)
        g.accumulate(b.id, (g.node(a.id).value.matrix().transpose() * go).array());
    };
  return out;
}

Var Graph::add_col_broadcast(Var a, Var bias) {
  const Array& av = node(a.id).value;
  const Array& bv = node(bias.id).value;
  if (bv.cols() != 1 || bv.rows() != av.rows())
    throw InvalidInputError("add_col_broadcast: bias must be rows x 1");
  Array result = av;
  result.colwise() += bv.col(0);
  const bool rg = node(a.id).requires_grad || node(bias.id).requires_grad;
  Var out = make(std::move(result), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a, bias](Graph& g) {
      const Array& go = g.node(out.id).grad;
      g.accumulate(a.id, go);
      if (g.node(bias.id).requires_grad)
        g.accumulate(bias.id, go.rowwise().sum());
    };
  return out;
}

Var Graph::add_scalar_broadcast(Var a, Var bias) {
  const Array& bv = node(bias.id).value;
  if (bv.size() != 1) throw InvalidInputError("add_scalar_broadcast: bias must be 1x1");
  const bool rg = node(a.id).requires_grad || node(bias.id).requires_grad;
  Var out = make(node(a.id).value + bv(0, 0), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a, bias](Graph& g) {
      const Array& go = g.node(out.id).grad;
      g.accumulate(a.id, go);
      if (g.node(bias.id).requires_grad) {
        Array s(1, 1);
        s(0, 0) = go.sum();
        g.accumulate(bias.id, s);
      }
    };
  return out;
}

Var Graph::conv1d_depthwise(Var x, Var kernel) {
  const Array& xv = node(x.id).value;
  const Array& kv = node(kernel.id).value;
  if (kv.rows() != xv.rows()) throw InvalidInputError("conv1d_depthwise: kernel rows != input rows");
  if (kv.cols() % 2 == 0) throw InvalidInputError("conv1d_depthwise: kernel width must be odd");
  const Eigen::Index taps = kv.cols();
  const Eigen::Index pad = (taps - 1) / 2;
  const Eigen::Index frames = xv.cols();

  const Array xp = zero_pad_cols(xv, pad);
  Array result = Array::Zero(xv.rows(), frames);
  for (Eigen::Index j = 0; j < taps; ++j) {
    const Eigen::ArrayXd kj = kv.col(j);
    result += xp.middleCols(j, frames).colwise() * kj;
  }

  const bool rg = node(x.id).requires_grad || node(kernel.id).requires_grad;
  Var out = make(std::move(result), rg, nullptr);
  if (rg)
    node(out.id).back = [out, x, kernel, pad, taps, frames](Graph& g) {
      const Array& go = g.node(out.id).grad;
      const Array& xv2 = g.node(x.id).value;
      const Array& kv2 = g.node(kernel.id).value;
      if (g.node(x.id).requires_grad) {
        Array dxp = Array::Zero(xv2.rows(), xv2.cols() + 2 * pad);
        for (Eigen::Index j = 0; j < taps; ++j) {
          const Eigen::ArrayXd kj = kv2.col(j);
          dxp.middleCols(j, frames) += go.colwise() * kj;
        }
        g.accumulate(x.id, dxp.middleCols(pad, frames));
      }
      if (g.node(kernel.id).requires_grad) {
        const Array xp2 = zero_pad_cols(xv2, pad);
        Array dk = Array::Zero(kv2.rows(), kv2.cols());
        for (Eigen::Index j = 0; j < taps; ++j)
          dk.col(j) = (xp2.middleCols(j, frames) * go).rowwise().sum();
        g.accumulate(kernel.id, dk);
      }
    };
  return out;
}

Var Graph::conv2d(Var x, Var kernel) {
  const Array& xv = node(x.id).value;
  const Array& kv = node(kernel.id).value;
  if (kv.rows() % 2 == 0 || kv.cols() % 2 == 0)
    throw InvalidInputError("conv2d: kernel dimensions must be odd");
  const Eigen::Index pr = (kv.rows() - 1) / 2;
  const Eigen::Index pc = (kv.cols() - 1) / 2;
  const Eigen::Index rows = xv.rows(), cols = xv.cols();

  const Array xp = zero_pad_2d(xv, pr, pc);
  Array result = Array::Zero(rows, cols);
  for (Eigen::Index a = 0; a < kv.rows(); ++a)
    for (Eigen::Index b = 0; b < kv.cols(); ++b)
      result += kv(a, b) * xp.block(a, b, rows, cols);

  const bool rg = node(x.id).requires_grad || node(kernel.id).requires_grad;
  Var out = make(std::move(result), rg, nullptr);
  if (rg)
    node(out.id).back = [out, x, kernel, pr, pc, rows, cols](Graph& g) {
      const Array& go = g.node(out.id).grad;
      const Array& xv2 = g.node(x.id).value;
      const Array& kv2 = g.node(kernel.id).value;
      if (g.node(x.id).requires_grad) {
        Array dxp = Array::Zero(rows + 2 * pr, cols + 2 * pc);
        for (Eigen::Index a = 0; a < kv2.rows(); ++a)
          for (Eigen::Index b = 0; b < kv2.cols(); ++b)
            dxp.block(a, b, rows, cols) += kv2(a, b) * go;
        g.accumulate(x.id, dxp.block(pr, pc, rows, cols));
      }
      if (g.node(kernel.id).requires_grad) {
        const Array xp2 = zero_pad_2d(xv2, pr, pc);
        Array dk = Array::Zero(kv2.rows(), kv2.cols());
        for (Eigen::Index a = 0; a < kv2.rows(); ++a)
          for (Eigen::Index b = 0; b < kv2.cols(); ++b)
            dk(a, b) = (xp2.block(a, b, rows, cols) * go).sum();
        g.accumulate(kernel.id, dk);
      }
    };
  return out;
}

Var Graph::selu(Var a) {
  const Array& av = node(a.id).value;
  Array result =
      (av > 0.0).select(kSeluScale * av, kSeluScale * kSeluAlpha * (av.exp() - 1.0));
  const bool rg = node(a.id).requires_grad;
  Var out = make(std::move(result), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a](Graph& g) {
      const Array& go = g.node(out.id).grad;
      const Array& av2 = g.node(a.id).value;
      const Array& yv = g.node(out.id).value;
      // d/dx for x <= 0 is scale*alpha*e^x == y + scale*alpha
      const Array slope =
          (av2 > 0.0).select(Array::Constant(av2.rows(), av2.cols(), kSeluScale),
                             yv + kSeluScale * kSeluAlpha);
      g.accumulate(a.id, go * slope);
    };
  return out;
}

Var Graph::sigmoid(Var a) {
  const Array& av = node(a.id).value;
  // Branch on sign for numerical stability at large |x|.
  Array result = (av >= 0.0).select(1.0 / (1.0 + (-av).exp()), av.exp() / (1.0 + av.exp()));
  const bool rg = node(a.id).requires_grad;
  Var out = make(std::move(result), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a](Graph& g) {
      const Array& yv = g.node(out.id).value;
      g.accumulate(a.id, g.node(out.id).grad * yv * (1.0 - yv));
    };
  return out;
}

Var Graph::log(Var a) {
  const bool rg = node(a.id).requires_grad;
  Var out = make(node(a.id).value.log(), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a](Graph& g) {
      g.accumulate(a.id, g.node(out.id).grad / g.node(a.id).value);
    };
  return out;
}

Var Graph::abs(Var a) {
  const bool rg = node(a.id).requires_grad;
  Var out = make(node(a.id).value.abs(), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a](Graph& g) {
      const Array& av2 = g.node(a.id).value;
      const Array sign = (av2 > 0.0).select(Array::Ones(av2.rows(), av2.cols()),
                                            (av2 < 0.0).cast<double>() * -1.0);
      g.accumulate(a.id, g.node(out.id).grad * sign);
    };
  return out;
}

Var Graph::diff_rows(Var a) {
  const Array& av = node(a.id).value;
  if (av.rows() < 2) throw InvalidInputError("diff_rows: need at least 2 rows");
  const Eigen::Index n = av.rows() - 1;
  Array result = av.bottomRows(n) - av.topRows(n);
  const bool rg = node(a.id).requires_grad;
  Var out = make(std::move(result), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a, n](Graph& g) {
      const Array& go = g.node(out.id).grad;
      const Array& av2 = g.node(a.id).value;
      Array da = Array::Zero(av2.rows(), av2.cols());
      da.bottomRows(n) += go;
      da.topRows(n) -= go;
      g.accumulate(a.id, da);
    };
  return out;
}

Var Graph::diff_cols(Var a) {
  const Array& av = node(a.id).value;
  if (av.cols() < 2) throw InvalidInputError("diff_cols: need at least 2 cols");
  const Eigen::Index n = av.cols() - 1;
  Array result = av.rightCols(n) - av.leftCols(n);
  const bool rg = node(a.id).requires_grad;
  Var out = make(std::move(result), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a, n](Graph& g) {
      const Array& go = g.node(out.id).grad;
      const Array& av2 = g.node(a.id).value;
      Array da = Array::Zero(av2.rows(), av2.cols());
      da.rightCols(n) += go;
      da.leftCols(n) -= go;
      g.accumulate(a.id, da);
    };
  return out;
}

Var Graph::sum(Var a) {
  Array s(1, 1);
  s(0, 0) = node(a.id).value.sum();
  const bool rg = node(a.id).requires_grad;
  Var out = make(std::move(s), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a](Graph& g) {
      const Array& av2 = g.node(a.id).value;
      g.accumulate(a.id,
                   Array::Constant(av2.rows(), av2.cols(), g.node(out.id).grad(0, 0)));
    };
  return out;
}

Var Graph::mean_cols(Var a) {
  const Array& av = node(a.id).value;
  Array result = av.rowwise().mean();
  const bool rg = node(a.id).requires_grad;
  Var out = make(std::move(result), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a](Graph& g) {
      const Array& av2 = g.node(a.id).value;
      const Array& go = g.node(out.id).grad;  // rows x 1
      const double inv = 1.0 / static_cast<double>(av2.cols());
      g.accumulate(a.id, (go.col(0) * inv).replicate(1, av2.cols()));
    };
  return out;
}

Var Graph::sum_scalars(std::span<const Var> xs) {
  if (xs.empty()) throw InvalidInputError("sum_scalars: empty input");
  Array s(1, 1);
  s(0, 0) = 0.0;
  bool rg = false;
  for (Var v : xs) {
    if (node(v.id).value.size() != 1)
      throw InvalidInputError("sum_scalars: all inputs must be 1x1");
    s(0, 0) += node(v.id).value(0, 0);
    rg = rg || node(v.id).requires_grad;
  }
  std::vector<Var> inputs(xs.begin(), xs.end());
  Var out = make(std::move(s), rg, nullptr);
  if (rg)
    node(out.id).back = [out, inputs](Graph& g) {
      const Array& go = g.node(out.id).grad;
      for (Var v : inputs) g.accumulate(v.id, go);
    };
  return out;
}

Var Graph::mean_scalars(std::span<const Var> xs) {
  return scale(sum_scalars(xs), 1.0 / static_cast<double>(xs.size()));
}

Var Graph::pick(Var a, Eigen::Index row, Eigen::Index col) {
  const Array& av = node(a.id).value;
  if (row < 0 || row >= av.rows() || col < 0 || col >= av.cols())
    throw InvalidInputError("pick: index out of range");
  Array s(1, 1);
  s(0, 0) = av(row, col);
  const bool rg = node(a.id).requires_grad;
  Var out = make(std::move(s), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a, row, col](Graph& g) {
      const Array& av2 = g.node(a.id).value;
      Array da = Array::Zero(av2.rows(), av2.cols());
      da(row, col) = g.node(out.id).grad(0, 0);
      g.accumulate(a.id, da);
    };
  return out;
}

Var Graph::log_softmax_col(Var a) {
  const Array& av = node(a.id).value;
  if (av.cols() != 1) throw InvalidInputError("log_softmax_col: input must be n x 1");
  const double m = av.maxCoeff();
  const double lse = m + std::log((av - m).exp().sum());
  Array result = av - lse;
  const bool rg = node(a.id).requires_grad;
  Var out = make(std::move(result), rg, nullptr);
  if (rg)
    node(out.id).back = [out, a](Graph& g) {
      const Array& go = g.node(out.id).grad;
      const Array softmax = g.node(out.id).value.exp();
      g.accumulate(a.id, go - softmax * go.sum());
    };
  return out;
}

Var Graph::mix_log_magnitude(const Eigen::ArrayXXcd& speech, const Eigen::ArrayXXcd& noise,
                             double gain, double amplitude_floor, Var mask) {
  const Array& mv = node(mask.id).value;
  if (speech.rows() != mv.rows() || speech.cols() != mv.cols() ||
      noise.rows() != mv.rows() || noise.cols() != mv.cols())
    throw InvalidInputError("mix_log_magnitude: shapes of speech, noise and mask must agree");
  if (!(amplitude_floor > 0.0))
    throw ConfigError("mix_log_magnitude: amplitude_floor must be positive");

  const Array zr = speech.real() + gain * (noise.real() * mv);
  const Array zi = speech.imag() + gain * (noise.imag() * mv);
  const Array mag2 = zr.square() + zi.square();
  const Array mag = mag2.sqrt();
  Array result = 20.0 * mag.max(amplitude_floor).log10();

  const bool rg = node(mask.id).requires_grad;
  Var out = make(std::move(result), rg, nullptr);
  if (rg) {
    // d out / d mask = (20/ln10) * gain * (zr*Nr + zi*Ni) / |z|^2 above the
    // floor, zero in the clipped region.
    Array factor = (mag > amplitude_floor)
                       .select(kDbPerLn * gain * (zr * noise.real() + zi * noise.imag()) /
                                   mag2.max(1e-300),
                               Array::Zero(mv.rows(), mv.cols()));
    node(out.id).back = [out, mask, factor = std::move(factor)](Graph& g) {
      g.accumulate(mask.id, g.node(out.id).grad * factor);
    };
  }
  return out;
}

}  // namespace importantaug::autodiff
