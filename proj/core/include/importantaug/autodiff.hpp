// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "importantaug/errors.hpp"

namespace importantaug::autodiff {

using Array = Eigen::ArrayXXd;

// Handle to a node in a Graph. Valid only for the graph that created it.
struct Var {
  int id = -1;
};

// Reverse-mode automatic differentiation over 2-D double arrays.
//
// A Graph is a single-use tape: build the computation forward, call
// backward() on a scalar output, then read gradients of the leaves.
// Nodes created with constant() are excluded from differentiation; gradients
// flow through them but are not accumulated into them. Scalars are 1x1
// arrays.
//
// Not thread-safe; build and differentiate a graph from one thread.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaf that participates in differentiation.
  Var leaf(Array value);
  // Leaf treated as a constant (no gradient accumulated).
  Var constant(Array value);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var scale(Var a, double s);
  Var add_scalar(Var a, double s);
  Var neg(Var a) { return scale(a, -1.0); }

  // Matrix product of an m x k and a k x n node.
  Var matmul(Var a, Var b);

  // Adds a column vector (rows x 1) to every column of a rows x cols node.
  Var add_col_broadcast(Var a, Var bias);
  // Adds a 1x1 node to every entry.
  Var add_scalar_broadcast(Var a, Var bias);

  // Per-row 1-D convolution along time with zero same-padding:
  //   out(f, t) = sum_j kernel(f, j) * x(f, t + j - (k-1)/2)
  Var conv1d_depthwise(Var x, Var kernel);

  // Single-channel 2-D convolution with zero same-padding (odd kernel dims).
  Var conv2d(Var x, Var kernel);

  Var selu(Var a);
  Var sigmoid(Var a);
  Var log(Var a);
  Var abs(Var a);

  // Forward differences: rows (F-1) x T, cols F x (T-1).
  Var diff_rows(Var a);
  Var diff_cols(Var a);

  Var sum(Var a);                       // -> 1x1
  Var mean_cols(Var a);                 // rows x cols -> rows x 1
  Var sum_scalars(std::span<const Var> xs);
  Var mean_scalars(std::span<const Var> xs);
  Var pick(Var a, Eigen::Index row, Eigen::Index col);  // -> 1x1

  // Log-softmax of a column vector (n x 1).
  Var log_softmax_col(Var a);

  // Fused mixing feature: 20*log10(max(|S + gain*N.*M|, floor)) where S and
  // N are complex constants and M is the (real) differentiable mask.
  Var mix_log_magnitude(const Eigen::ArrayXXcd& speech, const Eigen::ArrayXXcd& noise,
                        double gain, double amplitude_floor, Var mask);

  // Runs the tape in reverse from a scalar output. Throws NumericError when
  // the output value is not finite.
  void backward(Var output);

  const Array& value(Var v) const { return node(v.id).value; }
  // Gradient of the last backward() output w.r.t. v; zeros when no gradient
  // reached v. Only meaningful for nodes created with leaf().
  Array grad(Var v) const;

  double scalar_value(Var v) const;

 private:
  struct Node {
    Array value;
    Array grad;
    bool requires_grad = false;
    bool grad_alloc = false;
    std::function<void(Graph&)> back;
  };

  Node& node(int id) { return nodes_[static_cast<size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }

  Var make(Array value, bool requires_grad, std::function<void(Graph&)> back);
  // Accumulates g into the node's gradient buffer if it wants gradients.
  void accumulate(int id, const Array& g);
  Array& grad_buffer(int id);

  std::vector<Node> nodes_;
};

}  // namespace importantaug::autodiff
