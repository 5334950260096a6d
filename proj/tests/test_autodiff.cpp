// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "importantaug/autodiff.hpp"

using namespace importantaug;
using autodiff::Graph;
using autodiff::Var;
using testutil::numeric_gradient;
using testutil::random_array;
using testutil::relative_error;

namespace {

// Verifies the analytic gradient of a scalar-valued graph against central
// finite differences on one input array.
void check_against_fd(const std::function<Var(Graph&, Var)>& build, const Eigen::ArrayXXd& x,
                      double tolerance = 1e-6, double step = 1e-6) {
  Graph g;
  Var leaf = g.leaf(x);
  Var out = build(g, leaf);
  g.backward(out);
  const Eigen::ArrayXXd analytic = g.grad(leaf);

  const Eigen::ArrayXXd numeric = numeric_gradient(
      [&](const Eigen::ArrayXXd& probe) {
        Graph h;
        Var l = h.leaf(probe);
        return h.scalar_value(build(h, l));
      },
      x, step);
  CHECK(relative_error(analytic, numeric) < tolerance);
}

}  // namespace

TEST_CASE("gradients of elementwise and reduction ops match finite differences") {
  Rng rng(101);
  const Eigen::ArrayXXd x = random_array(rng, 4, 5, 0.2, 1.5);  // positive: log-safe

  check_against_fd([](Graph& g, Var v) { return g.sum(g.scale(v, 2.5)); }, x);
  check_against_fd([](Graph& g, Var v) { return g.sum(g.add_scalar(v, -0.3)); }, x);
  check_against_fd([](Graph& g, Var v) { return g.sum(g.mul(v, v)); }, x);
  check_against_fd([](Graph& g, Var v) { return g.sum(g.log(v)); }, x);
  check_against_fd([](Graph& g, Var v) { return g.sum(g.sigmoid(v)); }, x);
  check_against_fd([](Graph& g, Var v) { return g.sum(g.mean_cols(g.mul(v, v))); }, x);
  check_against_fd([](Graph& g, Var v) { return g.pick(g.mul(v, v), 2, 3); }, x);
  check_against_fd([](Graph& g, Var v) { return g.sum(g.diff_rows(g.mul(v, v))); }, x);
  check_against_fd([](Graph& g, Var v) { return g.sum(g.diff_cols(g.mul(v, v))); }, x);

  // selu and abs away from their kinks.
  const Eigen::ArrayXXd mixed = random_array(rng, 4, 5, -2.0, 2.0);
  check_against_fd([](Graph& g, Var v) { return g.sum(g.selu(v)); }, mixed, 1e-5);
  check_against_fd([](Graph& g, Var v) { return g.sum(g.abs(v)); }, mixed, 1e-5);
}

TEST_CASE("gradients of linear-algebra ops match finite differences") {
  Rng rng(103);
  const Eigen::ArrayXXd x = random_array(rng, 3, 4);
  const Eigen::ArrayXXd w = random_array(rng, 5, 3);
  const Eigen::ArrayXXd bias = random_array(rng, 3, 1);

  // w.r.t. the right operand of a matmul
  check_against_fd(
      [&](Graph& g, Var v) { return g.sum(g.matmul(g.constant(w), v)); }, x);
  // w.r.t. the left operand
  {
    Graph g;
    Var lw = g.leaf(w);
    Var out = g.sum(g.matmul(lw, g.constant(x)));
    g.backward(out);
    const Eigen::ArrayXXd numeric = numeric_gradient(
        [&](const Eigen::ArrayXXd& probe) {
          Graph h;
          return h.scalar_value(h.sum(h.matmul(h.leaf(probe), h.constant(x))));
        },
        w);
    CHECK(relative_error(g.grad(lw), numeric) < 1e-6);
  }
  check_against_fd(
      [&](Graph& g, Var v) { return g.sum(g.add_col_broadcast(v, g.constant(bias))); }, x);
  check_against_fd(
      [&](Graph& g, Var v) {
        return g.sum(g.add_col_broadcast(g.constant(x), v));
      },
      bias);
  check_against_fd(
      [&](Graph& g, Var v) {
        return g.sum(g.add_scalar_broadcast(g.constant(x), v));
      },
      random_array(rng, 1, 1));
}

TEST_CASE("gradients of the convolution ops match finite differences") {
  Rng rng(107);
  const Eigen::ArrayXXd x = random_array(rng, 6, 10);
  const Eigen::ArrayXXd dw_kernel = random_array(rng, 6, 5);
  const Eigen::ArrayXXd kernel2d = random_array(rng, 3, 5);

  check_against_fd(
      [&](Graph& g, Var v) {
        return g.sum(g.mul(g.conv1d_depthwise(v, g.constant(dw_kernel)),
                           g.conv1d_depthwise(v, g.constant(dw_kernel))));
      },
      x, 1e-5);
  check_against_fd(
      [&](Graph& g, Var v) { return g.sum(g.conv1d_depthwise(g.constant(x), v)); },
      dw_kernel);
  check_against_fd(
      [&](Graph& g, Var v) {
        return g.sum(g.mul(g.conv2d(v, g.constant(kernel2d)), g.conv2d(v, g.constant(kernel2d))));
      },
      x, 1e-5);
  check_against_fd([&](Graph& g, Var v) { return g.sum(g.conv2d(g.constant(x), v)); },
                   kernel2d);
}

TEST_CASE("log_softmax gradient matches finite differences") {
  Rng rng(109);
  const Eigen::ArrayXXd logits = random_array(rng, 7, 1, -2.0, 2.0);
  check_against_fd(
      [](Graph& g, Var v) {
        // weighted mixture of two entries exercises the full Jacobian
        return g.add(g.pick(g.log_softmax_col(v), 3, 0),
                     g.scale(g.pick(g.log_softmax_col(v), 5, 0), 0.4));
      },
      logits, 1e-6);
}

TEST_CASE("mix_log_magnitude gradient w.r.t. the mask matches finite differences") {
  Rng rng(113);
  const auto speech = testutil::random_spec(rng, 5, 6).values;
  const auto noise = testutil::random_spec(rng, 5, 6).values;
  const Eigen::ArrayXXd mask = random_array(rng, 5, 6, 0.05, 0.95);
  const double gain = 1.8;

  check_against_fd(
      [&](Graph& g, Var v) {
        return g.sum(g.mix_log_magnitude(speech, noise, gain, 1e-8, v));
      },
      mask, 1e-5);
}

TEST_CASE("a constant loss produces zero gradients") {
  Graph g;
  Var leaf = g.leaf(Eigen::ArrayXXd::Ones(3, 3));
  Var loss = g.sum(g.constant(Eigen::ArrayXXd::Constant(2, 2, 4.0)));
  g.backward(loss);
  CHECK(g.grad(leaf).abs().maxCoeff() == 0.0);
}

TEST_CASE("the gradient of a plain sum is all ones") {
  Rng rng(127);
  Graph g;
  Var leaf = g.leaf(random_array(rng, 4, 6));
  g.backward(g.sum(leaf));
  CHECK((g.grad(leaf) - 1.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("backward is linear in the loss") {
  Rng rng(131);
  const Eigen::ArrayXXd x = random_array(rng, 3, 3, 0.3, 1.2);
  const double a = 1.7, b = -0.4;

  auto loss1 = [](Graph& g, Var v) { return g.sum(g.mul(v, v)); };
  auto loss2 = [](Graph& g, Var v) { return g.sum(g.log(v)); };

  Graph g1;
  Var v1 = g1.leaf(x);
  g1.backward(loss1(g1, v1));
  Graph g2;
  Var v2 = g2.leaf(x);
  g2.backward(loss2(g2, v2));
  Graph gc;
  Var vc = gc.leaf(x);
  gc.backward(gc.add(gc.scale(loss1(gc, vc), a), gc.scale(loss2(gc, vc), b)));

  const Eigen::ArrayXXd expected = a * g1.grad(v1) + b * g2.grad(v2);
  CHECK(relative_error(gc.grad(vc), expected) < 1e-9);
}

TEST_CASE("backward rejects non-finite and non-scalar outputs") {
  Graph g;
  Var leaf = g.leaf(Eigen::ArrayXXd::Zero(2, 2));
  Var bad = g.log(leaf);  // log(0) = -inf
  CHECK_THROWS_AS(g.backward(g.sum(bad)), NumericError);

  Graph g2;
  Var matrix = g2.leaf(Eigen::ArrayXXd::Ones(2, 2));
  CHECK_THROWS_AS(g2.backward(matrix), InvalidInputError);
}
