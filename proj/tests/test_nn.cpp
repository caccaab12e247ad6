#include <doctest.h>

#include <cmath>
#include <limits>

#include "daelstm/errors.hpp"
#include "daelstm/nn/dense.hpp"
#include "daelstm/nn/loss.hpp"
#include "daelstm/nn/lstm.hpp"
#include "daelstm/nn/optimizer.hpp"
#include "daelstm/nn/recurrent.hpp"
#include "support/gradient_cases.hpp"
#include "support/lstm_oracle.hpp"

using namespace daelstm;
using testing::lstm_step_oracle;

namespace {

void zero(Matrix& m) { m.fill(0.0); }

}  // namespace

TEST_CASE("dense_forward worked examples") {
  DenseLayer id{Matrix::identity(2), {0.0, 0.0}, Activation::identity};
  CHECK(dense_forward(id, Matrix::from_rows({{3.0, -1.0}})) == Matrix::from_rows({{3.0, -1.0}}));

  DenseLayer affine{Matrix::from_rows({{1.0, 1.0}, {0.0, 2.0}}), {1.0, 0.0}, Activation::identity};
  CHECK(dense_forward(affine, Matrix::from_rows({{1.0, 2.0}})) == Matrix::from_rows({{4.0, 4.0}}));

  DenseLayer relu{Matrix::identity(2), {0.0, 0.0}, Activation::relu};
  CHECK(dense_forward(relu, Matrix::from_rows({{-5.0, 5.0}})) == Matrix::from_rows({{0.0, 5.0}}));

  CHECK_THROWS_AS(dense_forward(id, Matrix(1, 3)), ShapeError);
}

TEST_CASE("dense_backward of a linear layer") {
  DenseLayer layer{Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}}), {0.0, 0.0, 0.0}, Activation::identity};
  const Matrix input = Matrix::from_rows({{1.0, -2.0}, {0.5, 3.0}});
  const Matrix upstream(2, 3, 1.0);
  const DenseGrads g = dense_backward(layer, input, upstream);
  // upstream^T * input: every output row sees the column sums of the input.
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(g.weights(r, 0) == doctest::Approx(1.5));
    CHECK(g.weights(r, 1) == doctest::Approx(1.0));
    CHECK(g.bias[r] == doctest::Approx(2.0));
  }
  CHECK(g.input(0, 0) == doctest::Approx(9.0));
  CHECK(g.input(1, 1) == doctest::Approx(12.0));
}

TEST_CASE("relu takes subgradient 0 at the kink") {
  DenseLayer layer{Matrix::identity(1), {0.0}, Activation::relu};
  const DenseGrads g = dense_backward(layer, Matrix::from_rows({{0.0}}), Matrix::from_rows({{1.0}}));
  CHECK(g.input(0, 0) == 0.0);
  CHECK(g.weights(0, 0) == 0.0);
  CHECK(activation_derivative(Activation::relu, 0.0) == 0.0);
}

TEST_CASE("gradients match central differences") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    CAPTURE(seed);
    const auto dense = testing::gradcheck_dense(seed);
    CHECK_MESSAGE(dense.max_rel_error < 1e-6, dense.worst);
    const auto lstm = testing::gradcheck_lstm(seed);
    CHECK_MESSAGE(lstm.max_rel_error < 1e-5, lstm.worst);
  }
}

TEST_CASE("two-step two-unit LSTM gradient") {
  Rng rng(11);
  const std::size_t hidden[] = {2};
  RecurrentStack stack = RecurrentStack::uniform_init(2, hidden, 2, Activation::identity, rng);
  const Matrix x = Matrix::from_rows({{0.3, -0.7}, {1.1, 0.2}});
  const Matrix y = Matrix::from_rows({{0.1, 0.4}, {-0.5, 0.9}});
  BpttOptions opt;
  opt.clip_norm = 0.0;
  const BpttResult r = bptt(stack, x, y, opt);
  const auto check = testing::check_gradients(stack.tensors(), r.grads.tensors(), [&] { return bptt(stack, x, y, opt).loss; });
  CHECK(check.max_rel_error < 1e-5);
}

TEST_CASE("lstm_step zero cell gives zero output") {
  Rng rng(1);
  LstmCell cell = LstmCell::uniform_init(3, 4, rng, 0.0);
  zero(cell.input_weights);
  zero(cell.hidden_weights);
  std::fill(cell.bias.begin(), cell.bias.end(), 0.0);
  const Vector x{0.5, -2.0, 7.0};
  const auto r = lstm_step(cell, LstmState::zeros(4), x);
  for (double h : r.output) CHECK(h == 0.0);
  for (double c : r.state.cell) CHECK(c == 0.0);
}

TEST_CASE("forget gate saturation holds the cell") {
  Rng rng(3);
  LstmCell cell = LstmCell::uniform_init(2, 4, rng, 20.0);
  zero(cell.input_weights);
  zero(cell.hidden_weights);
  LstmState s = LstmState::zeros(4);
  s.cell = {0.9, -0.4, 0.05, -1.0};
  s.hidden = {0.1, 0.2, -0.3, 0.4};
  const auto r = lstm_step(cell, s, Vector{1.0, -1.0});
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(r.state.cell[j] - s.cell[j]) < 1e-8);
}

TEST_CASE("lstm_step agrees with a scalar-loop oracle") {
  Rng rng(5);
  const LstmCell cell = LstmCell::uniform_init(3, 4, rng);
  LstmState state = LstmState::zeros(4);
  LstmState oracle_state = state;
  for (int t = 0; t < 5; ++t) {
    const Vector x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto got = lstm_step(cell, state, x);
    const auto want = lstm_step_oracle(cell, oracle_state, x);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(got.output[j] == doctest::Approx(want.output[j]).epsilon(1e-13));
      CHECK(got.state.cell[j] == doctest::Approx(want.state.cell[j]).epsilon(1e-13));
    }
    state = got.state;
    oracle_state = want.state;
  }
  CHECK_THROWS_AS(lstm_step(cell, state, Vector{1.0}), ShapeError);
}

TEST_CASE("bptt edge cases") {
  Rng rng(9);
  const std::size_t hidden[] = {3, 3};
  const RecurrentStack stack = RecurrentStack::uniform_init(2, hidden, 2, Activation::identity, rng);

  SUBCASE("length one equals a single step backward") {
    const Matrix x = Matrix::from_rows({{0.2, 0.4}});
    const Matrix y = Matrix::from_rows({{1.0, -1.0}});
    BpttOptions opt;
    opt.clip_norm = 0.0;
    const BpttResult r = bptt(stack, x, y, opt);
    const StackTrace trace = stack_forward(stack, x);
    Matrix d(1, 2);
    for (std::size_t j = 0; j < 2; ++j) d(0, j) = 2.0 * (trace.outputs(0, j) - y(0, j));
    RecurrentStack g = stack.zeros_like();
    stack_backward(stack, trace, d, g);
    CHECK(flatten(r.grads.tensors()) == flatten(std::as_const(g).tensors()));
  }
  SUBCASE("targets equal to predictions give zero gradient") {
    const Matrix x = Matrix::from_rows({{0.2, 0.4}, {0.1, -0.3}, {0.0, 0.9}});
    const Matrix y = stack_forward(stack, x).outputs;
    const BpttResult r = bptt(stack, x, y);
    CHECK(r.loss == 0.0);
    for (double v : flatten(r.grads.tensors())) CHECK(v == 0.0);
  }
  SUBCASE("empty sequence") { CHECK_THROWS_AS(bptt(stack, Matrix(0, 2), Matrix(0, 2)), ShapeError); }
  SUBCASE("clipping bounds the global norm") {
    const Matrix x = Matrix::from_rows({{5.0, 5.0}, {5.0, 5.0}});
    const Matrix y = Matrix::from_rows({{100.0, -100.0}, {100.0, -100.0}});
    BpttOptions opt;
    opt.clip_norm = 5.0;
    const BpttResult r = bptt(stack, x, y, opt);
    CHECK(r.grad_norm > 5.0);
    CHECK(global_norm(r.grads.tensors()) == doctest::Approx(5.0));
  }
}

TEST_CASE("squared_error") {
  CHECK(squared_error(Vector{1.0, 2.0}, Vector{1.0, 2.0}) == 0.0);
  CHECK(squared_error(Vector{0.0, 0.0}, Vector{1.0, 1.0}) == 2.0);
  CHECK(squared_error(Vector{1.0, 2.0, 3.0}, Vector{2.0, 2.0, 2.0}) == 2.0);
  CHECK(squared_error(Vector{1e-9}, Vector{0.0}) > 0.0);
  CHECK_THROWS_AS(squared_error(Vector{1.0}, Vector{1.0, 2.0}), ShapeError);
}

TEST_CASE("softmax and cross entropy") {
  const Vector p = softmax(Vector{1000.0, 1000.0, -1000.0});
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[2] == 0.0);
  CHECK(cross_entropy(p, 2) == doctest::Approx(-std::log(1e-300)));
  CHECK(cross_entropy(p, 0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("dropout_mask") {
  Rng rng(21);
  for (double v : dropout_mask(rng, 100, 0.0)) CHECK(v == 1.0);
  for (double v : dropout_mask(rng, 100, 1.0)) CHECK(v == 0.0);
  for (double v : dropout_mask(rng, 100, 0.7, false)) CHECK(v == 1.0);
  CHECK_THROWS(dropout_mask(rng, 10, 1.5));
  CHECK_THROWS(dropout_mask(rng, 10, -0.1));

  const Vector half = dropout_mask(rng, 10000, 0.5);
  double zeros = 0.0;
  for (double v : half) zeros += v == 0.0 ? 1.0 : 0.0;
  CHECK(zeros / 10000.0 >= 0.48);
  CHECK(zeros / 10000.0 <= 0.52);

  for (double rate : {0.1, 0.3, 0.8}) {
    const Vector m = dropout_mask(rng, 100000, rate);
    double mean = 0.0;
    for (double v : m) mean += v;
    CHECK(std::abs(mean / 100000.0 - (1.0 - rate)) < 0.01);
  }
}

TEST_CASE("Rng streams") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
  CHECK(derive_seed(1, "dae") != derive_seed(1, "lstm"));
  CHECK(derive_seed(1, "dae") == derive_seed(1, "dae"));

  Rng g(7);
  double sum = 0.0, sq = 0.0, lo = 1.0, hi = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = g.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const double z = g.gaussian();
    sum += z;
    sq += z * z;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("sgd update and plateau halving") {
  OptimizerConfig cfg{0.005, 3, 0.0, OptimizerMethod::sgd};
  Optimizer opt(cfg);
  Vector p{1.0, -2.0};
  Vector g{1.0, 0.0};
  const TensorList params{{"p", {2}, p}};
  opt.step(params, {{"p", {2}, g}});
  CHECK(p[0] == doctest::Approx(0.995));
  CHECK(p[1] == -2.0);

  Vector zeros{0.0, 0.0};
  const Vector before = p;
  opt.step(params, {{"p", {2}, zeros}});
  CHECK(p == before);

  CHECK_FALSE(opt.end_epoch(1.0));
  CHECK_FALSE(opt.end_epoch(1.0));
  CHECK_FALSE(opt.end_epoch(1.5));
  CHECK(opt.end_epoch(1.2));
  CHECK(opt.learning_rate() == doctest::Approx(0.0025));
  CHECK(opt.halvings() == 1);
  CHECK_FALSE(opt.end_epoch(0.5));
  CHECK(opt.learning_rate() == doctest::Approx(0.0025));
}

TEST_CASE("sgd folds l2 into the gradient") {
  Optimizer opt(OptimizerConfig{0.1, 2, 0.5, OptimizerMethod::sgd});
  Vector p{2.0};
  Vector g{0.0};
  opt.step({{"p", {1}, p}}, {{"p", {1}, g}});
  CHECK(p[0] == doctest::Approx(2.0 - 0.1 * 0.5 * 2.0));
}

TEST_CASE("adam first step moves every coordinate by the learning rate") {
  Optimizer opt(OptimizerConfig{0.01, 2, 0.0, OptimizerMethod::adam});
  Vector p{0.0, 0.0, 0.0};
  Vector g{3.0, -0.2, 1e-3};
  opt.step({{"p", {3}, p}}, {{"p", {3}, g}});
  CHECK(p[0] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(p[2] == doctest::Approx(-0.01).epsilon(1e-4));
}

TEST_CASE("optimizer rejects bad input") {
  CHECK_THROWS_AS(Optimizer(OptimizerConfig{0.0}), ConfigError);
  CHECK_THROWS_AS(Optimizer(OptimizerConfig{0.1, 0}), ConfigError);
  CHECK_THROWS_AS(Optimizer(OptimizerConfig{0.1, 2, -1.0}), ConfigError);

  Optimizer opt(OptimizerConfig{0.1});
  Vector p{1.0, 2.0};
  Vector g{0.5, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(opt.step({{"p", {2}, p}}, {{"p", {2}, g}}), DivergenceError);
  CHECK(p == Vector{1.0, 2.0});
}

TEST_CASE("global norm clipping") {
  Vector a{3.0, 0.0};
  Vector b{4.0};
  const TensorList t{{"a", {2}, a}, {"b", {1}, b}};
  CHECK(clip_global_norm(t, 1.0) == doctest::Approx(5.0));
  CHECK(a[0] == doctest::Approx(0.6));
  CHECK(b[0] == doctest::Approx(0.8));
  CHECK(clip_global_norm(t, 0.0) == doctest::Approx(1.0));
  CHECK(a[0] == doctest::Approx(0.6));
}
