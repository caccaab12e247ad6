#include "daelstm/nn/recurrent.hpp"

#include "daelstm/errors.hpp"
#include "daelstm/nn/loss.hpp"

namespace daelstm {

RecurrentStack RecurrentStack::uniform_init(std::size_t input_size, std::span<const std::size_t> hidden_sizes,
                                            std::size_t output_size, Activation head_activation, Rng& rng) {
  require_shape(!hidden_sizes.empty(), "recurrent stack needs at least one layer");
  RecurrentStack stack;
  std::size_t in = input_size;
  for (std::size_t h : hidden_sizes) {
    stack.cells.push_back(LstmCell::uniform_init(in, h, rng));
    in = h;
  }
  stack.head = DenseLayer::uniform_init(in, output_size, head_activation, rng);
  return stack;
}

RecurrentStack RecurrentStack::zeros_like() const {
  RecurrentStack z;
  for (const auto& c : cells) z.cells.push_back(c.zeros_like());
  z.head = head.zeros_like();
  return z;
}

TensorList RecurrentStack::tensors() {
  TensorList out;
  for (std::size_t k = 0; k < cells.size(); ++k) cells[k].append_tensors("lstm" + std::to_string(k), out);
  head.append_tensors("head", out);
  return out;
}

ConstTensorList RecurrentStack::tensors() const {
  return const_view(const_cast<RecurrentStack*>(this)->tensors());
}

StackState zero_state(const RecurrentStack& stack) {
  StackState s;
  for (const auto& c : stack.cells) s.push_back(LstmState::zeros(c.hidden_size()));
  return s;
}

Vector stack_step(const RecurrentStack& stack, StackState& state, std::span<const double> input) {
  require_shape(state.size() == stack.depth(), "stack_step: state depth mismatch");
  Vector x(input.begin(), input.end());
  for (std::size_t k = 0; k < stack.depth(); ++k) {
    auto r = lstm_step(stack.cells[k], state[k], x);
    state[k] = std::move(r.state);
    x = std::move(r.output);
  }
  const std::size_t width = x.size();
  Matrix top(1, width, std::move(x));
  Matrix y = dense_forward(stack.head, top);
  return Vector(y.values().begin(), y.values().end());
}

StackTrace stack_forward(const RecurrentStack& stack, const Matrix& inputs) {
  require_shape(inputs.cols() == stack.input_size(), "stack_forward: input width mismatch");
  const std::size_t steps = inputs.rows();
  StackTrace trace;
  trace.steps.resize(steps, std::vector<LstmStepCache>(stack.depth()));
  trace.top_hidden = Matrix(steps, stack.cells.back().hidden_size());
  StackState state = zero_state(stack);
  for (std::size_t t = 0; t < steps; ++t) {
    std::span<const double> x = inputs.row(t);
    for (std::size_t k = 0; k < stack.depth(); ++k) {
      lstm_step_cached(stack.cells[k], state[k], x, trace.steps[t][k]);
      x = state[k].hidden;
    }
    std::copy(x.begin(), x.end(), trace.top_hidden.row(t).begin());
  }
  trace.outputs = dense_forward(stack.head, trace.top_hidden);
  return trace;
}

Matrix stack_backward(const RecurrentStack& stack, const StackTrace& trace, const Matrix& output_grads,
                      RecurrentStack& grads) {
  const std::size_t steps = trace.steps.size();
  require_shape(output_grads.rows() == steps && output_grads.cols() == stack.output_size(),
                "stack_backward: output gradient shape mismatch");
  Matrix d_above;
  dense_backward_into(stack.head, trace.top_hidden, trace.outputs, output_grads, grads.head, &d_above);

  for (std::size_t k = stack.depth(); k-- > 0;) {
    const LstmCell& cell = stack.cells[k];
    const std::size_t h = cell.hidden_size();
    Matrix d_below(steps, cell.input_size());
    Vector dh_next(h, 0.0);
    Vector dc_next(h, 0.0);
    Vector dh(h);
    Vector d_prev_h;
    Vector d_prev_c;
    Vector d_in;
    for (std::size_t t = steps; t-- > 0;) {
      const auto above = d_above.row(t);
      for (std::size_t j = 0; j < h; ++j) dh[j] = above[j] + dh_next[j];
      lstm_step_backward(cell, trace.steps[t][k], dh, dc_next, grads.cells[k], d_prev_h, d_prev_c, &d_in);
      std::copy(d_in.begin(), d_in.end(), d_below.row(t).begin());
      dh_next.swap(d_prev_h);
      dc_next.swap(d_prev_c);
    }
    d_above = std::move(d_below);
  }
  return d_above;
}

BpttResult bptt(const RecurrentStack& stack, const Matrix& inputs, const Matrix& targets,
                const BpttOptions& options) {
  if (inputs.rows() == 0) throw ShapeError("bptt: empty sequence");
  require_shape(inputs.rows() == targets.rows(), "bptt: input and target lengths differ");
  require_shape(targets.cols() == stack.output_size(), "bptt: target width mismatch");
  const StackTrace trace = stack_forward(stack, inputs);
  const double inv_t = 1.0 / static_cast<double>(inputs.rows());

  BpttResult result;
  Matrix d_out(inputs.rows(), stack.output_size());
  for (std::size_t t = 0; t < inputs.rows(); ++t) {
    const auto y = trace.outputs.row(t);
    const auto target = targets.row(t);
    result.loss += squared_error(y, target) * inv_t;
    auto d = d_out.row(t);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = 2.0 * (y[j] - target[j]) * inv_t;
  }
  result.grads = stack.zeros_like();
  stack_backward(stack, trace, d_out, result.grads);
  result.grad_norm = clip_global_norm(result.grads.tensors(), options.clip_norm);
  return result;
}

}  // namespace daelstm
