#pragma once

#include <span>
#include <string>

#include "daelstm/nn/matrix.hpp"
#include "daelstm/nn/rng.hpp"
#include "daelstm/nn/tensor.hpp"

namespace daelstm {

/// Gate blocks are stacked row-wise in the fixed order
/// (input, forget, cell-candidate, output), each `hidden` rows tall.
struct LstmCell {
  Matrix input_weights;   // 4H x in
  Matrix hidden_weights;  // 4H x H
  Vector bias;            // 4H

  std::size_t input_size() const { return input_weights.cols(); }
  std::size_t hidden_size() const { return hidden_weights.cols(); }

  /// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] with fan_in = in + H;
  /// gate biases zero except the forget block, set to `forget_bias`.
  static LstmCell uniform_init(std::size_t in, std::size_t hidden, Rng& rng, double forget_bias = 1.0);
  LstmCell zeros_like() const;
  void append_tensors(const std::string& prefix, TensorList& out);
};

struct LstmState {
  Vector hidden;
  Vector cell;

  static LstmState zeros(std::size_t hidden_size) {
    return {Vector(hidden_size, 0.0), Vector(hidden_size, 0.0)};
  }
};

struct LstmStepResult {
  Vector output;
  LstmState state;
};

/// i, f, o = sigmoid; g = tanh; c' = f*c + i*g; h = o*tanh(c'). Output is h.
LstmStepResult lstm_step(const LstmCell& cell, const LstmState& state, std::span<const double> input);

/// Everything the backward pass of one step needs.
struct LstmStepCache {
  Vector input;
  LstmState prev;
  Vector gates;  // post-activation, 4H in gate order
  Vector cell;
  Vector cell_tanh;
};

/// Forward step that records a cache and advances `state` in place.
void lstm_step_cached(const LstmCell& cell, LstmState& state, std::span<const double> input,
                      LstmStepCache& cache);

/// Backward through one step. `d_hidden`/`d_cell` are the total gradients
/// arriving at this step's h and c'. Parameter gradients accumulate into
/// `grad`; gradients for the previous state are written to `d_prev_hidden`
/// and `d_prev_cell`, and for the input to `d_input` when non-null.
void lstm_step_backward(const LstmCell& cell, const LstmStepCache& cache,
                        std::span<const double> d_hidden, std::span<const double> d_cell,
                        LstmCell& grad, Vector& d_prev_hidden, Vector& d_prev_cell, Vector* d_input);

}  // namespace daelstm
