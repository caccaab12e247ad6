#pragma once

#include <span>
#include <vector>

#include "daelstm/nn/dense.hpp"
#include "daelstm/nn/lstm.hpp"

namespace daelstm {

/// Stacked LSTM cells followed by a dense head applied to the top hidden
/// state at every step. Layer k consumes layer k-1's hidden state; layer 0
/// consumes the external input.
struct RecurrentStack {
  std::vector<LstmCell> cells;
  DenseLayer head;

  static RecurrentStack uniform_init(std::size_t input_size, std::span<const std::size_t> hidden_sizes,
                                     std::size_t output_size, Activation head_activation, Rng& rng);

  std::size_t input_size() const { return cells.front().input_size(); }
  std::size_t output_size() const { return head.out_dim(); }
  std::size_t depth() const { return cells.size(); }

  RecurrentStack zeros_like() const;
  TensorList tensors();
  ConstTensorList tensors() const;
};

using StackState = std::vector<LstmState>;

StackState zero_state(const RecurrentStack& stack);

/// One step through every layer and the head; advances `state`.
Vector stack_step(const RecurrentStack& stack, StackState& state, std::span<const double> input);

/// Forward record over a whole sequence from the zero state.
struct StackTrace {
  std::vector<std::vector<LstmStepCache>> steps;  // [t][layer]
  Matrix top_hidden;                              // T x H_top
  Matrix outputs;                                 // T x out
};

StackTrace stack_forward(const RecurrentStack& stack, const Matrix& inputs);

/// Backpropagation through time given dL/d output at every step.
/// Accumulates into `grads` (a zeros_like() of `stack`). Returns dL/d inputs.
Matrix stack_backward(const RecurrentStack& stack, const StackTrace& trace, const Matrix& output_grads,
                      RecurrentStack& grads);

struct BpttOptions {
  /// Global-norm clipping threshold; <= 0 disables.
  double clip_norm = 5.0;
};

struct BpttResult {
  /// Mean over timesteps of the per-step squared error.
  double loss = 0.0;
  RecurrentStack grads;
  /// Gradient norm before clipping.
  double grad_norm = 0.0;
};

/// Squared-error regression loss over a sequence, averaged over timesteps,
/// and its clipped parameter gradient.
BpttResult bptt(const RecurrentStack& stack, const Matrix& inputs, const Matrix& targets,
                const BpttOptions& options = {});

}  // namespace daelstm
