#pragma once

#include <string>
#include <string_view>

#include "daelstm/nn/matrix.hpp"
#include "daelstm/nn/rng.hpp"
#include "daelstm/nn/tensor.hpp"

namespace daelstm {

enum class Activation { identity, relu, tanh, sigmoid };

std::string_view activation_name(Activation a);
Activation activation_from_name(std::string_view name);
double activate(Activation a, double x);
/// d act / d pre-activation, written in terms of the activation's output.
/// ReLU takes subgradient 0 at the kink (output 0).
double activation_derivative(Activation a, double output);

/// Affine map followed by an elementwise activation: y = act(x W^T + b).
struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
  Activation activation = Activation::identity;

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }

  /// Weights and biases uniform in [-1/sqrt(in), 1/sqrt(in)].
  static DenseLayer uniform_init(std::size_t in, std::size_t out, Activation act, Rng& rng);
  DenseLayer zeros_like() const;
  void append_tensors(const std::string& prefix, TensorList& out);
};

/// Row-wise forward pass over a batch [batch x in] -> [batch x out].
Matrix dense_forward(const DenseLayer& layer, const Matrix& input);

struct DenseGrads {
  Matrix input;    // batch x in
  Matrix weights;  // out x in
  Vector bias;     // out
};

DenseGrads dense_backward(const DenseLayer& layer, const Matrix& input, const Matrix& upstream);
/// Same as above with the forward output supplied instead of recomputed.
DenseGrads dense_backward(const DenseLayer& layer, const Matrix& input, const Matrix& output,
                          const Matrix& upstream);

/// Accumulates weight/bias gradients into `grad` and, when `input_grad` is
/// non-null, overwrites it with dL/d input.
void dense_backward_into(const DenseLayer& layer, const Matrix& input, const Matrix& output,
                         const Matrix& upstream, DenseLayer& grad, Matrix* input_grad);

}  // namespace daelstm
