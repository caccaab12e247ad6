#include "daelstm/nn/dense.hpp"

#include <cmath>

#include "daelstm/errors.hpp"
#include "daelstm/simd/kernels.hpp"

namespace daelstm {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::identity:
      return "identity";
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
    case Activation::sigmoid:
      return "sigmoid";
  }
  return "identity";
}

Activation activation_from_name(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  throw DataError("unknown activation '" + std::string(name) + "'");
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::identity:
      return x;
    case Activation::relu:
      return x > 0.0 ? x : 0.0;
    case Activation::tanh:
      return std::tanh(x);
    case Activation::sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

double activation_derivative(Activation a, double y) {
  switch (a) {
    case Activation::identity:
      return 1.0;
    case Activation::relu:
      return y > 0.0 ? 1.0 : 0.0;
    case Activation::tanh:
      return 1.0 - y * y;
    case Activation::sigmoid:
      return y * (1.0 - y);
  }
  return 1.0;
}

DenseLayer DenseLayer::uniform_init(std::size_t in, std::size_t out, Activation act, Rng& rng) {
  DenseLayer layer{Matrix(out, in), Vector(out, 0.0), act};
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& w : layer.weights.values()) w = rng.uniform(-bound, bound);
  for (double& b : layer.bias) b = rng.uniform(-bound, bound);
  return layer;
}

DenseLayer DenseLayer::zeros_like() const {
  return DenseLayer{Matrix(out_dim(), in_dim()), Vector(out_dim(), 0.0), activation};
}

void DenseLayer::append_tensors(const std::string& prefix, TensorList& out) {
  out.push_back({prefix + ".weight", {out_dim(), in_dim()}, weights.values()});
  out.push_back({prefix + ".bias", {bias.size()}, bias});
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& input) {
  require_shape(input.cols() == layer.in_dim(), "dense_forward: input width " +
                                                    std::to_string(input.cols()) + " != layer in-dim " +
                                                    std::to_string(layer.in_dim()));
  const std::size_t out_dim = layer.out_dim();
  Matrix out(input.rows(), out_dim);
  for (std::size_t b = 0; b < input.rows(); ++b) {
    const auto x = input.row(b);
    auto y = out.row(b);
    for (std::size_t o = 0; o < out_dim; ++o) {
      y[o] = activate(layer.activation, simd::dot(layer.weights.row(o), x) + layer.bias[o]);
    }
  }
  return out;
}

void dense_backward_into(const DenseLayer& layer, const Matrix& input, const Matrix& output,
                         const Matrix& upstream, DenseLayer& grad, Matrix* input_grad) {
  const std::size_t batch = input.rows();
  require_shape(input.cols() == layer.in_dim(), "dense_backward: input width mismatch");
  require_shape(output.rows() == batch && output.cols() == layer.out_dim(),
                "dense_backward: output shape mismatch");
  require_shape(upstream.rows() == batch && upstream.cols() == layer.out_dim(),
                "dense_backward: upstream shape mismatch");
  require_shape(grad.weights.rows() == layer.out_dim() && grad.weights.cols() == layer.in_dim(),
                "dense_backward: gradient container shape mismatch");

  Matrix delta(batch, layer.out_dim());
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < layer.out_dim(); ++o) {
      delta(b, o) = upstream(b, o) * activation_derivative(layer.activation, output(b, o));
    }
  }
  for (std::size_t o = 0; o < layer.out_dim(); ++o) {
    auto gw = grad.weights.row(o);
    double gb = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const double d = delta(b, o);
      if (d == 0.0) continue;
      simd::axpy(d, input.row(b), gw);
      gb += d;
    }
    grad.bias[o] += gb;
  }
  if (input_grad != nullptr) {
    *input_grad = Matrix(batch, layer.in_dim());
    for (std::size_t b = 0; b < batch; ++b) {
      auto gx = input_grad->row(b);
      for (std::size_t o = 0; o < layer.out_dim(); ++o) {
        const double d = delta(b, o);
        if (d != 0.0) simd::axpy(d, layer.weights.row(o), gx);
      }
    }
  }
}

DenseGrads dense_backward(const DenseLayer& layer, const Matrix& input, const Matrix& output,
                          const Matrix& upstream) {
  DenseLayer grad = layer.zeros_like();
  DenseGrads out;
  dense_backward_into(layer, input, output, upstream, grad, &out.input);
  out.weights = std::move(grad.weights);
  out.bias = std::move(grad.bias);
  return out;
}

DenseGrads dense_backward(const DenseLayer& layer, const Matrix& input, const Matrix& upstream) {
  return dense_backward(layer, input, dense_forward(layer, input), upstream);
}

}  // namespace daelstm
