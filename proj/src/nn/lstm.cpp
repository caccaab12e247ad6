#include "daelstm/nn/lstm.hpp"

#include <cmath>

#include "daelstm/errors.hpp"
#include "daelstm/simd/kernels.hpp"

namespace daelstm {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_step_shapes(const LstmCell& cell, const LstmState& state, std::size_t input_len) {
  require_shape(input_len == cell.input_size(), "lstm_step: input length " + std::to_string(input_len) +
                                                    " != cell in-dim " + std::to_string(cell.input_size()));
  require_shape(state.hidden.size() == cell.hidden_size() && state.cell.size() == cell.hidden_size(),
                "lstm_step: state size != hidden size");
}

// Fills gates (post-activation) and the new cell value.
void forward_gates(const LstmCell& cell, const LstmState& state, std::span<const double> input,
                   Vector& gates, Vector& new_cell) {
  const std::size_t h = cell.hidden_size();
  gates.resize(4 * h);
  for (std::size_t r = 0; r < 4 * h; ++r) {
    const double z = simd::dot(cell.input_weights.row(r), input) +
                     simd::dot(cell.hidden_weights.row(r), state.hidden) + cell.bias[r];
    gates[r] = (r >= 2 * h && r < 3 * h) ? std::tanh(z) : sigmoid(z);
  }
  new_cell.resize(h);
  for (std::size_t j = 0; j < h; ++j) {
    new_cell[j] = gates[h + j] * state.cell[j] + gates[j] * gates[2 * h + j];
  }
}

}  // namespace

LstmCell LstmCell::uniform_init(std::size_t in, std::size_t hidden, Rng& rng, double forget_bias) {
  LstmCell cell{Matrix(4 * hidden, in), Matrix(4 * hidden, hidden), Vector(4 * hidden, 0.0)};
  const double bound = 1.0 / std::sqrt(static_cast<double>(in + hidden));
  for (double& w : cell.input_weights.values()) w = rng.uniform(-bound, bound);
  for (double& w : cell.hidden_weights.values()) w = rng.uniform(-bound, bound);
  for (std::size_t j = 0; j < hidden; ++j) cell.bias[hidden + j] = forget_bias;
  return cell;
}

LstmCell LstmCell::zeros_like() const {
  return LstmCell{Matrix(input_weights.rows(), input_weights.cols()),
                  Matrix(hidden_weights.rows(), hidden_weights.cols()), Vector(bias.size(), 0.0)};
}

void LstmCell::append_tensors(const std::string& prefix, TensorList& out) {
  out.push_back({prefix + ".w_input", {input_weights.rows(), input_weights.cols()}, input_weights.values()});
  out.push_back({prefix + ".w_hidden", {hidden_weights.rows(), hidden_weights.cols()}, hidden_weights.values()});
  out.push_back({prefix + ".bias", {bias.size()}, bias});
}

LstmStepResult lstm_step(const LstmCell& cell, const LstmState& state, std::span<const double> input) {
  check_step_shapes(cell, state, input.size());
  const std::size_t h = cell.hidden_size();
  Vector gates;
  LstmStepResult result;
  forward_gates(cell, state, input, gates, result.state.cell);
  result.state.hidden.resize(h);
  for (std::size_t j = 0; j < h; ++j) {
    result.state.hidden[j] = gates[3 * h + j] * std::tanh(result.state.cell[j]);
  }
  result.output = result.state.hidden;
  return result;
}

void lstm_step_cached(const LstmCell& cell, LstmState& state, std::span<const double> input,
                      LstmStepCache& cache) {
  check_step_shapes(cell, state, input.size());
  const std::size_t h = cell.hidden_size();
  cache.input.assign(input.begin(), input.end());
  cache.prev = state;
  forward_gates(cell, state, input, cache.gates, cache.cell);
  cache.cell_tanh.resize(h);
  for (std::size_t j = 0; j < h; ++j) {
    cache.cell_tanh[j] = std::tanh(cache.cell[j]);
    state.hidden[j] = cache.gates[3 * h + j] * cache.cell_tanh[j];
  }
  state.cell = cache.cell;
}

void lstm_step_backward(const LstmCell& cell, const LstmStepCache& cache,
                        std::span<const double> d_hidden, std::span<const double> d_cell,
                        LstmCell& grad, Vector& d_prev_hidden, Vector& d_prev_cell, Vector* d_input) {
  const std::size_t h = cell.hidden_size();
  require_shape(d_hidden.size() == h && d_cell.size() == h, "lstm_step_backward: gradient size mismatch");
  const Vector& g = cache.gates;

  Vector dz(4 * h);
  d_prev_cell.assign(h, 0.0);
  for (std::size_t j = 0; j < h; ++j) {
    const double i = g[j];
    const double f = g[h + j];
    const double c_hat = g[2 * h + j];
    const double o = g[3 * h + j];
    const double tc = cache.cell_tanh[j];
    const double dc = d_cell[j] + d_hidden[j] * o * (1.0 - tc * tc);
    dz[j] = dc * c_hat * i * (1.0 - i);
    dz[h + j] = dc * cache.prev.cell[j] * f * (1.0 - f);
    dz[2 * h + j] = dc * i * (1.0 - c_hat * c_hat);
    dz[3 * h + j] = d_hidden[j] * tc * o * (1.0 - o);
    d_prev_cell[j] = dc * f;
  }

  d_prev_hidden.assign(h, 0.0);
  if (d_input != nullptr) d_input->assign(cell.input_size(), 0.0);
  for (std::size_t r = 0; r < 4 * h; ++r) {
    const double d = dz[r];
    if (d == 0.0) continue;
    simd::axpy(d, cache.input, grad.input_weights.row(r));
    simd::axpy(d, cache.prev.hidden, grad.hidden_weights.row(r));
    grad.bias[r] += d;
    simd::axpy(d, cell.hidden_weights.row(r), d_prev_hidden);
    if (d_input != nullptr) simd::axpy(d, cell.input_weights.row(r), *d_input);
  }
}

}  // namespace daelstm
