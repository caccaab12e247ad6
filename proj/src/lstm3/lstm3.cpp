#include "daelstm/lstm3/lstm3.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "daelstm/data/corrupt.hpp"
#include "daelstm/errors.hpp"
#include "daelstm/nn/loss.hpp"

namespace daelstm {

Lstm3Model::Lstm3Model(RecurrentStack stack) : stack_(std::move(stack)) {
  require_shape(stack_.depth() == kLayers, "LSTM3LR needs exactly 3 cells");
  require_shape(stack_.head.activation == Activation::identity, "LSTM3LR projection must be linear");
  require_shape(stack_.output_size() == stack_.input_size(), "LSTM3LR projection must return to pose dims");
}

Lstm3Model Lstm3Model::create(std::size_t pose_dims, std::size_t hidden, Rng& rng) {
  if (hidden == 0) throw ConfigError("LSTM hidden size must be positive");
  const std::array<std::size_t, kLayers> sizes{hidden, hidden, hidden};
  return Lstm3Model(RecurrentStack::uniform_init(pose_dims, sizes, pose_dims, Activation::identity, rng));
}

Lstm3Model Lstm3Model::zeros(std::size_t pose_dims, std::size_t hidden) {
  RecurrentStack stack;
  std::size_t in = pose_dims;
  for (std::size_t k = 0; k < kLayers; ++k) {
    stack.cells.push_back(LstmCell{Matrix(4 * hidden, in), Matrix(4 * hidden, hidden), Vector(4 * hidden, 0.0)});
    in = hidden;
  }
  stack.head = DenseLayer{Matrix(pose_dims, hidden), Vector(pose_dims, 0.0), Activation::identity};
  return Lstm3Model(std::move(stack));
}

Lstm3Model Lstm3Model::from_architecture(const nlohmann::json& architecture) {
  return zeros(architecture.at("pose_dims").get<std::size_t>(), architecture.at("hidden").get<std::size_t>());
}

nlohmann::json Lstm3Model::architecture() const {
  return {{"pose_dims", pose_dims()}, {"hidden", hidden_size()}, {"layers", kLayers}};
}

RolloutState initial_rollout_state(const Lstm3Model& model) {
  return {zero_state(model.stack()), Vector(model.pose_dims(), 0.0)};
}

Vector predict_step(const Lstm3Model& model, RolloutState& state, std::span<const double> pose) {
  require_shape(pose.size() == model.pose_dims(), "predict_step: pose width " + std::to_string(pose.size()) +
                                                      " != model dims " + std::to_string(model.pose_dims()));
  Vector next = stack_step(model.stack(), state.layers, pose);
  state.last_pose = next;
  return next;
}

void LstmTrainConfig::validate() const {
  if (window == 0) throw ConfigError("LSTM window must be positive");
  schedule.validate();
  if (!(optimizer.learning_rate > 0.0)) throw ConfigError("LSTM learning rate must be positive");
}

double lstm_validation_loss(const Lstm3Model& model, std::span<const MotionSequence> sequences) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& s : sequences) {
    if (s.length() < 2) continue;
    RolloutState state = initial_rollout_state(model);
    for (std::size_t t = 0; t + 1 < s.length(); ++t) {
      const Vector y = predict_step(model, state, s.frames.row(t));
      total += squared_error(y, s.frames.row(t + 1));
      ++count;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

namespace {

struct Window {
  std::size_t sequence;
  std::size_t start;
  std::size_t length;
};

std::vector<Window> make_windows(std::span<const MotionSequence> train, std::size_t window) {
  std::vector<Window> out;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const std::size_t pairs = train[i].length() - 1;
    for (std::size_t s = 0; s < pairs; s += window) out.push_back({i, s, std::min(window, pairs - s)});
  }
  return out;
}

}  // namespace

TrainingReport train_lstm(Lstm3Model& model, std::span<const MotionSequence> train,
                          std::span<const MotionSequence> validation, const LstmTrainConfig& config, Rng& rng) {
  config.validate();
  if (train.empty()) throw DataError("train_lstm: empty training set");
  for (const auto& s : train) {
    if (s.length() < 2) throw DataError("train_lstm: sequences need at least 2 frames");
    require_shape(s.dims() == model.pose_dims(), "train_lstm: data width != model dims");
  }
  TrainingReport report;
  report.stage = "lstm";
  const bool has_val = !validation.empty();
  report.initial_validation_loss = lstm_validation_loss(model, has_val ? validation : train);

  Optimizer optimizer(config.optimizer);
  std::vector<Window> windows = make_windows(train, config.window);
  const BpttOptions bptt_options{config.clip_norm};

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const CurriculumStage stage = config.schedule.stage(config.schedule.stage_for_epoch(epoch, config.epochs));
    rng.shuffle(std::span(windows));
    double loss_sum = 0.0;
    for (const Window& w : windows) {
      const Matrix& frames = train[w.sequence].frames;
      Matrix inputs = frames.slice_rows(w.start, w.start + w.length);
      const Matrix targets = frames.slice_rows(w.start + 1, w.start + w.length + 1);
      add_gaussian_noise(inputs.values(), stage.noise_variance, rng);
      BpttResult r = bptt(model.stack(), inputs, targets, bptt_options);
      if (!std::isfinite(r.loss)) {
        throw DivergenceError("train_lstm: non-finite loss in epoch " + std::to_string(epoch + 1));
      }
      optimizer.step(model.tensors(), std::as_const(r.grads).tensors());
      loss_sum += r.loss;
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.train_loss = loss_sum / static_cast<double>(windows.size());
    rec.validation_loss = has_val ? lstm_validation_loss(model, validation) : rec.train_loss;
    if (!std::isfinite(rec.validation_loss)) {
      throw DivergenceError("train_lstm: non-finite validation loss in epoch " + std::to_string(epoch + 1));
    }
    rec.learning_rate = optimizer.learning_rate();
    rec.noise_variance = stage.noise_variance;
    report.epochs.push_back(rec);
    optimizer.end_epoch(rec.validation_loss);
  }
  report.halvings = optimizer.halvings();
  return report;
}

MotionSequence rollout_unfiltered(const Lstm3Model& model, const Matrix& seed, std::size_t horizon, double fps,
                                  const RolloutObserver& observer) {
  if (seed.rows() == 0) throw DataError("rollout: empty seed");
  if (horizon == 0) throw std::invalid_argument("rollout: horizon must be at least 1");
  require_shape(seed.cols() == model.pose_dims(), "rollout: seed width != model dims");
  RolloutState state = initial_rollout_state(model);
  for (std::size_t t = 0; t + 1 < seed.rows(); ++t) predict_step(model, state, seed.row(t));

  MotionSequence out;
  out.fps = fps;
  out.normalized = true;
  out.frames = Matrix(horizon, model.pose_dims());
  Vector input(seed.row(seed.rows() - 1).begin(), seed.row(seed.rows() - 1).end());
  for (std::size_t k = 0; k < horizon; ++k) {
    Vector next = predict_step(model, state, input);
    std::copy(next.begin(), next.end(), out.frames.row(k).begin());
    if (observer) observer({k, input, next, next});
    input = std::move(next);
  }
  return out;
}

double window_variance(const Matrix& frames, std::size_t begin, std::size_t end) {
  require_shape(begin < end && end <= frames.rows(), "window_variance: bad frame range");
  const double n = static_cast<double>(end - begin);
  double total = 0.0;
  for (std::size_t j = 0; j < frames.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t t = begin; t < end; ++t) mean += frames(t, j);
    mean /= n;
    double var = 0.0;
    for (std::size_t t = begin; t < end; ++t) var += (frames(t, j) - mean) * (frames(t, j) - mean);
    total += var / n;
  }
  return total / static_cast<double>(frames.cols());
}

}  // namespace daelstm
