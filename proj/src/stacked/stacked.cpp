#include "daelstm/stacked/stacked.hpp"

#include <cmath>

#include "daelstm/data/corrupt.hpp"
#include "daelstm/errors.hpp"
#include "daelstm/nn/loss.hpp"

namespace daelstm {

namespace {

void prefix(TensorList& list, const std::string& p) {
  for (auto& t : list) t.name = p + t.name;
}

}  // namespace

void StackedModel::validate() const {
  require_shape(lstm.pose_dims() == dae.input_dims(),
                "stacked: LSTM pose dims " + std::to_string(lstm.pose_dims()) + " != DAE input dims " +
                    std::to_string(dae.input_dims()));
}

StackedModel StackedModel::zeros_like() const { return {lstm.zeros_like(), dae.zeros_like(), fine_tuned}; }

TensorList StackedModel::tensors() {
  TensorList out = lstm.tensors();
  prefix(out, "lstm.");
  TensorList d = dae.tensors();
  prefix(d, "dae.");
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

ConstTensorList StackedModel::tensors() const { return const_view(const_cast<StackedModel*>(this)->tensors()); }

void FinetuneConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("finetune learning rate must be positive");
  if (schedule.empty()) throw ConfigError("finetune schedule must not be empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] >= 0.0 && schedule[i] <= 1.0)) throw ConfigError("finetune schedule value outside [0, 1]");
    if (i > 0 && schedule[i] > schedule[i - 1]) throw ConfigError("finetune schedule must be non-increasing");
  }
  if (schedule.back() != 0.0) throw ConfigError("finetune schedule must anneal to 0");
  if (!(internal_dropout >= 0.0 && internal_dropout < 1.0)) throw ConfigError("finetune internal dropout outside [0, 1)");
  if (lstm_loss_weight < 0.0 || dae_loss_weight < 0.0) throw ConfigError("finetune loss weights must be nonnegative");
  if (window == 0) throw ConfigError("finetune window must be positive");
}

FinetuneCorruption corruption_for_level(const FinetuneConfig& config, double level) {
  const double top = config.schedule.front();
  return {level, level, top > 0.0 ? config.internal_dropout * level / top : 0.0};
}

FinetuneLossResult finetune_loss_and_grads(const StackedModel& model, const Matrix& inputs, const Matrix& targets,
                                           const FinetuneCorruption& corruption, double lstm_weight,
                                           double dae_weight, Rng& rng) {
  model.validate();
  if (inputs.rows() == 0) throw ShapeError("finetune: empty window");
  require_shape(inputs.rows() == targets.rows(), "finetune: input/target lengths differ");
  const std::size_t steps = inputs.rows();
  const double inv_t = 1.0 / static_cast<double>(steps);

  Matrix noisy = inputs;
  add_gaussian_noise(noisy.values(), corruption.input_noise_variance, rng);
  const StackTrace trace = stack_forward(model.lstm.stack(), noisy);

  Matrix dae_in = trace.outputs;
  Matrix keep(steps, dae_in.cols(), 1.0);
  if (corruption.dae_input_dropout > 0.0) {
    for (std::size_t t = 0; t < steps; ++t) {
      drop_joints(keep.row(t), corruption.dae_input_dropout, model.dae.skeleton(), rng);
      auto row = dae_in.row(t);
      const auto k = keep.row(t);
      for (std::size_t j = 0; j < row.size(); ++j) row[j] *= k[j];
    }
  }
  const DaeTrace dae_trace = dae_forward_train(model.dae, dae_in, corruption.internal_dropout, rng);

  FinetuneLossResult result;
  Matrix d_lstm(steps, targets.cols());
  Matrix d_dae(steps, targets.cols());
  for (std::size_t t = 0; t < steps; ++t) {
    const auto y_lstm = trace.outputs.row(t);
    const auto y_dae = dae_trace.result.row(t);
    const auto target = targets.row(t);
    result.lstm_loss += squared_error(y_lstm, target) * inv_t;
    result.dae_loss += squared_error(y_dae, target) * inv_t;
    for (std::size_t j = 0; j < target.size(); ++j) {
      d_lstm(t, j) = lstm_weight * 2.0 * (y_lstm[j] - target[j]) * inv_t;
      d_dae(t, j) = dae_weight * 2.0 * (y_dae[j] - target[j]) * inv_t;
    }
  }
  result.loss = lstm_weight * result.lstm_loss + dae_weight * result.dae_loss;

  result.grads = model.zeros_like();
  const Matrix d_filter_in = dae_backward(model.dae, dae_trace, d_dae, result.grads.dae);
  for (std::size_t i = 0; i < d_lstm.size(); ++i) {
    d_lstm.values()[i] += d_filter_in.values()[i] * keep.values()[i];
  }
  stack_backward(model.lstm.stack(), trace, d_lstm, result.grads.lstm.stack());
  return result;
}

double filtered_validation_loss(const StackedModel& model, std::span<const MotionSequence> sequences) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& s : sequences) {
    if (s.length() < 2) continue;
    RolloutState state = initial_rollout_state(model.lstm);
    Matrix raw(s.length() - 1, s.dims());
    for (std::size_t t = 0; t + 1 < s.length(); ++t) {
      const Vector y = predict_step(model.lstm, state, s.frames.row(t));
      std::copy(y.begin(), y.end(), raw.row(t).begin());
    }
    const Matrix filtered = dae_filter_batch(model.dae, raw);
    for (std::size_t t = 0; t < filtered.rows(); ++t) total += squared_error(filtered.row(t), s.frames.row(t + 1));
    count += filtered.rows();
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

TrainingReport finetune(StackedModel& model, std::span<const MotionSequence> train,
                        std::span<const MotionSequence> validation, const FinetuneConfig& config, Rng& rng) {
  config.validate();
  model.validate();
  if (train.empty()) throw DataError("finetune: empty training set");

  struct Window {
    std::size_t sequence, start, length;
  };
  std::vector<Window> windows;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train[i].length() < 2) throw DataError("finetune: sequences need at least 2 frames");
    require_shape(train[i].dims() == model.lstm.pose_dims(), "finetune: data width != model dims");
    const std::size_t pairs = train[i].length() - 1;
    for (std::size_t s = 0; s < pairs; s += config.window) {
      windows.push_back({i, s, std::min(config.window, pairs - s)});
    }
  }

  TrainingReport report;
  report.stage = "finetune";
  const bool has_val = !validation.empty();
  report.initial_validation_loss = filtered_validation_loss(model, has_val ? validation : train);

  OptimizerConfig opt;
  opt.method = config.method;
  opt.learning_rate = config.learning_rate;
  opt.patience = config.patience;
  Optimizer optimizer(opt);
  const std::size_t total_steps = config.epochs * windows.size();
  const std::size_t stages = config.schedule.size();
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span(windows));
    double loss_sum = 0.0;
    FinetuneCorruption last{};
    for (const Window& w : windows) {
      const double progress = static_cast<double>(step) / static_cast<double>(total_steps);
      const std::size_t stage = std::min(stages - 1, static_cast<std::size_t>(progress * static_cast<double>(stages)));
      last = corruption_for_level(config, config.schedule[stage]);
      const Matrix& frames = train[w.sequence].frames;
      const Matrix inputs = frames.slice_rows(w.start, w.start + w.length);
      const Matrix targets = frames.slice_rows(w.start + 1, w.start + w.length + 1);
      FinetuneLossResult r =
          finetune_loss_and_grads(model, inputs, targets, last, config.lstm_loss_weight, config.dae_loss_weight, rng);
      if (!std::isfinite(r.loss)) {
        throw DivergenceError("finetune: non-finite loss in epoch " + std::to_string(epoch + 1));
      }
      const TensorList grads = r.grads.tensors();
      clip_global_norm(grads, config.clip_norm);
      optimizer.step(model.tensors(), const_view(grads));
      loss_sum += r.loss;
      ++step;
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.train_loss = loss_sum / static_cast<double>(windows.size());
    rec.validation_loss = has_val ? filtered_validation_loss(model, validation) : rec.train_loss;
    if (!std::isfinite(rec.validation_loss)) {
      throw DivergenceError("finetune: non-finite validation loss in epoch " + std::to_string(epoch + 1));
    }
    rec.learning_rate = optimizer.learning_rate();
    rec.noise_variance = last.input_noise_variance;
    rec.dropout_rate = last.dae_input_dropout;
    rec.internal_dropout = last.internal_dropout;
    report.epochs.push_back(rec);
    optimizer.end_epoch(rec.validation_loss);
  }
  report.halvings = optimizer.halvings();
  if (config.epochs > 0) model.fine_tuned = true;
  return report;
}

MotionSequence rollout_filtered(const StackedModel& model, const Matrix& seed, std::size_t horizon, double fps,
                                const RolloutObserver& observer) {
  model.validate();
  if (seed.rows() == 0) throw DataError("rollout: empty seed");
  if (horizon == 0) throw std::invalid_argument("rollout: horizon must be at least 1");
  require_shape(seed.cols() == model.lstm.pose_dims(), "rollout: seed width != model dims");
  RolloutState state = initial_rollout_state(model.lstm);
  for (std::size_t t = 0; t + 1 < seed.rows(); ++t) predict_step(model.lstm, state, seed.row(t));

  MotionSequence out;
  out.fps = fps;
  out.normalized = true;
  out.frames = Matrix(horizon, model.lstm.pose_dims());
  Vector input(seed.row(seed.rows() - 1).begin(), seed.row(seed.rows() - 1).end());
  for (std::size_t k = 0; k < horizon; ++k) {
    const Vector raw = predict_step(model.lstm, state, input);
    Vector filtered = dae_filter(model.dae, raw);
    std::copy(filtered.begin(), filtered.end(), out.frames.row(k).begin());
    if (observer) observer({k, input, raw, filtered});
    input = std::move(filtered);
  }
  return out;
}

}  // namespace daelstm
