#include "daelstm/dae/dae.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "daelstm/data/corrupt.hpp"
#include "daelstm/errors.hpp"
#include "daelstm/nn/loss.hpp"

namespace daelstm {

DaeModel::DaeModel(SkeletonSpec skeleton, std::vector<DenseLayer> layers)
    : skeleton_(std::move(skeleton)), layers_(std::move(layers)) {
  require_shape(!layers_.empty(), "DAE needs at least one layer");
  require_shape(layers_.front().in_dim() == input_dims(), "DAE first layer in-dim != pose dims");
  require_shape(layers_.back().out_dim() == input_dims(), "DAE last layer out-dim != pose dims");
  for (std::size_t k = 1; k < layers_.size(); ++k) {
    require_shape(layers_[k].in_dim() == layers_[k - 1].out_dim(), "DAE layer chain mismatch");
  }
}

DaeModel DaeModel::create(const SkeletonSpec& skeleton, std::size_t width, std::size_t hidden_layers, Rng& rng) {
  if (width == 0) throw ConfigError("DAE width must be positive");
  std::vector<DenseLayer> layers;
  std::size_t in = skeleton.total_dims();
  for (std::size_t k = 0; k < hidden_layers; ++k) {
    layers.push_back(DenseLayer::uniform_init(in, width, Activation::relu, rng));
    in = width;
  }
  layers.push_back(DenseLayer::uniform_init(in, skeleton.total_dims(), Activation::identity, rng));
  return DaeModel(skeleton, std::move(layers));
}

DaeModel DaeModel::identity(const SkeletonSpec& skeleton) {
  const std::size_t d = skeleton.total_dims();
  return DaeModel(skeleton, {DenseLayer{Matrix::identity(d), Vector(d, 0.0), Activation::identity}});
}

DaeModel DaeModel::from_architecture(const nlohmann::json& architecture) {
  const SkeletonSpec skeleton = SkeletonSpec::from_json(architecture.at("skeleton"));
  std::vector<DenseLayer> layers;
  for (const auto& l : architecture.at("layers")) {
    const auto in = l.at("in").get<std::size_t>();
    const auto out = l.at("out").get<std::size_t>();
    layers.push_back(DenseLayer{Matrix(out, in), Vector(out, 0.0),
                                activation_from_name(l.at("activation").get<std::string>())});
  }
  return DaeModel(skeleton, std::move(layers));
}

DaeModel DaeModel::zeros_like() const {
  std::vector<DenseLayer> z;
  for (const auto& l : layers_) z.push_back(l.zeros_like());
  return DaeModel(skeleton_, std::move(z));
}

TensorList DaeModel::tensors() {
  TensorList out;
  for (std::size_t k = 0; k < layers_.size(); ++k) layers_[k].append_tensors("dense" + std::to_string(k), out);
  return out;
}

ConstTensorList DaeModel::tensors() const { return const_view(const_cast<DaeModel*>(this)->tensors()); }

nlohmann::json DaeModel::architecture() const {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : layers_) {
    layers.push_back({{"in", l.in_dim()}, {"out", l.out_dim()}, {"activation", activation_name(l.activation)}});
  }
  return {{"skeleton", skeleton_.to_json()}, {"layers", layers}};
}

Matrix dae_filter_batch(const DaeModel& model, const Matrix& poses) {
  require_shape(poses.cols() == model.input_dims(), "dae_filter: pose width " + std::to_string(poses.cols()) +
                                                        " != model dims " + std::to_string(model.input_dims()));
  Matrix x = poses;
  for (const auto& layer : model.layers()) x = dense_forward(layer, x);
  return x;
}

Vector dae_filter(const DaeModel& model, std::span<const double> pose) {
  Matrix batch(1, pose.size(), Vector(pose.begin(), pose.end()));
  Matrix out = dae_filter_batch(model, batch);
  return Vector(out.values().begin(), out.values().end());
}

DaeTrace dae_forward_train(const DaeModel& model, const Matrix& input, double internal_dropout, Rng& rng) {
  require_shape(input.cols() == model.input_dims(), "dae_forward: pose width mismatch");
  if (!(internal_dropout >= 0.0 && internal_dropout < 1.0)) {
    throw std::invalid_argument("internal dropout must lie in [0, 1)");
  }
  const auto& layers = model.layers();
  DaeTrace trace;
  Matrix x = input;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    trace.inputs.push_back(x);
    Matrix y = dense_forward(layers[k], x);
    trace.outputs.push_back(y);
    const bool hidden = k + 1 < layers.size();
    if (hidden && internal_dropout > 0.0) {
      Vector mask = dropout_mask(rng, y.size(), internal_dropout);
      const double scale = 1.0 / (1.0 - internal_dropout);
      for (double& m : mask) m *= scale;
      auto values = y.values();
      for (std::size_t i = 0; i < values.size(); ++i) values[i] *= mask[i];
      trace.masks.push_back(std::move(mask));
    } else {
      trace.masks.emplace_back();
    }
    x = std::move(y);
  }
  trace.result = std::move(x);
  return trace;
}

Matrix dae_backward(const DaeModel& model, const DaeTrace& trace, const Matrix& output_grad, DaeModel& grads) {
  const auto& layers = model.layers();
  Matrix upstream = output_grad;
  for (std::size_t k = layers.size(); k-- > 0;) {
    if (!trace.masks[k].empty()) {
      auto values = upstream.values();
      for (std::size_t i = 0; i < values.size(); ++i) values[i] *= trace.masks[k][i];
    }
    Matrix input_grad;
    dense_backward_into(layers[k], trace.inputs[k], trace.outputs[k], upstream, grads.layers()[k], &input_grad);
    upstream = std::move(input_grad);
  }
  return upstream;
}

DaeLossResult dae_loss_and_grads(const DaeModel& model, const Matrix& corrupted, const Matrix& clean,
                                 double internal_dropout, Rng& rng) {
  require_shape(corrupted.rows() == clean.rows() && corrupted.cols() == clean.cols(),
                "dae loss: corrupted/clean batch shapes differ");
  require_shape(clean.rows() > 0, "dae loss: empty batch");
  const DaeTrace trace = dae_forward_train(model, corrupted, internal_dropout, rng);
  const double inv_b = 1.0 / static_cast<double>(clean.rows());
  DaeLossResult result;
  Matrix d_out(clean.rows(), clean.cols());
  for (std::size_t b = 0; b < clean.rows(); ++b) {
    const auto y = trace.result.row(b);
    const auto target = clean.row(b);
    result.loss += squared_error(y, target) * inv_b;
    auto d = d_out.row(b);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = 2.0 * (y[j] - target[j]) * inv_b;
  }
  result.grads = model.zeros_like();
  result.input_grad = dae_backward(model, trace, d_out, result.grads);
  return result;
}

void DaeTrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("dae batch size must be positive");
  if (!(internal_dropout >= 0.0 && internal_dropout < 1.0)) throw ConfigError("dae internal dropout outside [0, 1)");
  if (!(dropout_anneal >= 0.0 && dropout_anneal <= 1.0)) throw ConfigError("dae dropout anneal factor outside [0, 1]");
  schedule.validate();
  if (!(optimizer.learning_rate > 0.0)) throw ConfigError("dae learning rate must be positive");
}

Matrix pool_frames(std::span<const MotionSequence> sequences) {
  std::size_t rows = 0;
  std::size_t cols = sequences.empty() ? 0 : sequences.front().dims();
  for (const auto& s : sequences) {
    require_shape(s.dims() == cols, "sequences disagree on feature count");
    rows += s.length();
  }
  Vector data;
  data.reserve(rows * cols);
  for (const auto& s : sequences) data.insert(data.end(), s.frames.values().begin(), s.frames.values().end());
  return Matrix(rows, cols, std::move(data));
}

double dae_validation_loss(const DaeModel& model, std::span<const MotionSequence> sequences) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& s : sequences) {
    const Matrix out = dae_filter_batch(model, s.frames);
    for (std::size_t t = 0; t < s.length(); ++t) total += squared_error(out.row(t), s.frames.row(t));
    count += s.length();
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

TrainingReport train_dae(DaeModel& model, std::span<const MotionSequence> train,
                         std::span<const MotionSequence> validation, const DaeTrainConfig& config, Rng& rng) {
  config.validate();
  const Matrix frames = pool_frames(train);
  if (frames.rows() == 0) throw DataError("train_dae: empty training set");
  require_shape(frames.cols() == model.input_dims(), "train_dae: data width != model dims");

  TrainingReport report;
  report.stage = "dae";
  const bool has_val = !validation.empty();
  report.initial_validation_loss =
      has_val ? dae_validation_loss(model, validation) : dae_validation_loss(model, train);

  Optimizer optimizer(config.optimizer);
  std::vector<std::size_t> order(frames.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t dims = frames.cols();
  double internal_dropout = config.internal_dropout;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const CurriculumStage stage = config.schedule.stage(config.schedule.stage_for_epoch(epoch, config.epochs));
    rng.shuffle(std::span(order));
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, order.size() - start);
      Matrix clean(n, dims);
      for (std::size_t b = 0; b < n; ++b) {
        const auto src = frames.row(order[start + b]);
        std::copy(src.begin(), src.end(), clean.row(b).begin());
      }
      Matrix corrupted = clean;
      for (std::size_t b = 0; b < n; ++b) {
        add_gaussian_noise(corrupted.row(b), stage.noise_variance, rng);
        drop_joints(corrupted.row(b), stage.dropout_rate, model.skeleton(), rng);
      }
      DaeLossResult r = dae_loss_and_grads(model, corrupted, clean, internal_dropout, rng);
      if (!std::isfinite(r.loss)) {
        throw DivergenceError("train_dae: non-finite loss in epoch " + std::to_string(epoch + 1));
      }
      optimizer.step(model.tensors(), std::as_const(r.grads).tensors());
      loss_sum += r.loss;
      ++batches;
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.train_loss = loss_sum / static_cast<double>(batches);
    rec.validation_loss = has_val ? dae_validation_loss(model, validation) : rec.train_loss;
    if (!std::isfinite(rec.validation_loss)) {
      throw DivergenceError("train_dae: non-finite validation loss in epoch " + std::to_string(epoch + 1));
    }
    rec.learning_rate = optimizer.learning_rate();
    rec.noise_variance = stage.noise_variance;
    rec.dropout_rate = stage.dropout_rate;
    rec.internal_dropout = internal_dropout;
    report.epochs.push_back(rec);
    if (optimizer.end_epoch(rec.validation_loss)) internal_dropout *= config.dropout_anneal;
  }
  report.halvings = optimizer.halvings();
  return report;
}

std::vector<std::pair<double, double>> reconstruction_error_curve(const DaeModel& model,
                                                                   std::span<const MotionSequence> test,
                                                                   std::span<const double> rates,
                                                                   std::uint64_t seed) {
  std::vector<std::pair<double, double>> curve;
  for (double rate : rates) {
    Rng rng(derive_seed(seed, "reconstruction-curve"));
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& s : test) {
      Matrix corrupted = s.frames;
      for (std::size_t t = 0; t < corrupted.rows(); ++t) drop_joints(corrupted.row(t), rate, model.skeleton(), rng);
      const Matrix out = dae_filter_batch(model, corrupted);
      for (std::size_t t = 0; t < s.length(); ++t) total += squared_error(out.row(t), s.frames.row(t));
      count += s.length();
    }
    curve.emplace_back(rate, count == 0 ? 0.0 : total / static_cast<double>(count));
  }
  return curve;
}

}  // namespace daelstm
