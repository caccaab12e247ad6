#include "daelstm/eval/classifier.hpp"

#include <array>
#include <cmath>
#include <set>
#include <utility>

#include "daelstm/errors.hpp"
#include "daelstm/nn/loss.hpp"

namespace daelstm {

namespace {

struct Crop {
  std::size_t sequence, begin, end;
};

std::size_t class_of(const MotionSequence& s, std::size_t classes) {
  if (!s.label) throw DataError("classifier: unlabeled sequence");
  if (*s.label < 0 || static_cast<std::size_t>(*s.label) >= classes) {
    throw DataError("classifier: label " + std::to_string(*s.label) + " outside the model's classes");
  }
  return static_cast<std::size_t>(*s.label);
}

std::vector<Crop> draw_crops(std::span<const MotionSequence> seqs, std::size_t per_sequence,
                             const ClassifierTrainConfig& config, Rng& rng) {
  std::vector<Crop> crops;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const std::size_t len = seqs[i].length();
    if (len == 0) throw DataError("classifier: empty sequence");
    const auto lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(config.min_crop_s * seqs[i].fps)));
    const auto hi = std::max(lo, static_cast<std::size_t>(std::llround(config.max_crop_s * seqs[i].fps)));
    for (std::size_t k = 0; k < per_sequence; ++k) {
      const std::size_t crop = std::min(len, lo + rng.index(hi - lo + 1));
      const std::size_t begin = rng.index(len - crop + 1);
      crops.push_back({i, begin, begin + crop});
    }
  }
  return crops;
}

Vector final_probs(const RecurrentStack& stack, const Matrix& frames) {
  StackState state = zero_state(stack);
  Vector logits;
  for (std::size_t t = 0; t < frames.rows(); ++t) logits = stack_step(stack, state, frames.row(t));
  return softmax(logits);
}

double held_out_loss(const ClassifierModel& model, std::span<const MotionSequence> seqs,
                     const std::vector<Crop>& crops) {
  double total = 0.0;
  for (const Crop& c : crops) {
    const Vector p = final_probs(model.stack(), seqs[c.sequence].frames.slice_rows(c.begin, c.end));
    total += cross_entropy(p, class_of(seqs[c.sequence], model.num_classes()));
  }
  return crops.empty() ? 0.0 : total / static_cast<double>(crops.size());
}

}  // namespace

ClassifierModel::ClassifierModel(RecurrentStack stack) : stack_(std::move(stack)) {
  require_shape(stack_.depth() == 3, "classifier: expected 3 LSTM layers");
  require_shape(stack_.head.activation == Activation::identity, "classifier: head must emit linear logits");
  require_shape(stack_.output_size() >= 2, "classifier: need at least 2 classes");
}

ClassifierModel ClassifierModel::create(std::size_t pose_dims, std::size_t hidden, std::size_t classes, Rng& rng) {
  if (pose_dims == 0 || hidden == 0) throw ShapeError("classifier: dims must be positive");
  if (classes < 2) throw DataError("classifier: need at least 2 classes");
  const std::array<std::size_t, 3> sizes{hidden, hidden, hidden};
  return ClassifierModel(RecurrentStack::uniform_init(pose_dims, sizes, classes, Activation::identity, rng));
}

ClassifierModel ClassifierModel::from_architecture(const nlohmann::json& architecture) {
  const auto dims = architecture.at("pose_dims").get<std::size_t>();
  const auto hidden = architecture.at("hidden").get<std::size_t>();
  const auto classes = architecture.at("classes").get<std::size_t>();
  Rng rng(0);
  ClassifierModel m = create(dims, hidden, classes, rng);
  return m.zeros_like();
}

nlohmann::json ClassifierModel::architecture() const {
  return {{"pose_dims", pose_dims()}, {"hidden", stack_.cells.front().hidden_size()}, {"classes", num_classes()}};
}

void ClassifierTrainConfig::validate() const {
  if (hidden == 0) throw ConfigError("classifier hidden size must be positive");
  if (crops_per_sequence == 0 || eval_crops == 0) throw ConfigError("classifier crop counts must be positive");
  if (!(min_crop_s > 0.0 && max_crop_s >= min_crop_s)) throw ConfigError("classifier crop lengths invalid");
  if (!(optimizer.learning_rate > 0.0)) throw ConfigError("classifier learning rate must be positive");
}

ClassifierResult train_classifier(ClassifierModel& model, std::span<const MotionSequence> train,
                                  std::span<const MotionSequence> held_out, const ClassifierTrainConfig& config,
                                  Rng& rng) {
  config.validate();
  if (train.empty()) throw DataError("train_classifier: empty training set");
  std::set<std::size_t> seen;
  for (const auto& s : train) {
    require_shape(s.dims() == model.pose_dims(), "train_classifier: data width != model dims");
    seen.insert(class_of(s, model.num_classes()));
  }
  if (seen.size() < 2) throw DataError("train_classifier: training data holds a single class");
  for (const auto& s : held_out) {
    require_shape(s.dims() == model.pose_dims(), "train_classifier: held-out width != model dims");
    class_of(s, model.num_classes());
  }

  const std::span<const MotionSequence> val = held_out.empty() ? train : held_out;
  Rng eval_rng(rng.next_u64());
  const std::vector<Crop> val_crops = draw_crops(val, config.eval_crops, config, eval_rng);

  ClassifierResult result;
  result.report.stage = "classifier";
  result.report.initial_validation_loss = held_out_loss(model, val, val_crops);

  Optimizer optimizer(config.optimizer);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<Crop> crops = draw_crops(train, config.crops_per_sequence, config, rng);
    std::vector<std::size_t> order(crops.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(std::span(order));
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const Crop& c = crops[idx];
      const Matrix frames = train[c.sequence].frames.slice_rows(c.begin, c.end);
      const StackTrace trace = stack_forward(model.stack(), frames);
      const Vector p = softmax(trace.outputs.row(frames.rows() - 1));
      const std::size_t label = class_of(train[c.sequence], model.num_classes());
      const double loss = cross_entropy(p, label);
      if (!std::isfinite(loss)) {
        throw DivergenceError("train_classifier: non-finite loss in epoch " + std::to_string(epoch + 1));
      }
      Matrix grad(frames.rows(), model.num_classes());
      auto last = grad.row(frames.rows() - 1);
      for (std::size_t k = 0; k < p.size(); ++k) last[k] = p[k] - (k == label ? 1.0 : 0.0);
      ClassifierModel grads = model.zeros_like();
      stack_backward(model.stack(), trace, grad, grads.stack());
      const TensorList g = grads.tensors();
      clip_global_norm(g, config.clip_norm);
      optimizer.step(model.tensors(), const_view(g));
      loss_sum += loss;
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.train_loss = loss_sum / static_cast<double>(crops.size());
    rec.validation_loss = held_out_loss(model, val, val_crops);
    if (!std::isfinite(rec.validation_loss)) {
      throw DivergenceError("train_classifier: non-finite validation loss in epoch " + std::to_string(epoch + 1));
    }
    rec.learning_rate = optimizer.learning_rate();
    result.report.epochs.push_back(rec);
    optimizer.end_epoch(rec.validation_loss);
  }
  result.report.halvings = optimizer.halvings();
  result.held_out_accuracy = classifier_accuracy(model, val, config, eval_rng.next_u64());
  return result;
}

double classifier_accuracy(const ClassifierModel& model, std::span<const MotionSequence> sequences,
                           const ClassifierTrainConfig& config, std::uint64_t seed) {
  if (sequences.empty()) return 0.0;
  Rng rng(seed);
  const std::vector<Crop> crops = draw_crops(sequences, config.eval_crops, config, rng);
  std::size_t correct = 0;
  for (const Crop& c : crops) {
    const Vector p = final_probs(model.stack(), sequences[c.sequence].frames.slice_rows(c.begin, c.end));
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
      if (p[k] > p[best]) best = k;
    }
    if (best == class_of(sequences[c.sequence], model.num_classes())) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(crops.size());
}

ClassProbSeries classify_over_time(const ClassifierModel& model, const Matrix& frames, int true_class, double fps) {
  require_shape(frames.cols() == model.pose_dims(), "classify_over_time: frame width != model dims");
  ClassProbSeries series;
  series.true_class = true_class;
  series.fps = fps;
  series.probabilities = Matrix(frames.rows(), model.num_classes());
  StackState state = zero_state(model.stack());
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    const Vector p = softmax(stack_step(model.stack(), state, frames.row(t)));
    std::copy(p.begin(), p.end(), series.probabilities.row(t).begin());
  }
  return series;
}

}  // namespace daelstm
