#pragma once

#include <cstdint>
#include <span>

#include <json.hpp>

#include "daelstm/data/skeleton.hpp"
#include "daelstm/eval/metrics.hpp"
#include "daelstm/nn/optimizer.hpp"
#include "daelstm/nn/recurrent.hpp"
#include "daelstm/nn/report.hpp"

namespace daelstm {

/// Three LSTM layers and a linear head producing class logits at each frame.
class ClassifierModel {
 public:
  ClassifierModel() = default;
  explicit ClassifierModel(RecurrentStack stack);

  static ClassifierModel create(std::size_t pose_dims, std::size_t hidden, std::size_t classes, Rng& rng);
  static ClassifierModel from_architecture(const nlohmann::json& architecture);

  std::size_t pose_dims() const { return stack_.input_size(); }
  std::size_t num_classes() const { return stack_.output_size(); }
  const RecurrentStack& stack() const { return stack_; }
  RecurrentStack& stack() { return stack_; }

  ClassifierModel zeros_like() const { return ClassifierModel(stack_.zeros_like()); }
  TensorList tensors() { return stack_.tensors(); }
  ConstTensorList tensors() const { return stack_.tensors(); }
  nlohmann::json architecture() const;

 private:
  RecurrentStack stack_;
};

struct ClassifierTrainConfig {
  std::size_t hidden = 24;
  std::size_t epochs = 12;
  /// Random crops drawn from each training sequence per epoch.
  std::size_t crops_per_sequence = 8;
  /// Crop lengths in seconds, drawn uniformly.
  double min_crop_s = 1.0;
  double max_crop_s = 6.0;
  OptimizerConfig optimizer{0.005, 2, 0.0};
  double clip_norm = 5.0;
  /// Crops per held-out sequence when measuring accuracy.
  std::size_t eval_crops = 4;

  void validate() const;
};

struct ClassifierResult {
  TrainingReport report;
  double held_out_accuracy = 0.0;
};

/// Cross-entropy on the prediction at the last frame of random crops.
/// Validation loss is the mean held-out cross-entropy. Throws DataError for
/// unlabeled sequences or fewer than two distinct classes.
ClassifierResult train_classifier(ClassifierModel& model, std::span<const MotionSequence> train,
                                  std::span<const MotionSequence> held_out, const ClassifierTrainConfig& config,
                                  Rng& rng);

/// Fraction of crops (lengths as in training, drawn from `seed`) whose
/// final-frame argmax equals the label.
double classifier_accuracy(const ClassifierModel& model, std::span<const MotionSequence> sequences,
                           const ClassifierTrainConfig& config, std::uint64_t seed);

/// Softmax over the classes after every frame, state accumulating from the
/// first frame.
ClassProbSeries classify_over_time(const ClassifierModel& model, const Matrix& frames, int true_class,
                                   double fps = 25.0);

}  // namespace daelstm
