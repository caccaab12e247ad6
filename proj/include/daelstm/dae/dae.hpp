#pragma once

#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "daelstm/dae/schedule.hpp"
#include "daelstm/data/skeleton.hpp"
#include "daelstm/nn/dense.hpp"
#include "daelstm/nn/optimizer.hpp"
#include "daelstm/nn/report.hpp"

namespace daelstm {

/// Feed-forward pose filter: ReLU hidden layers and a linear projection back
/// to the pose dimensions. No weight sharing between layers.
class DaeModel {
 public:
  DaeModel() = default;
  DaeModel(SkeletonSpec skeleton, std::vector<DenseLayer> layers);

  /// `hidden_layers` ReLU layers of `width` units plus a linear output layer.
  static DaeModel create(const SkeletonSpec& skeleton, std::size_t width, std::size_t hidden_layers, Rng& rng);
  /// Single linear layer with identity weights and zero bias.
  static DaeModel identity(const SkeletonSpec& skeleton);
  /// Same layer shapes as described by `architecture()` output, zero weights.
  static DaeModel from_architecture(const nlohmann::json& architecture);

  const SkeletonSpec& skeleton() const { return skeleton_; }
  std::size_t input_dims() const { return skeleton_.total_dims(); }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  DaeModel zeros_like() const;
  TensorList tensors();
  ConstTensorList tensors() const;
  nlohmann::json architecture() const;

 private:
  SkeletonSpec skeleton_;
  std::vector<DenseLayer> layers_;
};

/// Deterministic evaluation-mode reconstruction of one pose.
Vector dae_filter(const DaeModel& model, std::span<const double> pose);
/// Row-wise reconstruction of a batch of poses.
Matrix dae_filter_batch(const DaeModel& model, const Matrix& poses);

/// Forward record with internal (inverted) dropout after every hidden layer.
struct DaeTrace {
  std::vector<Matrix> inputs;   // input to layer k
  std::vector<Matrix> outputs;  // activation of layer k before its dropout mask
  std::vector<Vector> masks;    // flattened keep-masks scaled by 1/(1-p); empty if none
  Matrix result;
};

DaeTrace dae_forward_train(const DaeModel& model, const Matrix& input, double internal_dropout, Rng& rng);
/// Accumulates parameter gradients into `grads`; returns dL/d input.
Matrix dae_backward(const DaeModel& model, const DaeTrace& trace, const Matrix& output_grad, DaeModel& grads);

struct DaeLossResult {
  /// Mean over the batch of the per-pose squared error.
  double loss = 0.0;
  DaeModel grads;
  Matrix input_grad;
};

/// Reconstruction loss of clean poses from `corrupted` inputs and its gradient.
DaeLossResult dae_loss_and_grads(const DaeModel& model, const Matrix& corrupted, const Matrix& clean,
                                 double internal_dropout, Rng& rng);

struct DaeTrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  /// Dropout after each hidden layer while pretraining.
  double internal_dropout = 0.5;
  /// Factor applied to the internal dropout whenever validation plateaus
  /// (alongside the learning-rate halving). 1 keeps it fixed.
  double dropout_anneal = 0.5;
  CurriculumSchedule schedule = CurriculumSchedule::dropout_noise();
  OptimizerConfig optimizer{0.005, 2, 1e-5};

  void validate() const;
};

/// Trains on (clean X, corrupted X~) pairs where X~ = joint_dropout(gaussian(X))
/// at the current curriculum stage. Validation loss is the clean-input
/// reconstruction error; when no validation sequences are given the training
/// loss drives the plateau logic.
TrainingReport train_dae(DaeModel& model, std::span<const MotionSequence> train,
                         std::span<const MotionSequence> validation, const DaeTrainConfig& config, Rng& rng);

/// Mean squared error between clean frames and dae_filter(frame) over all frames.
double dae_validation_loss(const DaeModel& model, std::span<const MotionSequence> sequences);

/// For each rate r, joint-drops every test frame at r and reports the mean
/// squared error of the filtered output against the clean frame. Every rate
/// replays the same random stream, so dropped joint sets are nested as r grows.
std::vector<std::pair<double, double>> reconstruction_error_curve(const DaeModel& model,
                                                                   std::span<const MotionSequence> test,
                                                                   std::span<const double> rates,
                                                                   std::uint64_t seed);

/// Stacks every frame of every sequence into one matrix.
Matrix pool_frames(std::span<const MotionSequence> sequences);

}  // namespace daelstm
