#pragma once

#include <span>

#include "daelstm/dae/dae.hpp"
#include "daelstm/lstm3/lstm3.hpp"

namespace daelstm {

/// LSTM3LR predictor with the DAE interposed on its output.
struct StackedModel {
  Lstm3Model lstm;
  DaeModel dae;
  bool fine_tuned = false;

  /// Throws ShapeError unless lstm output dims == dae input dims.
  void validate() const;
  StackedModel zeros_like() const;
  /// LSTM tensors prefixed "lstm.", then DAE tensors prefixed "dae.".
  TensorList tensors();
  ConstTensorList tensors() const;
};

struct FinetuneConfig {
  OptimizerMethod method = OptimizerMethod::adam;
  double learning_rate = 1e-4;
  std::size_t epochs = 20;
  /// Corruption level annealed over the run; non-increasing and ending at 0.
  Vector schedule{0.1, 0.08, 0.04, 0.02, 0.01, 0.0};
  /// Internal DAE dropout at the start of fine-tuning, scaled down with the
  /// schedule to 0.
  double internal_dropout = 0.5;
  double lstm_loss_weight = 1.0;
  double dae_loss_weight = 1.0;
  std::size_t window = 100;
  double clip_norm = 5.0;
  std::size_t patience = 2;

  void validate() const;
};

/// Corruption applied in one fine-tuning step.
struct FinetuneCorruption {
  /// Gaussian variance added to the LSTM's teacher-forced inputs.
  double input_noise_variance = 0.0;
  /// Joint dropout applied to the LSTM prediction before it enters the DAE.
  double dae_input_dropout = 0.0;
  double internal_dropout = 0.0;
};

/// Corruption for a level taken from the schedule.
FinetuneCorruption corruption_for_level(const FinetuneConfig& config, double level);

struct FinetuneLossResult {
  double loss = 0.0;
  double lstm_loss = 0.0;  // mean over steps of squared error of the LSTM output
  double dae_loss = 0.0;   // mean over steps of squared error of the filtered output
  StackedModel grads;
};

/// Combined loss w_l * L_lstm + w_d * L_dae over one window and its gradient
/// with respect to both components (the DAE term reaches the LSTM through the
/// filter input). `inputs` are clean; corruption is drawn from `rng`.
/// No clipping is applied here.
FinetuneLossResult finetune_loss_and_grads(const StackedModel& model, const Matrix& inputs, const Matrix& targets,
                                           const FinetuneCorruption& corruption, double lstm_weight,
                                           double dae_weight, Rng& rng);

/// Teacher-forced one-step error after filtering, mean per frame.
double filtered_validation_loss(const StackedModel& model, std::span<const MotionSequence> sequences);

/// Joint end-to-end training of a pretrained pair. Corruption follows the
/// schedule by progress through the run (so short runs still visit every
/// level) and both dropouts anneal to zero. Validation uses
/// filtered_validation_loss.
TrainingReport finetune(StackedModel& model, std::span<const MotionSequence> train,
                        std::span<const MotionSequence> validation, const FinetuneConfig& config, Rng& rng);

/// Per step: raw = lstm.predict_step(prev); emitted = dae_filter(raw);
/// emitted is returned and fed back. Seed frames pass through unfiltered.
MotionSequence rollout_filtered(const StackedModel& model, const Matrix& seed, std::size_t horizon,
                                double fps = 25.0, const RolloutObserver& observer = {});

}  // namespace daelstm
