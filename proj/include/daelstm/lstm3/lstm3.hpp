#pragma once

#include <functional>
#include <span>

#include <json.hpp>

#include "daelstm/dae/schedule.hpp"
#include "daelstm/data/skeleton.hpp"
#include "daelstm/nn/optimizer.hpp"
#include "daelstm/nn/recurrent.hpp"
#include "daelstm/nn/report.hpp"

namespace daelstm {

/// Three stacked LSTM cells and a linear projection back to pose space.
class Lstm3Model {
 public:
  static constexpr std::size_t kLayers = 3;

  Lstm3Model() = default;
  explicit Lstm3Model(RecurrentStack stack);

  static Lstm3Model create(std::size_t pose_dims, std::size_t hidden, Rng& rng);
  /// All weights and biases zero.
  static Lstm3Model zeros(std::size_t pose_dims, std::size_t hidden);
  static Lstm3Model from_architecture(const nlohmann::json& architecture);

  std::size_t pose_dims() const { return stack_.input_size(); }
  std::size_t hidden_size() const { return stack_.cells.front().hidden_size(); }
  const RecurrentStack& stack() const { return stack_; }
  RecurrentStack& stack() { return stack_; }

  Lstm3Model zeros_like() const { return Lstm3Model(stack_.zeros_like()); }
  TensorList tensors() { return stack_.tensors(); }
  ConstTensorList tensors() const { return stack_.tensors(); }
  nlohmann::json architecture() const;

 private:
  RecurrentStack stack_;
};

struct RolloutState {
  StackState layers;
  Vector last_pose;
};

RolloutState initial_rollout_state(const Lstm3Model& model);

/// One step through the three cells and the projection; advances `state` and
/// records the emitted pose as `state.last_pose`.
Vector predict_step(const Lstm3Model& model, RolloutState& state, std::span<const double> pose);

struct LstmTrainConfig {
  std::size_t epochs = 20;
  /// BPTT chunk length; state starts from zero in every chunk.
  std::size_t window = 100;
  /// Gaussian input-noise curriculum (dropout entries are ignored).
  CurriculumSchedule schedule = CurriculumSchedule::gaussian_only();
  OptimizerConfig optimizer{0.005, 2, 0.0};
  double clip_norm = 5.0;

  void validate() const;
};

/// Teacher-forced training: inputs X[0..T-2] (with curriculum noise),
/// targets X[1..T-1] (clean). Model predictions are never fed back.
TrainingReport train_lstm(Lstm3Model& model, std::span<const MotionSequence> train,
                          std::span<const MotionSequence> validation, const LstmTrainConfig& config, Rng& rng);

/// Mean per-frame squared error of teacher-forced one-step predictions.
double lstm_validation_loss(const Lstm3Model& model, std::span<const MotionSequence> sequences);

/// One autoregressive step as seen by a rollout observer.
struct RolloutStepInfo {
  std::size_t step = 0;              // 0-based index of the emitted frame
  std::span<const double> input;     // frame fed to predict_step
  std::span<const double> raw;       // LSTM output
  std::span<const double> emitted;   // frame emitted (and fed back next)
};

using RolloutObserver = std::function<void(const RolloutStepInfo&)>;

/// Consumes every seed frame, then feeds each prediction back as the next
/// input. Returns exactly `horizon` predicted frames; the first comes from
/// the step on the last seed frame.
MotionSequence rollout_unfiltered(const Lstm3Model& model, const Matrix& seed, std::size_t horizon,
                                  double fps = 25.0, const RolloutObserver& observer = {});

/// Mean over features of the temporal variance of frames [begin, end).
double window_variance(const Matrix& frames, std::size_t begin, std::size_t end);

}  // namespace daelstm
