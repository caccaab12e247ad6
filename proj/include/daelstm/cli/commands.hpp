#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "daelstm/cli/config.hpp"
#include "daelstm/data/normalize.hpp"
#include "daelstm/data/synthetic.hpp"

namespace daelstm::cli {

// Work directory layout written by the commands:
//   <dataset.dir>/{train,validation,test}/*.csv, dataset.json
//   <work_dir>/dae.ckpt, lstm.ckpt, stacked.ckpt, classifier.ckpt (+ .json sidecars)
//   <work_dir>/{dae,lstm,finetune,classifier}_report.json
//   <work_dir>/eval/metrics.csv, eval/report.json

/// Normalized splits plus the statistics fitted on the training split.
struct Dataset {
  SkeletonSpec skeleton;
  NormalizationStats stats;
  double fps = 25.0;
  std::vector<MotionSequence> train;
  std::vector<MotionSequence> validation;
  std::vector<MotionSequence> test;
};

/// Statistics of the training split only.
NormalizationStats fit_split_stats(const DatasetSplit& split);

/// Writes raw (unnormalized) CSVs for each split and dataset.json holding the
/// skeleton, roster, file lists and train-split normalization statistics.
/// Returns the number of sequences written.
std::size_t cmd_gen_data(const RunConfig& config);

/// Throws StagingError when gen-data has not produced the dataset.
Dataset load_dataset(const RunConfig& config);

enum class Stage { Dae, Lstm, Finetune };
Stage stage_from_name(std::string_view name);
std::string_view stage_name(Stage stage);

/// Trains one stage and writes its checkpoint and report. Finetune throws
/// StagingError unless both pretrained checkpoints exist.
TrainingReport cmd_train(const RunConfig& config, Stage stage);

ClassifierResult cmd_train_classifier(const RunConfig& config);

struct PredictOptions {
  std::filesystem::path checkpoint;  // default <work_dir>/stacked.ckpt
  std::filesystem::path seed_csv;
  std::filesystem::path output;      // default <work_dir>/prediction.csv
  bool filtered = true;
};

/// Seeds with the first eval.seed_frames frames of the seed CSV and writes
/// eval.rollout_frames denormalized frames. Returns the output path.
std::filesystem::path cmd_predict(const RunConfig& config, const PredictOptions& options);

struct EvaluateOptions {
  std::filesystem::path checkpoint;  // default <work_dir>/stacked.ckpt
  std::filesystem::path classifier;  // default <work_dir>/classifier.ckpt
  /// Reference LSTM compared against; default <work_dir>/lstm.ckpt when present.
  std::optional<std::filesystem::path> baseline;
  std::filesystem::path test_dir;    // default <dataset.dir>/test
  std::filesystem::path output_dir;  // default <work_dir>/eval
};

struct EvaluationResult {
  AblationReport ablation;
  LongevityReport longevity;
  nlohmann::json document;
};

EvaluationResult cmd_evaluate(const RunConfig& config, const EvaluateOptions& options);

/// 2 config error, 3 staging error, 4 divergence, 1 anything else.
int exit_code_for(const std::exception& error);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace daelstm::cli
