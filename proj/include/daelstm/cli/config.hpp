#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "daelstm/dae/dae.hpp"
#include "daelstm/eval/ablation.hpp"
#include "daelstm/eval/classifier.hpp"
#include "daelstm/lstm3/lstm3.hpp"
#include "daelstm/stacked/stacked.hpp"

namespace daelstm::cli {

struct DatasetConfig {
  /// Output of gen-data and input of every later command.
  std::string dir = "data";
  /// "synthetic" or "csv".
  std::string source = "synthetic";
  /// Labelled motion CSVs read when source == "csv".
  std::string csv_dir;
  /// Optional roster JSON replacing the built-in three-class roster.
  std::string roster;
  /// Optional skeleton JSON; required for csv sources.
  std::string skeleton;
  std::size_t sequences_per_class = 20;
  double duration_s = 16.0;
  double source_fps = 50.0;
  std::size_t downsample = 2;
  double validation_fraction = 0.1;
  double test_fraction = 0.2;
};

struct DaeSection {
  std::size_t width = 256;
  std::size_t hidden_layers = 3;
  DaeTrainConfig train;
};

struct LstmSection {
  std::size_t hidden = 64;
  LstmTrainConfig train;
};

struct EvalSection {
  RolloutProtocol protocol;
  double longevity_threshold = 0.5;
  double warmup_s = 1.0;
  /// Class whose longevity is headlined in the report.
  int periodic_class = 0;
};

struct RunConfig {
  std::uint64_t seed = 1234;
  std::string work_dir = "run";
  DatasetConfig dataset;
  DaeSection dae;
  LstmSection lstm;
  FinetuneConfig finetune;
  ClassifierTrainConfig classifier;
  EvalSection eval;

  /// Keys absent from `doc` keep their defaults; unknown keys are rejected.
  /// The result is validated.
  static RunConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
  /// Throws ConfigError on any value a module would reject, and on
  /// referenced input paths that do not exist.
  void validate() const;

  /// Per-stage seed derived from the global seed.
  std::uint64_t stage_seed(std::string_view tag) const;
};

/// Sets a dotted key (e.g. "dae.train.epochs") in a config document. The
/// value is parsed as JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Parses a config file; throws ConfigError when unreadable or malformed.
nlohmann::json read_config_file(const std::filesystem::path& path);

}  // namespace daelstm::cli
